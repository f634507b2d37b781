#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tryon/core/rng.hpp"

namespace tryon::ag {

// Dense row-major n-d array. Rank 4 is interpreted as NCHW by the conv and
// sampling ops, rank 2 as a matrix, rank 1 as a vector ([1] for scalars).
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s, T fill = T(0)) : shape(std::move(s)) {
    v.assign(numel_of(shape), fill);
  }

  static std::int64_t numel_of(const std::vector<int>& s) {
    std::int64_t n = 1;
    for (int d : s) {
      if (d <= 0) throw std::invalid_argument("Tensor: non-positive dim");
      n *= d;
    }
    return s.empty() ? 0 : n;
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(v.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }
  int rank() const { return static_cast<int>(shape.size()); }

  T* data() { return v.data(); }
  const T* data() const { return v.data(); }

  T& operator[](std::int64_t i) { return v[static_cast<size_t>(i)]; }
  T operator[](std::int64_t i) const { return v[static_cast<size_t>(i)]; }

  // NCHW accessor.
  T& at(int n, int c, int y, int x) {
    return v[((static_cast<size_t>(n) * dim(1) + c) * dim(2) + y) * dim(3) + x];
  }
  T at(int n, int c, int y, int x) const {
    return v[((static_cast<size_t>(n) * dim(1) + c) * dim(2) + y) * dim(3) + x];
  }
  // Matrix accessor.
  T& m(int r, int c) { return v[static_cast<size_t>(r) * dim(1) + c]; }
  T m(int r, int c) const { return v[static_cast<size_t>(r) * dim(1) + c]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
  static Tensor full(std::vector<int> s, T value) { return Tensor(std::move(s), value); }
  static Tensor scalar(T value) { return Tensor({1}, value); }

  static Tensor randn(std::vector<int> s, Rng& rng, T stddev = T(1)) {
    Tensor t(std::move(s));
    for (auto& x : t.v) x = static_cast<T>(rng.normal()) * stddev;
    return t;
  }
  static Tensor rand_uniform(std::vector<int> s, Rng& rng, T lo, T hi) {
    Tensor t(std::move(s));
    for (auto& x : t.v) x = static_cast<T>(rng.uniform(lo, hi));
    return t;
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.v.resize(v.size());
    for (size_t i = 0; i < v.size(); ++i) out.v[i] = static_cast<U>(v[i]);
    return out;
  }

  bool all_finite() const {
    for (T x : v)
      if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
  }

  T max_abs() const {
    T m = T(0);
    for (T x : v) m = std::max(m, static_cast<T>(std::fabs(static_cast<double>(x))));
    return m;
  }
};

}  // namespace tryon::ag
