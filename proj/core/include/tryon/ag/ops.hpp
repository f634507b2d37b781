#pragma once

#include <Eigen/Dense>

#include "tryon/ag/var.hpp"

namespace tryon::ag {

template <typename T>
using EigenMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<EigenMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const EigenMat<T>>;

namespace detail {

template <typename T>
void accum(Node<T>& p, const Tensor<T>& g) {
  if (!p.requires_grad) return;
  p.ensure_grad();
  const size_t n = p.grad.v.size();
  for (size_t i = 0; i < n; ++i) p.grad.v[i] += g.v[i];
}

template <typename T, typename F>
void accum_fn(Node<T>& p, F&& per_element) {
  if (!p.requires_grad) return;
  p.ensure_grad();
  const size_t n = p.grad.v.size();
  for (size_t i = 0; i < n; ++i) p.grad.v[i] += per_element(i);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise arithmetic
// ---------------------------------------------------------------------------

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  assert(a.value().same_shape(b.value()));
  Tensor<T> out = a.value();
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += b.value().v[i];
  return Var<T>::make_op(std::move(out), {a, b}, [](Node<T>& self) {
    detail::accum(*self.parents[0], self.grad);
    detail::accum(*self.parents[1], self.grad);
  });
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  assert(a.value().same_shape(b.value()));
  Tensor<T> out = a.value();
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] -= b.value().v[i];
  return Var<T>::make_op(std::move(out), {a, b}, [](Node<T>& self) {
    detail::accum(*self.parents[0], self.grad);
    detail::accum_fn(*self.parents[1], [&](size_t i) { return -self.grad.v[i]; });
  });
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  assert(a.value().same_shape(b.value()));
  Tensor<T> out = a.value();
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] *= b.value().v[i];
  return Var<T>::make_op(std::move(out), {a, b}, [](Node<T>& self) {
    const auto& av = self.parents[0]->val.v;
    const auto& bv = self.parents[1]->val.v;
    detail::accum_fn(*self.parents[0], [&](size_t i) { return self.grad.v[i] * bv[i]; });
    detail::accum_fn(*self.parents[1], [&](size_t i) { return self.grad.v[i] * av[i]; });
  });
}

template <typename T>
Var<T> scale(const Var<T>& a, T s) {
  Tensor<T> out = a.value();
  for (auto& x : out.v) x *= s;
  return Var<T>::make_op(std::move(out), {a}, [s](Node<T>& self) {
    detail::accum_fn(*self.parents[0], [&](size_t i) { return self.grad.v[i] * s; });
  });
}

template <typename T>
Var<T> add_scalar(const Var<T>& a, T s) {
  Tensor<T> out = a.value();
  for (auto& x : out.v) x += s;
  return Var<T>::make_op(std::move(out), {a}, [](Node<T>& self) {
    detail::accum(*self.parents[0], self.grad);
  });
}

// Elementwise product with a constant tensor (no gradient into `c`).
template <typename T>
Var<T> mul_const(const Var<T>& a, Tensor<T> c) {
  assert(a.value().same_shape(c));
  Tensor<T> out = a.value();
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] *= c.v[i];
  auto cptr = std::make_shared<Tensor<T>>(std::move(c));
  return Var<T>::make_op(std::move(out), {a}, [cptr](Node<T>& self) {
    detail::accum_fn(*self.parents[0],
                     [&](size_t i) { return self.grad.v[i] * cptr->v[i]; });
  });
}

template <typename T>
Var<T> neg(const Var<T>& a) {
  return scale(a, T(-1));
}

// ---------------------------------------------------------------------------
// Elementwise nonlinearities
// ---------------------------------------------------------------------------

template <typename T>
Var<T> exp_(const Var<T>& a) {
  Tensor<T> out = a.value();
  for (auto& x : out.v) x = std::exp(x);
  return Var<T>::make_op(std::move(out), {a}, [](Node<T>& self) {
    const auto& y = self.val.v;
    detail::accum_fn(*self.parents[0], [&](size_t i) { return self.grad.v[i] * y[i]; });
  });
}

template <typename T>
Var<T> log_(const Var<T>& a, T floor = T(1e-12)) {
  Tensor<T> out = a.value();
  for (auto& x : out.v) x = std::log(std::max(x, floor));
  return Var<T>::make_op(std::move(out), {a, }, [floor](Node<T>& self) {
    const auto& x = self.parents[0]->val.v;
    detail::accum_fn(*self.parents[0], [&](size_t i) {
      return self.grad.v[i] / std::max(x[i], floor);
    });
  });
}

template <typename T>
Var<T> sqrt_(const Var<T>& a, T eps = T(0)) {
  Tensor<T> out = a.value();
  for (auto& x : out.v) x = std::sqrt(x + eps);
  return Var<T>::make_op(std::move(out), {a}, [](Node<T>& self) {
    const auto& y = self.val.v;
    detail::accum_fn(*self.parents[0], [&](size_t i) {
      return self.grad.v[i] / (T(2) * std::max(y[i], T(1e-20)));
    });
  });
}

template <typename T>
Var<T> square(const Var<T>& a) {
  return mul(a, a);
}

template <typename T>
Var<T> abs_(const Var<T>& a) {
  Tensor<T> out = a.value();
  for (auto& x : out.v) x = std::fabs(x);
  return Var<T>::make_op(std::move(out), {a}, [](Node<T>& self) {
    const auto& x = self.parents[0]->val.v;
    detail::accum_fn(*self.parents[0], [&](size_t i) {
      return self.grad.v[i] * (x[i] > T(0) ? T(1) : (x[i] < T(0) ? T(-1) : T(0)));
    });
  });
}

template <typename T>
Var<T> relu(const Var<T>& a) {
  Tensor<T> out = a.value();
  for (auto& x : out.v) x = std::max(x, T(0));
  return Var<T>::make_op(std::move(out), {a}, [](Node<T>& self) {
    const auto& x = self.parents[0]->val.v;
    detail::accum_fn(*self.parents[0], [&](size_t i) {
      return x[i] > T(0) ? self.grad.v[i] : T(0);
    });
  });
}

template <typename T>
Var<T> leaky_relu(const Var<T>& a, T slope = T(0.2)) {
  Tensor<T> out = a.value();
  for (auto& x : out.v) x = x > T(0) ? x : slope * x;
  return Var<T>::make_op(std::move(out), {a}, [slope](Node<T>& self) {
    const auto& x = self.parents[0]->val.v;
    detail::accum_fn(*self.parents[0], [&](size_t i) {
      return self.grad.v[i] * (x[i] > T(0) ? T(1) : slope);
    });
  });
}

template <typename T>
Var<T> sigmoid(const Var<T>& a) {
  Tensor<T> out = a.value();
  for (auto& x : out.v) x = T(1) / (T(1) + std::exp(-x));
  return Var<T>::make_op(std::move(out), {a}, [](Node<T>& self) {
    const auto& y = self.val.v;
    detail::accum_fn(*self.parents[0], [&](size_t i) {
      return self.grad.v[i] * y[i] * (T(1) - y[i]);
    });
  });
}

template <typename T>
Var<T> tanh_(const Var<T>& a) {
  Tensor<T> out = a.value();
  for (auto& x : out.v) x = std::tanh(x);
  return Var<T>::make_op(std::move(out), {a}, [](Node<T>& self) {
    const auto& y = self.val.v;
    detail::accum_fn(*self.parents[0], [&](size_t i) {
      return self.grad.v[i] * (T(1) - y[i] * y[i]);
    });
  });
}

// log(1 + exp(x)), numerically stable; the input is clamped at +-cap so GAN
// losses stay finite even against a saturated discriminator.
template <typename T>
Var<T> softplus(const Var<T>& a, T cap = T(20)) {
  Tensor<T> out = a.value();
  for (auto& x : out.v) {
    const T xc = std::min(std::max(x, -cap), cap);
    x = xc > T(0) ? xc + std::log1p(std::exp(-xc)) : std::log1p(std::exp(xc));
  }
  return Var<T>::make_op(std::move(out), {a}, [cap](Node<T>& self) {
    const auto& x = self.parents[0]->val.v;
    detail::accum_fn(*self.parents[0], [&](size_t i) {
      if (x[i] <= -cap || x[i] >= cap) return T(0);
      return self.grad.v[i] / (T(1) + std::exp(-x[i]));
    });
  });
}

// ---------------------------------------------------------------------------
// Reductions
// ---------------------------------------------------------------------------

template <typename T>
Var<T> sum(const Var<T>& a) {
  T s = T(0);
  for (T x : a.value().v) s += x;
  return Var<T>::make_op(Tensor<T>::scalar(s), {a}, [](Node<T>& self) {
    const T g = self.grad.v[0];
    detail::accum_fn(*self.parents[0], [&](size_t) { return g; });
  });
}

template <typename T>
Var<T> mean(const Var<T>& a) {
  const T inv = T(1) / static_cast<T>(a.numel());
  T s = T(0);
  for (T x : a.value().v) s += x;
  return Var<T>::make_op(Tensor<T>::scalar(s * inv), {a}, [inv](Node<T>& self) {
    const T g = self.grad.v[0] * inv;
    detail::accum_fn(*self.parents[0], [&](size_t) { return g; });
  });
}

// ---------------------------------------------------------------------------
// Shape ops
// ---------------------------------------------------------------------------

template <typename T>
Var<T> reshape(const Var<T>& a, std::vector<int> shape) {
  Tensor<T> out = a.value();
  if (Tensor<T>::numel_of(shape) != out.numel())
    throw std::invalid_argument("reshape: numel mismatch");
  out.shape = std::move(shape);
  return Var<T>::make_op(std::move(out), {a}, [](Node<T>& self) {
    Tensor<T> g = self.grad;
    g.shape = self.parents[0]->val.shape;
    detail::accum(*self.parents[0], g);
  });
}

template <typename T>
Var<T> concat_channels(const std::vector<Var<T>>& xs) {
  assert(!xs.empty());
  const auto& s0 = xs[0].shape();
  int ctotal = 0;
  for (const auto& x : xs) ctotal += x.shape()[1];
  Tensor<T> out({s0[0], ctotal, s0[2], s0[3]});
  const int n = s0[0], h = s0[2], w = s0[3];
  int coff = 0;
  for (const auto& x : xs) {
    const int cx = x.shape()[1];
    for (int ni = 0; ni < n; ++ni)
      for (int c = 0; c < cx; ++c)
        for (int y = 0; y < h; ++y)
          for (int xx = 0; xx < w; ++xx)
            out.at(ni, coff + c, y, xx) = x.value().at(ni, c, y, xx);
    coff += cx;
  }
  std::vector<Var<T>> parents = xs;
  return Var<T>::make_op(std::move(out), parents, [n, h, w](Node<T>& self) {
    int coff = 0;
    for (auto& p : self.parents) {
      const int cx = p->val.shape[1];
      if (p->requires_grad) {
        p->ensure_grad();
        for (int ni = 0; ni < n; ++ni)
          for (int c = 0; c < cx; ++c)
            for (int y = 0; y < h; ++y)
              for (int xx = 0; xx < w; ++xx)
                p->grad.at(ni, c, y, xx) += self.grad.at(ni, coff + c, y, xx);
      }
      coff += cx;
    }
  });
}

// ---------------------------------------------------------------------------
// Matrix ops (rank-2)
// ---------------------------------------------------------------------------

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  const int m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  assert(b.shape()[0] == k);
  Tensor<T> out({m, n});
  ConstMatMap<T> A(a.value().data(), m, k);
  ConstMatMap<T> B(b.value().data(), k, n);
  MatMap<T>(out.data(), m, n).noalias() = A * B;
  return Var<T>::make_op(std::move(out), {a, b}, [m, k, n](Node<T>& self) {
    ConstMatMap<T> G(self.grad.data(), m, n);
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      ConstMatMap<T> B(pb.val.data(), k, n);
      MatMap<T>(pa.grad.data(), m, k).noalias() += G * B.transpose();
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      ConstMatMap<T> A(pa.val.data(), m, k);
      MatMap<T>(pb.grad.data(), k, n).noalias() += A.transpose() * G;
    }
  });
}

template <typename T>
Var<T> transpose(const Var<T>& a) {
  const int m = a.shape()[0], n = a.shape()[1];
  Tensor<T> out({n, m});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.m(j, i) = a.value().m(i, j);
  return Var<T>::make_op(std::move(out), {a}, [m, n](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) p.grad.m(i, j) += self.grad.m(j, i);
  });
}

// Row-wise softmax of a matrix.
template <typename T>
Var<T> softmax_rows(const Var<T>& a) {
  const int r = a.shape()[0], c = a.shape()[1];
  Tensor<T> out({r, c});
  for (int i = 0; i < r; ++i) {
    T mx = a.value().m(i, 0);
    for (int j = 1; j < c; ++j) mx = std::max(mx, a.value().m(i, j));
    T z = T(0);
    for (int j = 0; j < c; ++j) {
      const T e = std::exp(a.value().m(i, j) - mx);
      out.m(i, j) = e;
      z += e;
    }
    const T inv = T(1) / z;
    for (int j = 0; j < c; ++j) out.m(i, j) *= inv;
  }
  return Var<T>::make_op(std::move(out), {a}, [r, c](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int i = 0; i < r; ++i) {
      T dot = T(0);
      for (int j = 0; j < c; ++j) dot += self.grad.m(i, j) * self.val.m(i, j);
      for (int j = 0; j < c; ++j)
        p.grad.m(i, j) += self.val.m(i, j) * (self.grad.m(i, j) - dot);
    }
  });
}

// Subtracts each row's mean (channel-wise centering when rows are channels).
template <typename T>
Var<T> sub_rowmean(const Var<T>& a) {
  const int r = a.shape()[0], c = a.shape()[1];
  Tensor<T> out({r, c});
  for (int i = 0; i < r; ++i) {
    T mu = T(0);
    for (int j = 0; j < c; ++j) mu += a.value().m(i, j);
    mu /= static_cast<T>(c);
    for (int j = 0; j < c; ++j) out.m(i, j) = a.value().m(i, j) - mu;
  }
  return Var<T>::make_op(std::move(out), {a}, [r, c](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int i = 0; i < r; ++i) {
      T gmu = T(0);
      for (int j = 0; j < c; ++j) gmu += self.grad.m(i, j);
      gmu /= static_cast<T>(c);
      for (int j = 0; j < c; ++j) p.grad.m(i, j) += self.grad.m(i, j) - gmu;
    }
  });
}

// Adds a length-c row vector to every row of a [r, c] matrix.
template <typename T>
Var<T> add_rowvec(const Var<T>& a, const Var<T>& row) {
  const int r = a.shape()[0], c = a.shape()[1];
  assert(row.numel() == c);
  Tensor<T> out = a.value();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out.m(i, j) += row.value().v[static_cast<size_t>(j)];
  return Var<T>::make_op(std::move(out), {a, row}, [r, c](Node<T>& self) {
    detail::accum(*self.parents[0], self.grad);
    auto& pr = *self.parents[1];
    if (!pr.requires_grad) return;
    pr.ensure_grad();
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) pr.grad.v[static_cast<size_t>(j)] += self.grad.m(i, j);
  });
}

// Normalizes every column to unit L2 norm (plus eps in the denominator).
template <typename T>
Var<T> l2_normalize_cols(const Var<T>& a, T eps = T(1e-8)) {
  const int r = a.shape()[0], c = a.shape()[1];
  Tensor<T> out({r, c});
  std::vector<T> norms(static_cast<size_t>(c));
  for (int j = 0; j < c; ++j) {
    T s = T(0);
    for (int i = 0; i < r; ++i) s += a.value().m(i, j) * a.value().m(i, j);
    norms[j] = std::sqrt(s);
    const T inv = T(1) / (norms[j] + eps);
    for (int i = 0; i < r; ++i) out.m(i, j) = a.value().m(i, j) * inv;
  }
  auto nptr = std::make_shared<std::vector<T>>(std::move(norms));
  return Var<T>::make_op(std::move(out), {a}, [r, c, eps, nptr](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int j = 0; j < c; ++j) {
      const T n = (*nptr)[j];
      const T denom = n + eps;
      T vdot = T(0);
      for (int i = 0; i < r; ++i) vdot += self.grad.m(i, j) * p.val.m(i, j);
      const T coef = n > T(1e-20) ? vdot / (n * denom * denom) : T(0);
      for (int i = 0; i < r; ++i)
        p.grad.m(i, j) += self.grad.m(i, j) / denom - p.val.m(i, j) * coef;
    }
  });
}

}  // namespace tryon::ag
