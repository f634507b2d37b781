#pragma once

#include <map>
#include <string>

#include "tryon/ag/ops_spatial.hpp"

namespace tryon::ag {

// Named parameter registry. Iteration order is lexicographic (std::map),
// which keeps optimizer update order and checkpoint layout deterministic.
template <typename T>
class ParamStore {
 public:
  Var<T> create(const std::string& name, Tensor<T> init) {
    auto v = parameter(std::move(init));
    auto [it, fresh] = params_.emplace(name, v);
    if (!fresh) throw std::invalid_argument("duplicate parameter: " + name);
    return v;
  }

  std::map<std::string, Var<T>>& params() { return params_; }
  const std::map<std::string, Var<T>>& params() const { return params_; }

  Var<T>& at(const std::string& name) { return params_.at(name); }

  void zero_grad() {
    for (auto& [_, p] : params_) p.zero_grad();
  }
  void set_requires_grad(bool rg) {
    for (auto& [_, p] : params_) p.set_requires_grad(rg);
  }

  std::map<std::string, Tensor<double>> state() const {
    std::map<std::string, Tensor<double>> s;
    for (const auto& [name, p] : params_) s[name] = p.value().template cast<double>();
    return s;
  }
  void load_state(const std::map<std::string, Tensor<double>>& s) {
    for (auto& [name, p] : params_) {
      auto it = s.find(name);
      if (it == s.end()) throw std::runtime_error("missing parameter in state: " + name);
      if (it->second.shape != p.value().shape)
        throw std::runtime_error("parameter shape mismatch: " + name);
      p.value() = it->second.template cast<T>();
    }
  }

 private:
  std::map<std::string, Var<T>> params_;
};

// He-normal fan-in init for conv/linear weights.
template <typename T>
Tensor<T> he_init(std::vector<int> shape, int fan_in, Rng& rng) {
  return Tensor<T>::randn(std::move(shape), rng, static_cast<T>(std::sqrt(2.0 / fan_in)));
}

template <typename T>
struct Conv2dLayer {
  Var<T> w, b;
  int stride = 1, pad = 0;

  Conv2dLayer() = default;
  Conv2dLayer(ParamStore<T>& ps, const std::string& name, int cin, int cout, int k,
              int stride_, int pad_, Rng& rng, bool zero_init = false)
      : stride(stride_), pad(pad_) {
    auto wt = zero_init ? Tensor<T>::zeros({cout, cin, k, k})
                        : he_init<T>({cout, cin, k, k}, cin * k * k, rng);
    w = ps.create(name + ".w", std::move(wt));
    b = ps.create(name + ".b", Tensor<T>::zeros({cout}));
  }

  Var<T> operator()(const Var<T>& x) const { return conv2d(x, w, b, stride, pad); }
};

template <typename T>
struct InstanceNormLayer {
  Var<T> gamma, beta;

  InstanceNormLayer() = default;
  InstanceNormLayer(ParamStore<T>& ps, const std::string& name, int c) {
    gamma = ps.create(name + ".gamma", Tensor<T>::full({c}, T(1)));
    beta = ps.create(name + ".beta", Tensor<T>::zeros({c}));
  }

  Var<T> operator()(const Var<T>& x) const { return instance_norm(x, gamma, beta); }
};

template <typename T>
struct LinearLayer {
  Var<T> w, b;  // w: [out, in]

  LinearLayer() = default;
  LinearLayer(ParamStore<T>& ps, const std::string& name, int in, int out, Rng& rng,
              bool zero_init = false) {
    auto wt = zero_init ? Tensor<T>::zeros({out, in}) : he_init<T>({out, in}, in, rng);
    w = ps.create(name + ".w", std::move(wt));
    b = ps.create(name + ".b", Tensor<T>::zeros({out}));
  }

  // x: [batch, in] -> [batch, out]
  Var<T> operator()(const Var<T>& x) const {
    return add_rowvec(matmul(x, transpose(w)), b);
  }
};

}  // namespace tryon::ag
