#pragma once

#include "tryon/ag/nn.hpp"

namespace tryon::ag {

// Adam over a ParamStore. Moment buffers are keyed by parameter name so the
// optimizer state can be checkpointed and restored exactly.
template <typename T>
class Adam {
 public:
  explicit Adam(ParamStore<T>& store, double lr = 1e-3, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8)
      : store_(&store), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (auto& [name, p] : store_->params()) {
      if (!p.requires_grad() || p.grad().v.empty()) continue;
      auto& m = m_[name];
      auto& v = v_[name];
      if (m.v.empty()) m = Tensor<double>::zeros(p.value().shape);
      if (v.v.empty()) v = Tensor<double>::zeros(p.value().shape);
      auto& val = p.value();
      const auto& g = p.grad();
      for (size_t i = 0; i < val.v.size(); ++i) {
        const double gi = static_cast<double>(g.v[i]);
        m.v[i] = beta1_ * m.v[i] + (1.0 - beta1_) * gi;
        v.v[i] = beta2_ * v.v[i] + (1.0 - beta2_) * gi * gi;
        const double mhat = m.v[i] / bc1;
        const double vhat = v.v[i] / bc2;
        val.v[i] -= static_cast<T>(lr_ * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

  void zero_grad() { store_->zero_grad(); }

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }
  std::int64_t step_count() const { return t_; }

  // Optimizer state round-trips through checkpoints.
  struct State {
    std::int64_t t = 0;
    std::map<std::string, Tensor<double>> m, v;
  };
  State state() const { return {t_, m_, v_}; }
  void load_state(const State& s) {
    t_ = s.t;
    m_ = s.m;
    v_ = s.v;
  }

 private:
  ParamStore<T>* store_;
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::map<std::string, Tensor<double>> m_, v_;
};

}  // namespace tryon::ag
