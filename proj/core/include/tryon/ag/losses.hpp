#pragma once

#include "tryon/ag/ops.hpp"

namespace tryon::ag {

template <typename T>
Var<T> mse(const Var<T>& a, const Var<T>& b) {
  return mean(square(sub(a, b)));
}

template <typename T>
Var<T> l1(const Var<T>& a, const Var<T>& b) {
  return mean(abs_(sub(a, b)));
}

template <typename T>
Var<T> sum_squares(const Var<T>& a) {
  return sum(square(a));
}

// Euclidean norm of the flattened difference. The gradient uses a floored
// denominator so the non-differentiable point at zero stays finite.
template <typename T>
Var<T> l2_norm_diff(const Var<T>& a, const Var<T>& b) {
  return sqrt_(sum_squares(sub(a, b)), T(0));
}

// -log sigmoid(x) resp. -log(1 - sigmoid(x)), elementwise-mean, stable form.
template <typename T>
Var<T> bce_logits_as_real(const Var<T>& logits) {
  return mean(softplus(neg(logits)));
}

template <typename T>
Var<T> bce_logits_as_fake(const Var<T>& logits) {
  return mean(softplus(logits));
}

}  // namespace tryon::ag
