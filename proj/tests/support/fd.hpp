#pragma once

#include <functional>

#include "tryon/ag/var.hpp"

namespace tryon::testing {

// Central finite differences of a scalar-valued rebuild function with
// respect to one leaf tensor. The function must rebuild the graph from
// scratch on each call (the tape is single-use).
inline ag::Tensor<double> fd_gradient(
    ag::Tensor<double> x, const std::function<double(const ag::Tensor<double>&)>& f,
    double h = 1e-5) {
  ag::Tensor<double> g = ag::Tensor<double>::zeros(x.shape);
  for (size_t i = 0; i < x.v.size(); ++i) {
    const double x0 = x.v[i];
    x.v[i] = x0 + h;
    const double fp = f(x);
    x.v[i] = x0 - h;
    const double fm = f(x);
    x.v[i] = x0;
    g.v[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline double max_rel_error(const ag::Tensor<double>& analytic,
                            const ag::Tensor<double>& numeric,
                            double floor = 1e-6) {
  double worst = 0.0;
  for (size_t i = 0; i < analytic.v.size(); ++i) {
    const double denom = std::max({std::fabs(analytic.v[i]), std::fabs(numeric.v[i]), floor});
    worst = std::max(worst, std::fabs(analytic.v[i] - numeric.v[i]) / denom);
  }
  return worst;
}

}  // namespace tryon::testing
