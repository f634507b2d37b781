#pragma once

#include "tryon/ag/tensor.hpp"
#include "tryon/core/raster.hpp"

namespace tryon::ag {

// Raster (HWC interleaved) <-> Tensor (NCHW, N=1).
template <typename T>
Tensor<T> from_raster(const Raster& r) {
  Tensor<T> t({1, r.channels, r.height, r.width});
  for (int c = 0; c < r.channels; ++c)
    for (int y = 0; y < r.height; ++y)
      for (int x = 0; x < r.width; ++x)
        t.at(0, c, y, x) = static_cast<T>(r.at(y, x, c));
  return t;
}

template <typename T>
Raster to_raster(const Tensor<T>& t, int n = 0) {
  Raster r(t.dim(2), t.dim(3), t.dim(1));
  for (int c = 0; c < r.channels; ++c)
    for (int y = 0; y < r.height; ++y)
      for (int x = 0; x < r.width; ++x)
        r.at(y, x, c) = static_cast<float>(t.at(n, c, y, x));
  return r;
}

}  // namespace tryon::ag
