#include "tryon/core/bilinear.hpp"

#include <algorithm>
#include <cmath>

namespace tryon {

void bilinear_taps(const Raster& map, float x, float y, float* out) {
  const int w = map.width, h = map.height, ch = map.channels;
  // Clamp-to-edge: positions outside the raster read the nearest border pixel.
  x = std::min(std::max(x, 0.0f), static_cast<float>(w - 1));
  y = std::min(std::max(y, 0.0f), static_cast<float>(h - 1));
  const int x0 = std::min(static_cast<int>(x), w - 1);
  const int y0 = std::min(static_cast<int>(y), h - 1);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const float fx = x - static_cast<float>(x0);
  const float fy = y - static_cast<float>(y0);
  const float w00 = (1.0f - fx) * (1.0f - fy);
  const float w01 = fx * (1.0f - fy);
  const float w10 = (1.0f - fx) * fy;
  const float w11 = fx * fy;
  const float* p00 = &map.data[(static_cast<size_t>(y0) * w + x0) * ch];
  const float* p01 = &map.data[(static_cast<size_t>(y0) * w + x1) * ch];
  const float* p10 = &map.data[(static_cast<size_t>(y1) * w + x0) * ch];
  const float* p11 = &map.data[(static_cast<size_t>(y1) * w + x1) * ch];
  for (int c = 0; c < ch; ++c)
    out[c] = w00 * p00[c] + w01 * p01[c] + w10 * p10[c] + w11 * p11[c];
}

Raster bilinear_sample(const Raster& map, const Raster& coords) {
  if (map.empty()) throw ValidationError("bilinear_sample: empty map");
  if (coords.channels != 2)
    throw ValidationError("bilinear_sample: coords must have 2 channels (x, y)");
  if (!coords.all_finite())
    throw ValidationError("bilinear_sample: non-finite coordinates");
  Raster out(coords.height, coords.width, map.channels);
  for (int y = 0; y < coords.height; ++y)
    for (int x = 0; x < coords.width; ++x)
      bilinear_taps(map, coords.at(y, x, 0), coords.at(y, x, 1),
                    &out.at(y, x, 0));
  return out;
}

Raster identity_grid(int h, int w) {
  Raster g(h, w, 2);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      g.at(y, x, 0) = static_cast<float>(x);
      g.at(y, x, 1) = static_cast<float>(y);
    }
  return g;
}

Raster flow_grid(const FlowField& flow) {
  Raster g = identity_grid(flow.height, flow.width);
  for (int y = 0; y < flow.height; ++y)
    for (int x = 0; x < flow.width; ++x) {
      g.at(y, x, 0) += flow.at(y, x, 0);
      g.at(y, x, 1) += flow.at(y, x, 1);
    }
  return g;
}

Raster resize_bilinear(const Raster& map, int out_h, int out_w) {
  if (out_h == map.height && out_w == map.width) return map;
  Raster coords(out_h, out_w, 2);
  const float sx = static_cast<float>(map.width) / static_cast<float>(out_w);
  const float sy = static_cast<float>(map.height) / static_cast<float>(out_h);
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x) {
      coords.at(y, x, 0) = (static_cast<float>(x) + 0.5f) * sx - 0.5f;
      coords.at(y, x, 1) = (static_cast<float>(y) + 0.5f) * sy - 0.5f;
    }
  return bilinear_sample(map, coords);
}

Raster downsample2(const Raster& map) {
  const int oh = map.height / 2, ow = map.width / 2;
  Raster out(oh, ow, map.channels);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x)
      for (int c = 0; c < map.channels; ++c)
        out.at(y, x, c) = 0.25f * (map.at(2 * y, 2 * x, c) + map.at(2 * y, 2 * x + 1, c) +
                                   map.at(2 * y + 1, 2 * x, c) + map.at(2 * y + 1, 2 * x + 1, c));
  return out;
}

}  // namespace tryon
