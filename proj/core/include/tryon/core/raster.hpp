#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tryon {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense H x W x C raster, channel-interleaved row-major storage.
// Pixel (0,0) is the center of the top-left pixel; x grows rightward
// (columns), y grows downward (rows).
struct Raster {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  Raster() = default;
  Raster(int h, int w, int c, float fill = 0.0f)
      : height(h), width(w), channels(c),
        data(static_cast<size_t>(h) * w * c, fill) {
    if (h <= 0 || w <= 0 || c <= 0) throw ValidationError("Raster: non-positive shape");
  }

  size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  float& at(int y, int x, int c) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  float at(int y, int x, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }

  bool same_shape(const Raster& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }

  bool all_finite() const {
    for (float v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// RGB image with values in [0,1]. Minimum side 8 px.
struct Image : Raster {
  Image() = default;
  Image(int h, int w, float fill = 0.0f) : Raster(h, w, 3, fill) {
    if (h < 8 || w < 8) throw ValidationError("Image: side below 8 px");
  }
  static Image from_raster(Raster r) {
    if (r.channels != 3) throw ValidationError("Image: expected 3 channels");
    Image im;
    static_cast<Raster&>(im) = std::move(r);
    return im;
  }
  void clamp01() {
    for (float& v : data) v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
  }
};

// Per-pixel one-hot semantic labels. Exactly one channel equals 1 per pixel.
struct ParsingMap : Raster {
  ParsingMap() = default;
  ParsingMap(int h, int w, int labels) : Raster(h, w, labels) {}

  int label_at(int y, int x) const {
    int best = 0;
    float bv = at(y, x, 0);
    for (int c = 1; c < channels; ++c)
      if (at(y, x, c) > bv) { bv = at(y, x, c); best = c; }
    return best;
  }
  void set_label(int y, int x, int label) {
    for (int c = 0; c < channels; ++c) at(y, x, c) = (c == label) ? 1.0f : 0.0f;
  }

  bool is_one_hot(float tol = 0.0f) const {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        float s = 0.0f;
        int ones = 0;
        for (int c = 0; c < channels; ++c) {
          float v = at(y, x, c);
          s += v;
          if (std::fabs(v - 1.0f) <= tol) ++ones;
        }
        if (std::fabs(s - 1.0f) > tol || ones != 1) return false;
      }
    return true;
  }

  // Re-normalizes arbitrary nonnegative channel weights back to one-hot by
  // per-pixel arg-max (used after warping).
  void re_one_hot() {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) set_label(y, x, label_at(y, x));
  }

  size_t count_label(int label) const {
    size_t n = 0;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        if (label_at(y, x) == label) ++n;
    return n;
  }
};

// Exponentially decaying distance fields around projected joints,
// one channel per joint, values in [0,1].
struct KeypointField : Raster {
  KeypointField() = default;
  KeypointField(int h, int w, int joints) : Raster(h, w, joints) {
    if (joints < 1) throw ValidationError("KeypointField: J must be >= 1");
  }
};

struct FeatureMap : Raster {
  FeatureMap() = default;
  FeatureMap(int h, int w, int c) : Raster(h, w, c) {}
};

// Dense per-pixel (dx, dy) offsets in pixel units.
struct FlowField : Raster {
  FlowField() = default;
  FlowField(int h, int w) : Raster(h, w, 2) {}

  float max_magnitude() const {
    float m = 0.0f;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        float dx = at(y, x, 0), dy = at(y, x, 1);
        m = std::max(m, std::sqrt(dx * dx + dy * dy));
      }
    return m;
  }
};

// HW x HW cosine similarities between two feature maps, row index = target
// position u, column index = source position v. Entries in [-1, 1].
struct CorrespondenceMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;

  CorrespondenceMatrix() = default;
  CorrespondenceMatrix(int r, int c)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0f) {}

  float& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  float at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

  static CorrespondenceMatrix identity(int n) {
    CorrespondenceMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0f;
    return m;
  }
};

}  // namespace tryon
