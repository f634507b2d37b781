#pragma once

#include <array>

#include "tryon/core/mesh.hpp"
#include "tryon/core/raster.hpp"

namespace tryon {

// Orthographic projection after uniform scaling. Depth is decoupled from
// image position: x = scale * (R X)_xy + center, z = (R X)_z + depth_offset.
struct WeakPerspectiveCamera {
  float scale = 1.0f;
  float center_x = 0.0f;
  float center_y = 0.0f;
  std::array<float, 9> rotation = {1, 0, 0, 0, 1, 0, 0, 0, 1};  // row-major
  float depth_offset = 0.0f;

  // Rotation about the world vertical (y) axis by `degrees`.
  static WeakPerspectiveCamera turntable(float degrees, float scale,
                                         float cx, float cy, float depth_offset = 0.0f);

  Vec3 rotate(const Vec3& p) const;

  // rotation orthonormal within tol and scale > 0
  bool valid(float tol = 1e-6f) const;
};

struct Projected {
  float x = 0, y = 0;  // pixels
  float z = 0;         // camera-space depth
};

Projected project(const WeakPerspectiveCamera& cam, const Vec3& X);

}  // namespace tryon
