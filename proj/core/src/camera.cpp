#include "tryon/core/camera.hpp"

#include <cmath>

namespace tryon {

WeakPerspectiveCamera WeakPerspectiveCamera::turntable(float degrees, float scale,
                                                       float cx, float cy,
                                                       float depth_offset) {
  const float rad = degrees * 3.14159265358979323846f / 180.0f;
  const float c = std::cos(rad), s = std::sin(rad);
  WeakPerspectiveCamera cam;
  cam.scale = scale;
  cam.center_x = cx;
  cam.center_y = cy;
  cam.depth_offset = depth_offset;
  // Rotation about y; camera looks along +z after rotation.
  cam.rotation = {c, 0, s, 0, 1, 0, -s, 0, c};
  return cam;
}

Vec3 WeakPerspectiveCamera::rotate(const Vec3& p) const {
  const auto& r = rotation;
  return {r[0] * p.x + r[1] * p.y + r[2] * p.z,
          r[3] * p.x + r[4] * p.y + r[5] * p.z,
          r[6] * p.x + r[7] * p.y + r[8] * p.z};
}

bool WeakPerspectiveCamera::valid(float tol) const {
  if (!(scale > 0.0f)) return false;
  const auto& r = rotation;
  // R R^T == I within tol
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      float dot = 0.0f;
      for (int k = 0; k < 3; ++k) dot += r[i * 3 + k] * r[j * 3 + k];
      const float want = (i == j) ? 1.0f : 0.0f;
      if (std::fabs(dot - want) > tol) return false;
    }
  return true;
}

Projected project(const WeakPerspectiveCamera& cam, const Vec3& X) {
  const Vec3 p = cam.rotate(X);
  return {cam.scale * p.x + cam.center_x, cam.scale * p.y + cam.center_y,
          p.z + cam.depth_offset};
}

}  // namespace tryon
