#pragma once

#include <array>

#include "tryon/core/camera.hpp"
#include "tryon/core/raster.hpp"
#include "tryon/synth/subject.hpp"

namespace tryon {

// Band-2 spherical harmonic lighting: 9 irradiance coefficients in camera
// space (the subject turns, the light stays put).
using ShCoefficients = std::array<float, 9>;

ShCoefficients default_lighting();
ShCoefficients ambient_only(float intensity);

// Irradiance for a unit normal under the given coefficients.
float sh_irradiance(const ShCoefficients& sh, const Vec3& n);

struct RenderedView {
  Image image;
  ParsingMap parsing;
  KeypointField keypoints;
  WeakPerspectiveCamera camera;
  int subject_id = -1;
  float view_angle = 0.0f;
  // Per-pixel id of the frontmost triangle + 1 (0 = background). Kept for
  // pixel-exact oracles; not part of the persisted dataset.
  Raster tri_id;
};

// Rasterizes the subject under a turntable camera at `angle` degrees with
// z-buffering, flat Lambertian shading (per-triangle albedo), an exact
// parsing map from the triangle region tags, and exponential distance
// keypoint fields exp(-d / sigma) around the projected joints.
// Throws ValidationError if the subject projects entirely outside the image.
RenderedView render_view(const SyntheticSubject& subject, float angle,
                         const ShCoefficients& lighting, int image_size,
                         float keypoint_sigma = 6.0f);

// Camera used by render_view (deterministic fit of the subject into the frame).
WeakPerspectiveCamera turntable_camera(const SyntheticSubject& subject, float angle,
                                       int image_size);

KeypointField keypoint_field(const std::array<Vec3, kNumJoints>& joints,
                             const WeakPerspectiveCamera& cam, int h, int w,
                             float sigma);

}  // namespace tryon
