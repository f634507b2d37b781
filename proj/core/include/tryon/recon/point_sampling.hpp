#pragma once

#include <optional>
#include <vector>

#include "tryon/core/io.hpp"
#include "tryon/core/mesh.hpp"
#include "tryon/core/rng.hpp"

namespace tryon {

struct OccupancySample {
  Vec3 point;
  float occupancy = 0.0f;  // 0 or 1
};

struct ColorSample {
  Vec3 point;
  Vec3 rgb;
};

// Ray-parity inside test for watertight meshes: parity of ray-triangle
// crossings along a fixed jittered direction, majority vote over three
// directions so a ray grazing an edge cannot flip the answer.
bool point_in_mesh(const TexturedMesh& mesh, const Vec3& p);

// Uniform points in the (slightly expanded) bounding box plus surface points
// perturbed by isotropic Gaussian noise, each labeled by the parity test.
// Throws ValidationError if the mesh is not watertight (parity undefined).
std::vector<OccupancySample> sample_occupancy_points(const TexturedMesh& mesh,
                                                     int n_uniform, int n_surface,
                                                     float sigma, Rng& rng);

// Area-weighted barycentric surface samples offset along the interpolated
// vertex normal by N(0, sigma^2); target color interpolated from vertex colors.
std::vector<ColorSample> sample_color_points(const TexturedMesh& mesh, int n,
                                             float sigma_normal, Rng& rng);

// Parity-filled regular grid over the mesh bounding box (expanded by
// `margin` of the diagonal). Doubles as ground truth for reconstruction IoU.
OccupancyGrid voxelize(const TexturedMesh& mesh, int resolution, float margin = 0.05f);

double voxel_iou(const OccupancyGrid& a, const OccupancyGrid& b, float level = 0.5f);

// Distance from a point to the closest point on the mesh surface.
float distance_to_surface(const TexturedMesh& mesh, const Vec3& p);

}  // namespace tryon
