#include <doctest.h>

#include <cmath>

#include "tryon/core/rng.hpp"
#include "tryon/recon/marching_cubes.hpp"
#include "tryon/recon/mesh_query.hpp"
#include "tryon/recon/point_sampling.hpp"

using namespace tryon;

namespace {

// Binary occupancy of a sphere of radius r centered at the origin.
OccupancyGrid sphere_grid(int n, float r, float half_extent = 0.5f) {
  OccupancyGrid g;
  g.nx = g.ny = g.nz = n;
  g.bbox_lo = {-half_extent, -half_extent, -half_extent};
  g.bbox_hi = {half_extent, half_extent, half_extent};
  g.values.resize(static_cast<size_t>(n) * n * n);
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const Vec3 p = g.position(static_cast<float>(x), static_cast<float>(y),
                                  static_cast<float>(z));
        g.at(x, y, z) = p.norm() < r ? 1.0f : 0.0f;
      }
  return g;
}

}  // namespace

TEST_CASE("marching cubes on an analytic sphere places vertices on the radius") {
  const OccupancyGrid g = sphere_grid(64, 0.3f);
  const TexturedMesh mesh = marching_cubes(g, 0.5f);
  REQUIRE(mesh.vertices.size() > 100);
  const float tol = 2.0f / 64.0f;
  for (const auto& v : mesh.vertices) CHECK(std::fabs(v.norm() - 0.3f) <= tol);
  CHECK(mesh.is_watertight());
  CHECK(mesh.indices_in_range());
}

TEST_CASE("marching cubes orientation: sphere normals point outward") {
  const OccupancyGrid g = sphere_grid(32, 0.3f);
  const TexturedMesh mesh = marching_cubes(g, 0.5f);
  size_t outward = 0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3 c = (mesh.vertices[tri.a] + mesh.vertices[tri.b] + mesh.vertices[tri.c]) *
                   (1.0f / 3.0f);
    if (mesh.face_normal(t).dot(c) > 0.0f) ++outward;
  }
  CHECK(outward == mesh.triangles.size());
}

TEST_CASE("marching cubes of a constant grid is empty, with a warning") {
  OccupancyGrid g;
  g.nx = g.ny = g.nz = 8;
  g.bbox_lo = {0, 0, 0};
  g.bbox_hi = {1, 1, 1};
  g.values.assign(512, 0.25f);
  bool warned = false;
  const TexturedMesh mesh = marching_cubes(g, 0.5f, &warned);
  CHECK(mesh.vertices.empty());
  CHECK(warned);
}

TEST_CASE("marching cubes is invariant under monotone remaps fixing the level") {
  OccupancyGrid g = sphere_grid(24, 0.33f);
  // Smooth field variant so the remap actually moves interior values.
  for (int z = 0; z < 24; ++z)
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 24; ++x) {
        const Vec3 p = g.position(static_cast<float>(x), static_cast<float>(y),
                                  static_cast<float>(z));
        g.at(x, y, z) = 1.0f / (1.0f + std::exp((p.norm() - 0.33f) * 40.0f));
      }
  const TexturedMesh base = marching_cubes(g, 0.5f);

  OccupancyGrid remapped = g;
  for (auto& v : remapped.values) {
    // Monotone, fixes 0.5: piecewise-linear squash toward the extremes.
    v = v < 0.5f ? 0.5f * std::pow(2.0f * v, 3.0f)
                 : 1.0f - 0.5f * std::pow(2.0f * (1.0f - v), 3.0f);
  }
  const TexturedMesh other = marching_cubes(remapped, 0.5f);
  REQUIRE(base.vertices.size() == other.vertices.size());
  float max_shift = 0.0f;
  for (size_t i = 0; i < base.vertices.size(); ++i)
    max_shift = std::max(max_shift, (base.vertices[i] - other.vertices[i]).norm());
  // Linear interpolation of a remapped field moves crossings slightly;
  // the topology and vertex identity must be unchanged and positions close.
  CHECK(max_shift < 0.02f);
  REQUIRE(base.triangles.size() == other.triangles.size());
  for (size_t i = 0; i < base.triangles.size(); ++i) {
    CHECK(base.triangles[i].a == other.triangles[i].a);
    CHECK(base.triangles[i].b == other.triangles[i].b);
    CHECK(base.triangles[i].c == other.triangles[i].c);
  }
}

TEST_CASE("binary-grid marching cubes is exactly invariant under monotone remaps") {
  const OccupancyGrid g = sphere_grid(24, 0.33f);
  OccupancyGrid remapped = g;
  for (auto& v : remapped.values) v = v > 0.5f ? 0.93f : 0.07f;
  const TexturedMesh base = marching_cubes(g, 0.5f);
  const TexturedMesh other = marching_cubes(remapped, 0.5f);
  REQUIRE(base.vertices.size() == other.vertices.size());
  for (size_t i = 0; i < base.vertices.size(); ++i)
    CHECK((base.vertices[i] - other.vertices[i]).norm() < 1e-6f);
}

TEST_CASE("point_in_mesh agrees with the analytic sphere test on 10k points") {
  const OccupancyGrid g = sphere_grid(64, 0.3f);
  const TexturedMesh mesh = marching_cubes(g, 0.5f);
  const MeshQuery query(mesh);
  Rng rng(123);
  const float guard = 2.0f / 64.0f;  // MC surface deviates up to a cell from r
  int checked = 0, agree = 0;
  while (checked < 10000) {
    const Vec3 p{static_cast<float>(rng.uniform(-0.5, 0.5)),
                 static_cast<float>(rng.uniform(-0.5, 0.5)),
                 static_cast<float>(rng.uniform(-0.5, 0.5))};
    if (std::fabs(p.norm() - 0.3f) < guard) continue;  // skip the ambiguous shell
    ++checked;
    if (query.inside(p) == (p.norm() < 0.3f)) ++agree;
  }
  CHECK(agree == checked);
}

TEST_CASE("point_in_mesh basics: centroid inside, far point outside") {
  const TexturedMesh mesh = marching_cubes(sphere_grid(16, 0.35f), 0.5f);
  CHECK(point_in_mesh(mesh, mesh.centroid()));
  CHECK_FALSE(point_in_mesh(mesh, {5.0f, 5.0f, 5.0f}));
}

TEST_CASE("occupancy sampling labels match a coordinate-box oracle on a cube") {
  // Analytic axis-aligned cube [-0.25, 0.25]^3 via binary occupancy.
  OccupancyGrid g;
  const int n = 48;
  g.nx = g.ny = g.nz = n;
  g.bbox_lo = {-0.5f, -0.5f, -0.5f};
  g.bbox_hi = {0.5f, 0.5f, 0.5f};
  g.values.resize(static_cast<size_t>(n) * n * n);
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const Vec3 p = g.position(static_cast<float>(x), static_cast<float>(y),
                                  static_cast<float>(z));
        const bool in = std::fabs(p.x) < 0.25f && std::fabs(p.y) < 0.25f &&
                        std::fabs(p.z) < 0.25f;
        g.at(x, y, z) = in ? 1.0f : 0.0f;
      }
  const TexturedMesh cube = marching_cubes(g, 0.5f);
  REQUIRE(cube.is_watertight());

  Rng rng(7);
  const auto samples = sample_occupancy_points(cube, 2000, 0, 0.0f, rng);
  Vec3 lo, hi;
  cube.bounding_box(lo, hi);
  int mismatches = 0;
  for (const auto& s : samples) {
    const bool in_box = s.point.x > lo.x && s.point.x < hi.x && s.point.y > lo.y &&
                        s.point.y < hi.y && s.point.z > lo.z && s.point.z < hi.z;
    const bool want = in_box;  // the extracted cube IS its bounding box
    if ((s.occupancy > 0.5f) != want) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("sigma-perturbed surface points split roughly 50/50 on a sphere") {
  const TexturedMesh sphere = marching_cubes(sphere_grid(48, 0.3f), 0.5f);
  Rng rng(11);
  const auto samples = sample_occupancy_points(sphere, 0, 4000, 0.02f, rng);
  int inside = 0;
  for (const auto& s : samples) inside += s.occupancy > 0.5f;
  const double frac = static_cast<double>(inside) / samples.size();
  CHECK(frac > 0.4);
  CHECK(frac < 0.6);
}

TEST_CASE("uniform points far outside the mesh are labeled 0") {
  const TexturedMesh sphere = marching_cubes(sphere_grid(24, 0.15f), 0.5f);
  const MeshQuery query(sphere);
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    Vec3 p{static_cast<float>(rng.uniform(1.0, 3.0)),
           static_cast<float>(rng.uniform(1.0, 3.0)),
           static_cast<float>(rng.uniform(1.0, 3.0))};
    CHECK_FALSE(query.inside(p));
  }
}

TEST_CASE("color samples: sigma=0 points lie on the surface, colors interpolate") {
  TexturedMesh sphere = marching_cubes(sphere_grid(32, 0.3f), 0.5f);
  sphere.vertex_colors.assign(sphere.vertices.size(), {0.2f, 0.6f, 0.9f});
  Rng rng(17);
  const auto on_surface = sample_color_points(sphere, 200, 0.0f, rng);
  const MeshQuery query(sphere);
  for (const auto& s : on_surface) {
    CHECK(query.nearest(s.point).distance < 1e-6f);
    CHECK(s.rgb.x == doctest::Approx(0.2f));
    CHECK(s.rgb.z == doctest::Approx(0.9f));
  }
}

TEST_CASE("color sample offsets follow a half-normal distance distribution") {
  TexturedMesh sphere = marching_cubes(sphere_grid(48, 0.3f), 0.5f);
  sphere.vertex_colors.assign(sphere.vertices.size(), {1.0f, 1.0f, 1.0f});
  Rng rng(19);
  const float sigma = 0.01f;
  const auto samples = sample_color_points(sphere, 1500, sigma, rng);
  const MeshQuery query(sphere);
  std::vector<double> d;
  d.reserve(samples.size());
  for (const auto& s : samples) d.push_back(query.nearest(s.point).distance);
  std::sort(d.begin(), d.end());
  // KS test against half-normal CDF F(x) = erf(x / (sigma*sqrt(2))), 5% level.
  double ks = 0.0;
  for (size_t i = 0; i < d.size(); ++i) {
    const double f = std::erf(d[i] / (sigma * std::sqrt(2.0)));
    const double emp_hi = static_cast<double>(i + 1) / d.size();
    const double emp_lo = static_cast<double>(i) / d.size();
    ks = std::max({ks, std::fabs(emp_hi - f), std::fabs(f - emp_lo)});
  }
  const double crit = 1.36 / std::sqrt(static_cast<double>(d.size()));
  CHECK(ks < crit);
}

TEST_CASE("voxel IoU of a mesh against itself is 1") {
  const TexturedMesh sphere = marching_cubes(sphere_grid(24, 0.3f), 0.5f);
  const OccupancyGrid a = voxelize(sphere, 32);
  CHECK(voxel_iou(a, a) == doctest::Approx(1.0));
}
