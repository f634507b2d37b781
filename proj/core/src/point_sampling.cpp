#include "tryon/recon/point_sampling.hpp"

#include <algorithm>
#include <cmath>

#include "tryon/core/raster.hpp"
#include "tryon/recon/mesh_query.hpp"

namespace tryon {

namespace {

// Area-weighted triangle CDF; shared by both samplers.
std::vector<double> area_cdf(const TexturedMesh& mesh) {
  std::vector<double> cdf(mesh.triangles.size());
  double acc = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    acc += mesh.face_area(t);
    cdf[t] = acc;
  }
  return cdf;
}

size_t pick_triangle(const std::vector<double>& cdf, Rng& rng) {
  const double r = rng.uniform(0.0, cdf.back());
  const size_t t =
      static_cast<size_t>(std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
  return std::min(t, cdf.size() - 1);
}

void uniform_barycentric(Rng& rng, float& u, float& v) {
  u = static_cast<float>(rng.uniform());
  v = static_cast<float>(rng.uniform());
  if (u + v > 1.0f) {
    u = 1.0f - u;
    v = 1.0f - v;
  }
}

}  // namespace

bool point_in_mesh(const TexturedMesh& mesh, const Vec3& p) {
  return MeshQuery(mesh).inside(p);
}

std::vector<OccupancySample> sample_occupancy_points(const TexturedMesh& mesh,
                                                     int n_uniform, int n_surface,
                                                     float sigma, Rng& rng) {
  if (!mesh.is_watertight())
    throw ValidationError("sample_occupancy_points: mesh is not watertight");
  const MeshQuery query(mesh);
  Vec3 lo, hi;
  mesh.bounding_box(lo, hi);
  const Vec3 pad = (hi - lo) * 0.05f;
  lo = lo - pad;
  hi = hi + pad;

  std::vector<OccupancySample> out;
  out.reserve(static_cast<size_t>(n_uniform + n_surface));
  for (int i = 0; i < n_uniform; ++i) {
    const Vec3 p{static_cast<float>(rng.uniform(lo.x, hi.x)),
                 static_cast<float>(rng.uniform(lo.y, hi.y)),
                 static_cast<float>(rng.uniform(lo.z, hi.z))};
    out.push_back({p, query.inside(p) ? 1.0f : 0.0f});
  }

  const auto cdf = area_cdf(mesh);
  for (int i = 0; i < n_surface; ++i) {
    const auto& tri = mesh.triangles[pick_triangle(cdf, rng)];
    float u, v;
    uniform_barycentric(rng, u, v);
    Vec3 p = mesh.vertices[tri.a] * (1.0f - u - v) + mesh.vertices[tri.b] * u +
             mesh.vertices[tri.c] * v;
    p.x += static_cast<float>(rng.normal()) * sigma;
    p.y += static_cast<float>(rng.normal()) * sigma;
    p.z += static_cast<float>(rng.normal()) * sigma;
    out.push_back({p, query.inside(p) ? 1.0f : 0.0f});
  }
  return out;
}

std::vector<ColorSample> sample_color_points(const TexturedMesh& mesh, int n,
                                             float sigma_normal, Rng& rng) {
  if (!mesh.has_colors())
    throw ValidationError("sample_color_points: mesh has no vertex colors");
  const auto normals = mesh.vertex_normals();
  const auto cdf = area_cdf(mesh);
  std::vector<ColorSample> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& tri = mesh.triangles[pick_triangle(cdf, rng)];
    float u, v;
    uniform_barycentric(rng, u, v);
    const float w = 1.0f - u - v;
    const Vec3 p = mesh.vertices[tri.a] * w + mesh.vertices[tri.b] * u +
                   mesh.vertices[tri.c] * v;
    const Vec3 nrm =
        (normals[tri.a] * w + normals[tri.b] * u + normals[tri.c] * v).normalized();
    const float off = static_cast<float>(rng.normal()) * sigma_normal;
    const Vec3 rgb = mesh.vertex_colors[tri.a] * w + mesh.vertex_colors[tri.b] * u +
                     mesh.vertex_colors[tri.c] * v;
    out.push_back({p + nrm * off, rgb});
  }
  return out;
}

OccupancyGrid voxelize(const TexturedMesh& mesh, int resolution, float margin) {
  const MeshQuery query(mesh);
  Vec3 lo, hi;
  mesh.bounding_box(lo, hi);
  const Vec3 pad = (hi - lo) * margin;
  OccupancyGrid g;
  g.nx = g.ny = g.nz = resolution;
  g.bbox_lo = lo - pad;
  g.bbox_hi = hi + pad;
  g.values.assign(static_cast<size_t>(resolution) * resolution * resolution, 0.0f);
  for (int z = 0; z < resolution; ++z)
    for (int y = 0; y < resolution; ++y)
      for (int x = 0; x < resolution; ++x) {
        const Vec3 p = g.position(static_cast<float>(x), static_cast<float>(y),
                                  static_cast<float>(z));
        g.at(x, y, z) = query.inside(p) ? 1.0f : 0.0f;
      }
  return g;
}

double voxel_iou(const OccupancyGrid& a, const OccupancyGrid& b, float level) {
  if (a.values.size() != b.values.size())
    throw ValidationError("voxel_iou: grid size mismatch");
  size_t inter = 0, uni = 0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const bool ia = a.values[i] > level, ib = b.values[i] > level;
    inter += ia && ib;
    uni += ia || ib;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

float distance_to_surface(const TexturedMesh& mesh, const Vec3& p) {
  return MeshQuery(mesh).nearest(p).distance;
}

}  // namespace tryon
