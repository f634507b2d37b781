#include "tryon/core/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace tryon {

float Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
  const float n = norm();
  return n > 0.0f ? Vec3{x / n, y / n, z / n} : Vec3{};
}

bool TexturedMesh::indices_in_range() const {
  const auto n = static_cast<std::uint32_t>(vertices.size());
  for (const auto& t : triangles)
    if (t.a >= n || t.b >= n || t.c >= n) return false;
  return true;
}

bool TexturedMesh::is_watertight() const {
  if (triangles.empty()) return false;
  std::unordered_map<std::uint64_t, int> edge_count;
  edge_count.reserve(triangles.size() * 3);
  auto key = [](std::uint32_t u, std::uint32_t v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
  };
  for (const auto& t : triangles) {
    ++edge_count[key(t.a, t.b)];
    ++edge_count[key(t.b, t.c)];
    ++edge_count[key(t.c, t.a)];
  }
  for (const auto& [k, n] : edge_count)
    if (n != 2) return false;
  return true;
}

Vec3 TexturedMesh::face_normal(size_t t) const {
  const auto& tri = triangles[t];
  const Vec3 e1 = vertices[tri.b] - vertices[tri.a];
  const Vec3 e2 = vertices[tri.c] - vertices[tri.a];
  return e1.cross(e2).normalized();
}

float TexturedMesh::face_area(size_t t) const {
  const auto& tri = triangles[t];
  const Vec3 e1 = vertices[tri.b] - vertices[tri.a];
  const Vec3 e2 = vertices[tri.c] - vertices[tri.a];
  return 0.5f * e1.cross(e2).norm();
}

float TexturedMesh::surface_area() const {
  float a = 0.0f;
  for (size_t t = 0; t < triangles.size(); ++t) a += face_area(t);
  return a;
}

std::vector<Vec3> TexturedMesh::vertex_normals() const {
  std::vector<Vec3> normals(vertices.size());
  for (size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    const Vec3 e1 = vertices[tri.b] - vertices[tri.a];
    const Vec3 e2 = vertices[tri.c] - vertices[tri.a];
    const Vec3 an = e1.cross(e2);  // area-weighted
    normals[tri.a] += an;
    normals[tri.b] += an;
    normals[tri.c] += an;
  }
  for (auto& n : normals) n = n.normalized();
  return normals;
}

void TexturedMesh::bounding_box(Vec3& lo, Vec3& hi) const {
  constexpr float inf = std::numeric_limits<float>::infinity();
  lo = {inf, inf, inf};
  hi = {-inf, -inf, -inf};
  for (const auto& v : vertices) {
    lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y); lo.z = std::min(lo.z, v.z);
    hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y); hi.z = std::max(hi.z, v.z);
  }
}

float TexturedMesh::bbox_diagonal() const {
  Vec3 lo, hi;
  bounding_box(lo, hi);
  return (hi - lo).norm();
}

Vec3 TexturedMesh::centroid() const {
  Vec3 c{};
  if (vertices.empty()) return c;
  for (const auto& v : vertices) c += v;
  return c * (1.0f / static_cast<float>(vertices.size()));
}

void TexturedMesh::remove_degenerate_triangles(float eps) {
  std::vector<Triangle> kept;
  std::vector<int> kept_regions;
  kept.reserve(triangles.size());
  for (size_t t = 0; t < triangles.size(); ++t) {
    if (face_area(t) > eps) {
      kept.push_back(triangles[t]);
      if (!triangle_regions.empty()) kept_regions.push_back(triangle_regions[t]);
    }
  }
  triangles = std::move(kept);
  triangle_regions = std::move(kept_regions);
}

}  // namespace tryon
