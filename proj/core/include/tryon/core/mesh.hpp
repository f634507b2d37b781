#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace tryon {

struct Vec3 {
  float x = 0, y = 0, z = 0;

  Vec3() = default;
  Vec3(float x_, float y_, float z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(float s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

  float dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  float norm() const;
  Vec3 normalized() const;
};

struct Triangle {
  std::uint32_t a = 0, b = 0, c = 0;
};

// Indexed triangle mesh with optional per-vertex RGB (in [0,1]) and
// optional per-triangle region tags (semantic label ids).
struct TexturedMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<Vec3> vertex_colors;      // empty or size == vertices.size()
  std::vector<int> triangle_regions;    // empty or size == triangles.size()

  bool has_colors() const { return !vertex_colors.empty(); }
  bool indices_in_range() const;

  // Every edge shared by exactly two triangles (closed 2-manifold soup).
  bool is_watertight() const;

  Vec3 face_normal(size_t t) const;
  float face_area(size_t t) const;
  float surface_area() const;

  // Area-weighted vertex normals.
  std::vector<Vec3> vertex_normals() const;

  void bounding_box(Vec3& lo, Vec3& hi) const;
  float bbox_diagonal() const;
  Vec3 centroid() const;

  // Drops zero-area triangles (area below eps times the mean face area).
  void remove_degenerate_triangles(float eps = 1e-12f);
};

}  // namespace tryon
