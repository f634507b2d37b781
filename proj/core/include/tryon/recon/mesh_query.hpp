#pragma once

#include <vector>

#include "tryon/core/mesh.hpp"

namespace tryon {

// Axis-aligned-box BVH over mesh triangles for inside/outside parity tests
// and closest-surface queries. Build once, query many times; all queries are
// const and safe to run concurrently.
class MeshQuery {
 public:
  explicit MeshQuery(const TexturedMesh& mesh);

  // Ray-parity with majority vote over three fixed jittered directions.
  bool inside(const Vec3& p) const;

  struct Nearest {
    float distance = 0.0f;
    std::uint32_t triangle = 0;
    Vec3 point;  // closest point on the surface
  };
  Nearest nearest(const Vec3& p) const;

  const TexturedMesh& mesh() const { return *mesh_; }

 private:
  struct BvhNode {
    Vec3 lo, hi;
    int left = -1, right = -1;   // children, or
    int first = 0, count = 0;    // leaf triangle range
  };

  int build(int first, int count, int depth);
  int parity(const Vec3& origin, const Vec3& dir) const;

  const TexturedMesh* mesh_;
  std::vector<BvhNode> nodes_;
  std::vector<std::uint32_t> tri_order_;
  std::vector<Vec3> centroids_;
};

}  // namespace tryon
