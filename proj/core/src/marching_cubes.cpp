#include "tryon/recon/marching_cubes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace tryon {

namespace {

// Corner offsets matching the table convention.
constexpr int kCorner[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1},
    {0, 1, 0}, {1, 1, 0}, {1, 1, 1}, {0, 1, 1},
};

// Edge -> (corner, corner).
constexpr int kEdge[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
    {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

struct EdgeKeyHash {
  size_t operator()(std::uint64_t k) const { return std::hash<std::uint64_t>()(k); }
};

}  // namespace

TexturedMesh marching_cubes(const OccupancyGrid& grid, float level, bool* warned) {
  if (grid.nx < 2 || grid.ny < 2 || grid.nz < 2 || grid.values.empty())
    throw std::invalid_argument("marching_cubes: grid too small");
  if (warned) *warned = false;

  const auto [mn, mx] =
      std::minmax_element(grid.values.begin(), grid.values.end());
  TexturedMesh mesh;
  if (!(level > *mn && level < *mx)) {
    if (warned) *warned = true;  // constant grid or level outside value range
    return mesh;
  }

  // Weld vertices on shared grid edges: key = origin grid vertex * 3 + axis.
  std::unordered_map<std::uint64_t, std::uint32_t, EdgeKeyHash> edge_vertex;
  edge_vertex.reserve(grid.values.size() / 4);

  auto grid_index = [&](int x, int y, int z) {
    return (static_cast<std::uint64_t>(z) * grid.ny + y) * grid.nx + x;
  };

  auto edge_key = [&](int x0, int y0, int z0, int x1, int y1, int z1) {
    int axis = 0;
    if (y1 != y0) axis = 1;
    if (z1 != z0) axis = 2;
    if (x1 < x0 || y1 < y0 || z1 < z0) {
      std::swap(x0, x1); std::swap(y0, y1); std::swap(z0, z1);
    }
    return grid_index(x0, y0, z0) * 3 + static_cast<std::uint64_t>(axis);
  };

  auto vertex_on_edge = [&](int cx, int cy, int cz, int e) -> std::uint32_t {
    const int* ca = kCorner[kEdge[e][0]];
    const int* cb = kCorner[kEdge[e][1]];
    const int ax = cx + ca[0], ay = cy + ca[1], az = cz + ca[2];
    const int bx = cx + cb[0], by = cy + cb[1], bz = cz + cb[2];
    const std::uint64_t key = edge_key(ax, ay, az, bx, by, bz);
    auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;

    const float va = grid.at(ax, ay, az);
    const float vb = grid.at(bx, by, bz);
    float t = (level - va) / (vb - va);  // endpoints straddle the level
    t = std::min(std::max(t, 0.0f), 1.0f);
    const Vec3 pa = grid.position(static_cast<float>(ax), static_cast<float>(ay),
                                  static_cast<float>(az));
    const Vec3 pb = grid.position(static_cast<float>(bx), static_cast<float>(by),
                                  static_cast<float>(bz));
    const auto id = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back(pa + (pb - pa) * t);
    edge_vertex.emplace(key, id);
    return id;
  };

  for (int z = 0; z + 1 < grid.nz; ++z)
    for (int y = 0; y + 1 < grid.ny; ++y)
      for (int x = 0; x + 1 < grid.nx; ++x) {
        int cube_index = 0;
        for (int c = 0; c < 8; ++c) {
          const float v = grid.at(x + kCorner[c][0], y + kCorner[c][1], z + kCorner[c][2]);
          if (v < level) cube_index |= 1 << c;
        }
        if (kMcEdgeTable[cube_index] == 0) continue;

        std::uint32_t ev[12];
        for (int e = 0; e < 12; ++e)
          if (kMcEdgeTable[cube_index] & (1 << e)) ev[e] = vertex_on_edge(x, y, z, e);

        for (int t = 0; kMcTriTable[cube_index][t] != -1; t += 3) {
          // Swapped winding: the tables wind toward higher values, we want
          // outward normals on occupancy grids (inside = 1).
          Triangle tri{ev[kMcTriTable[cube_index][t]],
                       ev[kMcTriTable[cube_index][t + 2]],
                       ev[kMcTriTable[cube_index][t + 1]]};
          if (tri.a == tri.b || tri.b == tri.c || tri.c == tri.a) continue;
          mesh.triangles.push_back(tri);
        }
      }

  mesh.remove_degenerate_triangles();
  return mesh;
}

}  // namespace tryon
