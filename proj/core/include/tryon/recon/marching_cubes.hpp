#pragma once

#include "tryon/core/io.hpp"
#include "tryon/core/mesh.hpp"

namespace tryon {

extern const int kMcEdgeTable[256];
extern const int kMcTriTable[256][16];

// Extracts the `level` iso-surface of a regular scalar grid as a triangle
// mesh (classic 256-case tables, linear interpolation of crossing positions,
// shared vertices welded on grid edges). Triangles wind so that normals
// point toward lower grid values; for occupancy grids (inside = 1) that is
// outward. A level outside the grid's value range yields an empty mesh and
// sets `*warned` when provided.
TexturedMesh marching_cubes(const OccupancyGrid& grid, float level = 0.5f,
                            bool* warned = nullptr);

}  // namespace tryon
