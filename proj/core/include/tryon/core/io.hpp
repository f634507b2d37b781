#pragma once

#include <string>
#include <vector>

#include "tryon/core/mesh.hpp"
#include "tryon/core/raster.hpp"

namespace tryon {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Canonical raster persistence: little-endian float32 binary with a fixed
// 16-byte header ("TFLD", h, w, c). Round-trips bit-exactly.
void write_field(const Raster& r, const std::string& path);
Raster read_field(const std::string& path);

// 8-bit PPM (P6) preview of the first three channels, values clamped to [0,1].
// Lossy quantization; the .tfld file is the source of truth.
void write_ppm(const Raster& r, const std::string& path);
Image read_ppm(const std::string& path);

// ASCII OBJ; per-vertex colors written as the common "v x y z r g b" extension.
void write_obj(const TexturedMesh& mesh, const std::string& path);

// Binary little-endian PLY with uchar red/green/blue vertex properties.
void write_ply(const TexturedMesh& mesh, const std::string& path);
TexturedMesh read_ply(const std::string& path);

// Regular scalar volume: small text header (dims, bbox, dtype) then raw
// little-endian float32 data, x fastest.
struct OccupancyGrid {
  int nx = 0, ny = 0, nz = 0;
  Vec3 bbox_lo, bbox_hi;
  std::vector<float> values;  // size nx*ny*nz

  float& at(int x, int y, int z) {
    return values[(static_cast<size_t>(z) * ny + y) * nx + x];
  }
  float at(int x, int y, int z) const {
    return values[(static_cast<size_t>(z) * ny + y) * nx + x];
  }
  Vec3 position(float x, float y, float z) const {
    return {bbox_lo.x + (bbox_hi.x - bbox_lo.x) * x / static_cast<float>(nx - 1),
            bbox_lo.y + (bbox_hi.y - bbox_lo.y) * y / static_cast<float>(ny - 1),
            bbox_lo.z + (bbox_hi.z - bbox_lo.z) * z / static_cast<float>(nz - 1)};
  }
};

void write_volume(const OccupancyGrid& g, const std::string& path);
OccupancyGrid read_volume(const std::string& path);

}  // namespace tryon
