#pragma once

#include "tryon/core/raster.hpp"

namespace tryon {

// Bilinear taps of one raster at a continuous pixel position (x, y).
// Positions outside the raster clamp to the border (clamp-to-edge).
// `out` must hold raster.channels values.
void bilinear_taps(const Raster& map, float x, float y, float* out);

// Resamples `map` at per-output-pixel positions. `coords` is an H x W x 2
// raster of (x, y) sampling positions in map pixel units.
// Rejects non-finite coordinates with ValidationError.
Raster bilinear_sample(const Raster& map, const Raster& coords);

// The identity sampling grid for an h x w output (coords(y,x) = (x, y)).
Raster identity_grid(int h, int w);

// identity_grid shifted per pixel by a flow field (coords = id + flow).
Raster flow_grid(const FlowField& flow);

// Bilinear resize to (out_h, out_w). Uses the half-pixel-aligned mapping
// x_src = (x_dst + 0.5) * w_in / w_out - 0.5 so that identity sizes are exact.
Raster resize_bilinear(const Raster& map, int out_h, int out_w);

// Area-style 2x downsample (average of each 2x2 block).
Raster downsample2(const Raster& map);

}  // namespace tryon
