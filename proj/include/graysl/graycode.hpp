#pragma once

#include <cstddef>
#include <vector>

#include "graysl/patterns.hpp"
#include "graysl/raster.hpp"

namespace graysl {

using BitGrid = Grid<std::uint8_t>;

/// Per-pixel 1-based fringe order; 0 where invalid.
struct OrderMap {
  IntGrid k;
  Mask valid;
  int n_bits = 0;
  std::size_t out_of_table = 0;  // valid pixels whose code had no order
};

/// bit = frame > A at valid pixels (ties and invalid pixels give 0).
BitGrid binarize(const RasterF& gray_frame, const RasterF& background, const Mask& valid);

/// V = sum_i bit_i * 2^(N-i), bits MSB first.
IntGrid decode_V(const std::vector<BitGrid>& bits);

OrderMap order_map(const IntGrid& v, const CodewordTable& table, const Mask& valid);

/// binarize + decode_V + order_map over one set of Gray frames.
OrderMap decode_orders(const std::vector<const RasterF*>& gray_frames, const RasterF& background,
                       const Mask& valid, const CodewordTable& table);

}  // namespace graysl
