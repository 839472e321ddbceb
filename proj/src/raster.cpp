#include "graysl/raster.hpp"

#include <algorithm>
#include <cmath>

namespace graysl {

std::size_t count_valid(const Mask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.values().begin(), mask.values().end(), [](std::uint8_t f) { return f != 0; }));
}

Mask finite_mask(const RasterF& r) {
  Mask m(r.width(), r.height(), 0);
  for (std::size_t i = 0; i < r.size(); ++i) m[i] = std::isfinite(r[i]) ? 1 : 0;
  return m;
}

Mask mask_and(const Mask& a, const Mask& b) {
  require_same_shape(a, b, "mask_and");
  Mask m(a.width(), a.height(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = (a[i] != 0 && b[i] != 0) ? 1 : 0;
  return m;
}

}  // namespace graysl
