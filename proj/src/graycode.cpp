#include "graysl/graycode.hpp"

#include <cmath>

#include "graysl/kernels.hpp"

namespace graysl {

BitGrid binarize(const RasterF& gray_frame, const RasterF& background, const Mask& valid) {
  require_same_shape(gray_frame, background, "binarize");
  require_same_shape(gray_frame, valid, "binarize");
  BitGrid bits(gray_frame.width(), gray_frame.height());
  kernels::active().greater_than(gray_frame.data(), background.data(), bits.data(), bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = valid[i] ? bits[i] : 0;
  return bits;
}

IntGrid decode_V(const std::vector<BitGrid>& bits) {
  if (bits.empty()) throw RangeError("decode_V needs at least one bit grid");
  IntGrid v(bits[0].width(), bits[0].height(), 0);
  const auto& k = kernels::active();
  for (const auto& b : bits) {
    require_same_shape(v, b, "decode_V");
    k.accumulate_bits(v.data(), b.data(), v.size());
  }
  return v;
}

OrderMap order_map(const IntGrid& v, const CodewordTable& table, const Mask& valid) {
  require_same_shape(v, valid, "order_map");
  OrderMap out{IntGrid(v.width(), v.height(), 0), Mask(v.width(), v.height(), 0), table.n_bits(), 0};
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!valid[i]) continue;
    if (auto k = table.order_of(v[i])) {
      out.k[i] = *k;
      out.valid[i] = 1;
    } else {
      ++out.out_of_table;
    }
  }
  return out;
}

OrderMap decode_orders(const std::vector<const RasterF*>& gray_frames, const RasterF& background,
                       const Mask& valid, const CodewordTable& table) {
  if (static_cast<int>(gray_frames.size()) != table.n_bits()) {
    throw RangeError("expected " + std::to_string(table.n_bits()) + " Gray frames, got " +
                     std::to_string(gray_frames.size()));
  }
  // A pixel that left the projector field in any Gray frame has no codeword.
  Mask lit = valid;
  for (const RasterF* f : gray_frames) {
    require_same_shape(*f, lit, "decode_orders");
    for (std::size_t i = 0; i < lit.size(); ++i) lit[i] = lit[i] && std::isfinite((*f)[i]);
  }
  std::vector<BitGrid> bits;
  bits.reserve(gray_frames.size());
  for (const RasterF* f : gray_frames) bits.push_back(binarize(*f, background, lit));
  return order_map(decode_V(bits), table, lit);
}

}  // namespace graysl
