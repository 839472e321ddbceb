#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "graysl/fringe.hpp"
#include "graysl/graycode.hpp"
#include "graysl/simulator.hpp"

using namespace graysl;

namespace {

PatternSpec spec_of(int periods, int bits, double period) {
  PatternSpec s;
  s.period_px = period;
  s.n_periods = periods;
  s.n_gray_bits = bits;
  s.width = static_cast<int>(std::ceil(period * periods));
  s.height = 3;
  return s;
}

BitGrid bits_of(std::initializer_list<int> v) {
  BitGrid b(static_cast<int>(v.size()), 1);
  std::size_t i = 0;
  for (int x : v) b[i++] = static_cast<std::uint8_t>(x);
  return b;
}

}  // namespace

TEST(Binarize, StrictGreaterThan) {
  const Mask valid(3, 1, 1);
  const BitGrid b = binarize(RasterF(3, 1, std::vector<double>{0.8, 0.5, 0.2}), RasterF(3, 1, 0.5), valid);
  EXPECT_EQ(b[0], 1);
  EXPECT_EQ(b[1], 0);
  EXPECT_EQ(b[2], 0);
}

TEST(Binarize, InvalidPixelsCarryNoBit) {
  Mask valid(2, 1, 1);
  valid[0] = 0;
  const BitGrid b = binarize(RasterF(2, 1, 0.9), RasterF(2, 1, 0.5), valid);
  EXPECT_EQ(b[0], 0);
  EXPECT_EQ(b[1], 1);
}

TEST(DecodeV, Weights) {
  const IntGrid v = decode_V({bits_of({1, 0}), bits_of({0, 0}), bits_of({1, 0}), bits_of({0, 0})});
  EXPECT_EQ(v[0], 10);
  EXPECT_EQ(v[1], 0);
}

TEST(OrderMap, TwoBitLookup) {
  const CodewordTable t(2);
  const Mask valid(1, 1, 1);
  EXPECT_EQ(order_map(IntGrid(1, 1, 3), t, valid).k[0], 3);
}

TEST(OrderMap, RoundtripAllCodewords) {
  for (int n = 1; n <= 6; ++n) {
    const CodewordTable t(n);
    IntGrid v(1 << n, 1);
    for (int k = 1; k <= (1 << n); ++k) v[static_cast<std::size_t>(k - 1)] = t.code_of(k);
    const OrderMap m = order_map(v, t, Mask(1 << n, 1, 1));
    for (int k = 1; k <= (1 << n); ++k) EXPECT_EQ(m.k[static_cast<std::size_t>(k - 1)], k);
  }
}

TEST(OrderMap, OutOfTableIsTallied) {
  const CodewordTable t(3, 5);
  IntGrid v(3, 1);
  v[0] = t.code_of(5);
  v[1] = static_cast<std::int32_t>(gray_codeword(7));
  v[2] = static_cast<std::int32_t>(gray_codeword(2));
  Mask valid(3, 1, 1);
  const OrderMap m = order_map(v, t, valid);
  EXPECT_EQ(m.out_of_table, 1u);
  EXPECT_FALSE(m.valid[1]);
  EXPECT_EQ(m.k[1], 0);
  EXPECT_EQ(m.k[2], 2);
}

TEST(Decode, ProjectedPatternsGiveTheStaircase) {
  const PatternSpec s = spec_of(4, 2, 16.0);
  std::vector<BitGrid> bits;
  for (int b = 1; b <= 2; ++b) {
    const RasterF g = gen_gray_pattern(s, b);
    BitGrid bg(g.width(), g.height());
    for (std::size_t i = 0; i < g.size(); ++i) bg[i] = g[i] > 0.5;
    bits.push_back(bg);
  }
  const CodewordTable t(2);
  const IntGrid v = decode_V(bits);
  const OrderMap m = order_map(v, t, Mask(s.width, s.height, 1));
  for (int x = 0; x < s.width; ++x) {
    EXPECT_EQ(m.k(x, 1), x / 16 + 1);
    EXPECT_EQ(v(x, 1), t.code_of(x / 16 + 1));
  }
}

// Noise- and defocus-free capture: thresholding against the sinusoid
// background recovers the projected bit away from code boundaries.
TEST(Decode, SimulatedCaptureMatchesProjection) {
  const PatternSpec s = spec_of(16, 4, 20.0);
  const auto bank = make_pattern_bank(s, false, false);
  Scene plane;
  plane.parts.push_back(SceneObject::plane(0.0));
  const OpticalModel m;
  std::vector<RasterF> sin;
  for (int n = 0; n < 3; ++n) sin.push_back(render_capture(plane, 0, bank.sinusoids[static_cast<std::size_t>(n)], s, m, 0));
  const WrappedTriple w = wrapped_triple(sin[0], sin[1], sin[2]);
  for (int b = 1; b <= 4; ++b) {
    const RasterF cap = render_capture(plane, 0, bank.gray[static_cast<std::size_t>(b - 1)], s, m, 0);
    const BitGrid bits = binarize(cap, w.background, w.valid);
    for (int x = 0; x < s.width; ++x) {
      const double v = x + 0.5;
      const double to_boundary = std::abs(v - s.period_px * std::round(v / s.period_px));
      if (to_boundary <= 1.0) continue;
      EXPECT_EQ(bits(x, 0), gray_bit_value(s, b, v)) << "bit " << b << " x " << x;
    }
  }
}

// Blur and drift only ever cause +-1 order slips next to true boundaries.
TEST(Decode, BlurAndDriftGiveOnlyAdjacentOrderErrors) {
  testgen::Gen g(51);
  const PatternSpec s = spec_of(16, 4, 32.0);
  const auto bank = make_pattern_bank(s, true, false);
  for (int trial = 0; trial < 12; ++trial) {
    OpticalModel m;
    m.defocus_sigma = g.uniform(0.0, 3.0);
    const double drift = g.uniform(0.0, 0.6) * s.period_px;
    m.gain = 0.1;
    // A ramp with slope 0 would not move; shift the code by rendering the
    // Gray frames off a plane raised to produce `drift` px of displacement.
    const double dphi = drift * 2.0 * std::numbers::pi / s.period_px;
    m.saturation = 1e9;
    Scene ref_plane;
    ref_plane.parts.push_back(SceneObject::plane(0.0));
    Scene raised;
    raised.parts.push_back(SceneObject::plane(dphi / m.gain));
    std::vector<RasterF> sin;
    for (int n = 0; n < 3; ++n) sin.push_back(render_capture(ref_plane, 0, bank.sinusoids[static_cast<std::size_t>(n)], s, m, 0));
    const WrappedTriple w = wrapped_triple(sin[0], sin[1], sin[2]);
    std::vector<RasterF> gray;
    for (int b = 0; b < 4; ++b) gray.push_back(render_capture(raised, 0, bank.gray[static_cast<std::size_t>(b)], s, m, 0));
    std::vector<const RasterF*> ptrs;
    for (const auto& f : gray) ptrs.push_back(&f);
    const OrderMap k = decode_orders(ptrs, w.background, w.valid, CodewordTable(4));
    for (int x = 0; x < s.width; ++x) {
      const double v = x + 0.5;
      if (!k.valid(x, 1) || v + drift + 3.0 * m.defocus_sigma >= s.phase_extent()) continue;
      const int truth = order_at(s, v);
      const int err = k.k(x, 1) - truth;
      ASSERT_LE(std::abs(err), 1) << "trial " << trial << " x " << x;
      if (err != 0) {
        const double to_boundary = std::abs(v - s.period_px * std::round(v / s.period_px));
        EXPECT_LE(to_boundary, 2.0 / 3.0 * s.period_px);
      }
    }
  }
}

TEST(Decode, ErrorCountsScaleWithPeriod) {
  // Same geometry in units of the period: identical error counts.
  auto errors_at = [](double period, double sigma) {
    const PatternSpec s = spec_of(8, 3, period);
    const auto bank = make_pattern_bank(s, false, false);
    OpticalModel m;
    m.defocus_sigma = sigma;
    Scene plane;
    plane.parts.push_back(SceneObject::plane(0.0));
    std::vector<RasterF> sin;
    for (int n = 0; n < 3; ++n) sin.push_back(render_capture(plane, 0, bank.sinusoids[static_cast<std::size_t>(n)], s, m, 0));
    const WrappedTriple w = wrapped_triple(sin[0], sin[1], sin[2]);
    std::vector<RasterF> gray;
    for (int b = 0; b < 3; ++b) gray.push_back(render_capture(plane, 0, bank.gray[static_cast<std::size_t>(b)], s, m, 0));
    std::vector<const RasterF*> ptrs;
    for (const auto& f : gray) ptrs.push_back(&f);
    const OrderMap k = decode_orders(ptrs, w.background, w.valid, CodewordTable(3));
    int errors = 0;
    for (int x = 0; x < s.width; ++x) errors += k.k(x, 1) != order_at(s, x + 0.5);
    return errors;
  };
  EXPECT_EQ(errors_at(32.0, 1.0), errors_at(64.0, 2.0));
  EXPECT_EQ(errors_at(32.0, 0.0), 0);
}

TEST(Decode, WrongFrameCount) {
  const RasterF f(2, 2, 0.5);
  EXPECT_THROW(decode_orders({&f}, f, Mask(2, 2, 1), CodewordTable(2)), RangeError);
}
