#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "graysl/fringe.hpp"
#include "graysl/patterns.hpp"
#include "graysl/simulator.hpp"

using namespace graysl;

namespace {

constexpr double kPi = std::numbers::pi;

PatternSpec small_spec(int periods, int bits, double period = 16.0) {
  PatternSpec s;
  s.period_px = period;
  s.n_periods = periods;
  s.n_gray_bits = bits;
  s.width = static_cast<int>(period * periods);
  s.height = 4;
  return s;
}

// Independent Gray -> binary: b1 = g1, bi = b(i-1) XOR gi.
int gray_to_order(std::uint32_t code, int n_bits) {
  int b = 0;
  int prev = 0;
  for (int i = n_bits - 1; i >= 0; --i) {
    prev ^= static_cast<int>((code >> i) & 1u);
    b = (b << 1) | prev;
  }
  return b + 1;
}

}  // namespace

TEST(Sinusoid, PeakAtZeroArgument) {
  // phi0 = 0 puts the argument of S1 at zero for v = 0.
  EXPECT_DOUBLE_EQ(sinusoid_value(70.0, 1, 0.0, 0.0), 1.0);
}

TEST(Sinusoid, PeriodicAndConstantAcrossLines) {
  PatternSpec s = small_spec(4, 2, 20.0);
  s.height = 3;
  for (int n = 1; n <= 3; ++n) {
    const RasterF r = gen_sinusoid(s, n);
    for (int x = 0; x + 20 < s.width; ++x) {
      EXPECT_NEAR(r(x, 0), r(x + 20, 0), 1e-12);
      EXPECT_EQ(r(x, 0), r(x, 2));
      EXPECT_GE(r(x, 0), 0.0);
      EXPECT_LE(r(x, 0), 1.0);
    }
  }
}

TEST(Sinusoid, DefaultStackSpansProjectorWidth) {
  PatternSpec s;  // 70 px x 16 periods
  EXPECT_EQ(s.period_px * s.n_periods, 1120.0);
  EXPECT_NO_THROW(s.validate());
}

TEST(Sinusoid, AlongRows) {
  PatternSpec s = small_spec(2, 1, 16.0);
  s.axis = PhaseAxis::Y;
  s.width = 3;
  s.height = 32;
  const RasterF r = gen_sinusoid(s, 1);
  EXPECT_EQ(r(0, 5), r(2, 5));
  EXPECT_NEAR(r(0, 5), sinusoid_value(16.0, 1, s.phi0, 5.5), 1e-15);
}

TEST(PatternSpec, Invariants) {
  PatternSpec s = small_spec(4, 2);
  EXPECT_NO_THROW(s.validate());
  s.period_px = 7.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = small_spec(4, 2);
  s.width -= 1;
  EXPECT_THROW(s.validate(), ConfigError);
  s = small_spec(4, 1);
  EXPECT_THROW(s.validate(), ConfigError);  // 4 periods, only 2 codewords
}

TEST(Dither, Extremes) {
  EXPECT_EQ(dither_binarize(RasterF(16, 16, 0.0)), RasterF(16, 16, 0.0));
  EXPECT_EQ(dither_binarize(RasterF(16, 16, 1.0)), RasterF(16, 16, 1.0));
}

TEST(Dither, HalfGreyLightsHalfOfEachTile) {
  const RasterF d = dither_binarize(RasterF(24, 16, 0.5));
  for (int ty = 0; ty < 2; ++ty) {
    for (int tx = 0; tx < 3; ++tx) {
      int ones = 0;
      for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) ones += d(tx * 8 + x, ty * 8 + y) > 0.5;
      }
      EXPECT_EQ(ones, 32);
    }
  }
}

TEST(Dither, BayerMatrixIsStandard) {
  const auto& m = bayer8();
  const int row0[8] = {0, 32, 8, 40, 2, 34, 10, 42};
  for (int x = 0; x < 8; ++x) EXPECT_EQ(m[0][x], row0[x]);
  std::vector<int> seen(64, 0);
  for (const auto& row : m) {
    for (int v : row) ++seen[static_cast<std::size_t>(v)];
  }
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(Dither, LevelCountMatchesThresholds) {
  // Level L lights exactly the cells whose index b satisfies (b + 0.5)/64 < L.
  for (int level = 0; level <= 64; ++level) {
    const double v = level / 64.0;
    const RasterF d = dither_binarize(RasterF(8, 8, v));
    int ones = 0;
    for (double x : d.values()) ones += x > 0.5;
    EXPECT_EQ(ones, level) << "level " << level;
  }
}

double worst_dither_error(double sigma) {
  PatternSpec s;
  s.height = 64;
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const RasterF ideal = gen_sinusoid(s, n);
    const RasterF blurred = defocus_blur(dither_binarize(ideal), sigma);
    // Skip a border where the normalized blur sees a one-sided window.
    for (int y = 8; y < s.height - 8; ++y) {
      for (int x = 8; x < s.width - 8; ++x) worst = std::max(worst, std::abs(blurred(x, y) - ideal(x, y)));
    }
  }
  return worst;
}

TEST(Dither, BlurredDitherApproximatesSinusoid) { EXPECT_LT(worst_dither_error(3.0), 0.05); }

// With sigma = 1.5 the 8 px Bayer tile still shows through: an independent
// scipy evaluation of the same construction gives 0.0790.
TEST(Dither, LightBlurLeavesTileResidual) {
  const double e = worst_dither_error(1.5);
  EXPECT_GT(e, 0.07);
  EXPECT_LT(e, 0.09);
}

TEST(GrayPattern, TwoBitFourPeriods) {
  const PatternSpec s = small_spec(4, 2, 16.0);
  const RasterF b1 = gen_gray_pattern(s, 1);
  const RasterF b2 = gen_gray_pattern(s, 2);
  const int e1[4] = {0, 0, 1, 1};
  const int e2[4] = {0, 1, 1, 0};
  for (int k = 0; k < 4; ++k) {
    for (int x = k * 16; x < (k + 1) * 16; ++x) {
      EXPECT_EQ(b1(x, 0), e1[k]) << "x=" << x;
      EXPECT_EQ(b2(x, 0), e2[k]) << "x=" << x;
    }
  }
}

TEST(GrayPattern, BoundariesAtPeriodMultiples) {
  const PatternSpec s = small_spec(16, 4, 10.0);
  for (int bit = 1; bit <= 4; ++bit) {
    const RasterF g = gen_gray_pattern(s, bit);
    for (int x = 1; x < s.width; ++x) {
      if (g(x, 0) != g(x - 1, 0)) EXPECT_EQ(x % 10, 0) << "bit " << bit;
    }
  }
}

TEST(GrayCode, LastOrderOfFourBits) {
  EXPECT_EQ(gray_codeword(16), 0b1000u);
  const CodewordTable t(4);
  EXPECT_EQ(t.code_of(16), 8);
  EXPECT_EQ(t.order_of(8), 16);
  EXPECT_EQ(gray_to_order(8, 4), 16);
}

TEST(GrayCode, TwoBitTable) {
  const CodewordTable t(2);
  const int v[4] = {0, 1, 3, 2};
  for (int k = 1; k <= 4; ++k) {
    EXPECT_EQ(t.code_of(k), v[k - 1]);
    EXPECT_EQ(t.order_of(v[k - 1]), k);
  }
}

TEST(GrayCode, TableIsBijectionWithGrayProperty) {
  for (int n = 1; n <= 10; ++n) {
    const CodewordTable t(n);
    std::vector<int> hits(static_cast<std::size_t>(1) << n, 0);
    for (int k = 1; k <= (1 << n); ++k) {
      const auto v = t.code_of(k);
      ++hits[static_cast<std::size_t>(v)];
      EXPECT_EQ(t.order_of(v), k);
      EXPECT_EQ(gray_to_order(static_cast<std::uint32_t>(v), n), k);
      if (k > 1) EXPECT_EQ(std::popcount(static_cast<unsigned>(v ^ t.code_of(k - 1))), 1);
    }
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

TEST(GrayCode, TruncatedTableRejectsUnusedCodes) {
  const CodewordTable t(4, 10);
  EXPECT_EQ(t.order_of(t.code_of(10)), 10);
  EXPECT_FALSE(t.order_of(static_cast<std::int32_t>(gray_codeword(11))).has_value());
  EXPECT_FALSE(t.order_of(-1).has_value());
  EXPECT_FALSE(t.order_of(16).has_value());
}

// The wrapped phase of the ideal stack cuts exactly where the code changes and
// stays within pi/3 of zero on the middle third of every period.
TEST(Alignment, WrappedPhaseMatchesCodewords) {
  PatternSpec s;
  s.height = 2;
  const RasterF phi = wrapped_phase(gen_sinusoid(s, 1), gen_sinusoid(s, 2), gen_sinusoid(s, 3));
  for (int x = 0; x < s.width; ++x) {
    const double v = x + 0.5;
    const int k = order_at(s, v);
    const double absolute = phi(x, 0) + 2.0 * kPi * k;
    EXPECT_NEAR(absolute, 2.0 * kPi * v / s.period_px + kPi, 1e-9) << "x=" << x;
    const double frac = v / s.period_px - std::floor(v / s.period_px);
    EXPECT_EQ(std::abs(phi(x, 0)) < kPi / 3.0, frac > 1.0 / 3.0 && frac < 2.0 / 3.0) << "x=" << x;
  }
}

TEST(Alignment, HoldsForRandomGeometry) {
  testgen::Gen g(21);
  for (int trial = 0; trial < 25; ++trial) {
    PatternSpec s;
    s.n_gray_bits = g.integer(1, 5);
    s.n_periods = g.integer(1, 1 << s.n_gray_bits);
    s.period_px = g.uniform(8.0, 40.0);
    s.width = static_cast<int>(std::ceil(s.period_px * s.n_periods));
    s.height = 1;
    const RasterF phi = wrapped_phase(gen_sinusoid(s, 1), gen_sinusoid(s, 2), gen_sinusoid(s, 3));
    for (int x = 0; x + 0.5 < s.period_px * s.n_periods; ++x) {
      const double v = x + 0.5;
      const double absolute = phi(x, 0) + 2.0 * kPi * order_at(s, v);
      ASSERT_NEAR(absolute, 2.0 * kPi * v / s.period_px + kPi, 1e-9) << "trial " << trial << " x=" << x;
    }
  }
}

TEST(PatternSets, DescriptorsAndManifest) {
  const PatternSpec s = small_spec(4, 2, 16.0);
  const auto ideal = make_sinusoid_set(s, false);
  ASSERT_EQ(ideal.size(), 3u);
  EXPECT_TRUE(ideal[1].fringe.has_value());
  EXPECT_EQ(ideal[1].fringe->shift, 2);
  const auto dithered = make_sinusoid_set(s, true);
  EXPECT_FALSE(dithered[0].fringe.has_value());
  EXPECT_EQ(make_gray_set(s).size(), 2u);
  const PatternSpec unit = with_period_count(s, 1);
  EXPECT_EQ(unit.period_px, 64.0);
  const std::string m = pattern_manifest(s, true);
  EXPECT_NE(m.find("period_px = 16\n"), std::string::npos);
  EXPECT_NE(m.find("n_gray_bits = 2\n"), std::string::npos);
}
