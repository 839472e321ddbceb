#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "generators.hpp"
#include "graysl/kernels.hpp"

using namespace graysl;
namespace k = graysl::kernels;

namespace {

bool same_bits(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::memcmp(&a, &b, sizeof a) == 0;
}

void expect_same(const std::vector<double>& a, const std::vector<double>& b, const char* what) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_TRUE(same_bits(a[i], b[i])) << what << " differs at " << i << ": " << a[i] << " vs " << b[i];
  }
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!k::isa_available(k::Isa::Avx2)) GTEST_SKIP() << "AVX2 not available on this machine";
  }
  const k::KernelTable& ref = k::table_for(k::Isa::Scalar);
  const k::KernelTable& simd() { return k::table_for(k::Isa::Avx2); }
};

// Sizes straddle the vector width so both the SIMD body and the scalar tail run.
const std::size_t kSizes[] = {0, 1, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 67, 1000};

}  // namespace

TEST_F(KernelEquivalence, PhaseTerms) {
  testgen::Gen g(1);
  for (std::size_t n : kSizes) {
    std::vector<double> a(n), b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = g.coin(0.1) ? g.nasty() : g.uniform(0, 1);
      b[i] = g.uniform(0, 1);
      c[i] = g.uniform(0, 1);
    }
    std::vector<double> o1[4], o2[4];
    for (auto* o : {o1, o2}) {
      for (int j = 0; j < 4; ++j) o[j].assign(n, -7.0);
    }
    ref.phase_terms(a.data(), b.data(), c.data(), o1[0].data(), o1[1].data(), o1[2].data(), o1[3].data(), n);
    simd().phase_terms(a.data(), b.data(), c.data(), o2[0].data(), o2[1].data(), o2[2].data(), o2[3].data(), n);
    for (int j = 0; j < 4; ++j) expect_same(o1[j], o2[j], "phase_terms");
  }
}

TEST_F(KernelEquivalence, ConvolveLine) {
  testgen::Gen g(2);
  for (std::size_t n : kSizes) {
    for (std::size_t taps_n : {1u, 3u, 9u, 25u}) {
      std::vector<double> taps(taps_n);
      for (double& t : taps) t = g.uniform(0.01, 1.0);
      std::vector<double> padded(n + taps_n - 1);
      for (double& v : padded) v = g.coin(0.1) ? kNaN : g.uniform(0, 1);
      std::vector<double> o1(n, -1), o2(n, -1);
      ref.convolve_line(padded.data(), o1.data(), n, taps.data(), taps_n);
      simd().convolve_line(padded.data(), o2.data(), n, taps.data(), taps_n);
      expect_same(o1, o2, "convolve_line");
    }
  }
}

TEST_F(KernelEquivalence, ConvolveRows) {
  testgen::Gen g(3);
  for (std::size_t n : kSizes) {
    for (std::size_t taps_n : {1u, 5u, 13u, 81u}) {
      std::vector<double> taps(taps_n);
      for (double& t : taps) t = g.uniform(0.01, 1.0);
      std::vector<std::vector<double>> rows(taps_n, std::vector<double>(n));
      std::vector<const double*> ptrs(taps_n);
      for (std::size_t j = 0; j < taps_n; ++j) {
        for (double& v : rows[j]) v = g.coin(0.1) ? kNaN : g.uniform(0, 1);
        ptrs[j] = g.coin(0.2) ? nullptr : rows[j].data();
      }
      const double* centre = rows[taps_n / 2].data();
      ptrs[taps_n / 2] = centre;
      std::vector<double> o1(n, -1), o2(n, -1);
      ref.convolve_rows(ptrs.data(), centre, o1.data(), n, taps.data(), taps_n);
      simd().convolve_rows(ptrs.data(), centre, o2.data(), n, taps.data(), taps_n);
      expect_same(o1, o2, "convolve_rows");
    }
  }
}

TEST_F(KernelEquivalence, GreaterThan) {
  testgen::Gen g(4);
  for (std::size_t n : kSizes) {
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = g.nasty();
      b[i] = g.coin(0.2) ? a[i] : g.nasty();
    }
    std::vector<std::uint8_t> o1(n, 9), o2(n, 9);
    ref.greater_than(a.data(), b.data(), o1.data(), n);
    simd().greater_than(a.data(), b.data(), o2.data(), n);
    EXPECT_EQ(o1, o2);
  }
}

TEST_F(KernelEquivalence, AccumulateBits) {
  testgen::Gen g(5);
  for (std::size_t n : kSizes) {
    std::vector<std::int32_t> c1(n), c2;
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) {
      c1[i] = g.integer(0, 1 << 12);
      bits[i] = static_cast<std::uint8_t>(g.integer(0, 1));
    }
    c2 = c1;
    ref.accumulate_bits(c1.data(), bits.data(), n);
    simd().accumulate_bits(c2.data(), bits.data(), n);
    EXPECT_EQ(c1, c2);
  }
}

TEST_F(KernelEquivalence, SelectBranches) {
  testgen::Gen g(6);
  for (std::size_t n : kSizes) {
    std::vector<std::uint8_t> label(n);
    std::vector<double> p1(n), p2(n), p3(n);
    std::vector<std::int32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
      label[i] = static_cast<std::uint8_t>(g.integer(0, 5));  // includes codes outside the label set
      p1[i] = g.coin(0.05) ? kNaN : g.phase();
      p2[i] = g.phase();
      p3[i] = g.phase();
      order[i] = g.integer(0, 64);
    }
    std::vector<double> o1(n, -1), o2(n, -1);
    ref.select_branches(label.data(), p1.data(), p2.data(), p3.data(), order.data(), o1.data(), n);
    simd().select_branches(label.data(), p1.data(), p2.data(), p3.data(), order.data(), o2.data(), n);
    expect_same(o1, o2, "select_branches");
  }
}

TEST(KernelReference, PhaseTermsValues) {
  const auto& t = k::table_for(k::Isa::Scalar);
  const double a = 1.0, b = 0.25, c = 0.25;
  double num, den, bg, mod;
  t.phase_terms(&a, &b, &c, &num, &den, &bg, &mod, 1);
  EXPECT_DOUBLE_EQ(num, std::sqrt(3.0) * 0.75);
  EXPECT_DOUBLE_EQ(den, -0.75);
  EXPECT_DOUBLE_EQ(bg, 0.5);
  EXPECT_NEAR(mod, 0.5, 1e-15);
}

TEST(KernelReference, ConvolveSkipsNan) {
  const auto& t = k::table_for(k::Isa::Scalar);
  const double padded[] = {kNaN, 1.0, 3.0, kNaN, 5.0};
  const double taps[] = {1.0, 1.0, 1.0};
  double out[3];
  t.convolve_line(padded, out, 3, taps, 3);
  EXPECT_DOUBLE_EQ(out[0], 2.0);  // mean of 1 and 3
  EXPECT_DOUBLE_EQ(out[1], 2.0);
  EXPECT_TRUE(std::isnan(out[2]));  // centre is NaN
}

TEST(KernelReference, SelectBranchesFormulas) {
  const auto& t = k::table_for(k::Isa::Scalar);
  const std::uint8_t label[] = {k::kLabelLow, k::kLabelMid, k::kLabelHigh, k::kLabelInvalid};
  const double p1[] = {0.1, 0.1, 0.1, 0.1};
  const double p2[] = {0.2, 0.2, 0.2, 0.2};
  const double p3[] = {0.3, 0.3, 0.3, 0.3};
  const std::int32_t order[] = {2, 2, 2, 2};
  double out[4];
  t.select_branches(label, p1, p2, p3, order, out, 4);
  const double tp = 2.0 * std::numbers::pi;
  EXPECT_DOUBLE_EQ(out[0], 0.1 + 2 * tp - tp / 3);
  EXPECT_DOUBLE_EQ(out[1], 0.2 + 2 * tp);
  EXPECT_DOUBLE_EQ(out[2], 0.3 + 2 * tp + tp / 3);
  EXPECT_TRUE(std::isnan(out[3]));
}

TEST(KernelDispatch, ForceScalarSticks) {
  const k::Isa before = k::active().isa;
  k::force_isa(k::Isa::Scalar);
  EXPECT_EQ(k::active().isa, k::Isa::Scalar);
  if (k::isa_available(k::Isa::Avx2)) {
    k::force_isa(k::Isa::Avx2);
    EXPECT_EQ(k::active().isa, k::Isa::Avx2);
  }
  k::force_isa(before);
  EXPECT_EQ(k::isa_name(k::Isa::Scalar), "scalar");
}
