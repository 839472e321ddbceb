#include "graysl/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "graysl/kernels.hpp"

namespace graysl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::array<std::array<int, 8>, 8> build_bayer8() {
  // M_{2n} = [[4M, 4M+2], [4M+3, 4M+1]] starting from M_1 = [0].
  std::array<std::array<int, 8>, 8> m{};
  m[0][0] = 0;
  for (int size = 1; size < 8; size *= 2) {
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        const int base = 4 * m[y][x];
        m[y][x] = base;
        m[y][x + size] = base + 2;
        m[y + size][x] = base + 3;
        m[y + size][x + size] = base + 1;
      }
    }
  }
  return m;
}

template <class F>
RasterF fill_along_axis(const PatternSpec& spec, F&& value_at) {
  RasterF out(spec.width, spec.height);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const int i = spec.axis == PhaseAxis::X ? x : y;
      out(x, y) = value_at(static_cast<double>(i) + 0.5);
    }
  }
  return out;
}

}  // namespace

PhaseAxis parse_phase_axis(const std::string& s) {
  if (s == "x" || s == "X" || s == "column") return PhaseAxis::X;
  if (s == "y" || s == "Y" || s == "row") return PhaseAxis::Y;
  throw ConfigError("unknown phase axis '" + s + "' (expected x or y)");
}

std::string to_string(PhaseAxis axis) { return axis == PhaseAxis::X ? "x" : "y"; }

void PatternSpec::validate() const {
  if (width < 1 || height < 1) throw ConfigError("pattern dimensions must be positive");
  if (!(period_px >= 8.0)) throw ConfigError("period_px must be >= 8");
  if (n_periods < 1) throw ConfigError("n_periods must be >= 1");
  if (n_gray_bits < 1 || n_gray_bits > 16) throw ConfigError("n_gray_bits must be in [1, 16]");
  if (static_cast<double>(n_periods) * period_px > phase_extent() + 1e-9) {
    throw ConfigError("n_periods * period_px exceeds the extent along the phase axis");
  }
  if (n_periods > (1 << n_gray_bits)) {
    throw ConfigError("n_periods exceeds the 2^N orders the Gray code can label");
  }
}

double sinusoid_value(double period_px, int shift, double phi0, double v) {
  return 0.5 + 0.5 * std::cos(kTwoPi * v / period_px + kTwoPi * (shift - 1) / 3.0 + phi0);
}

std::uint32_t gray_codeword(int k) {
  const auto b = static_cast<std::uint32_t>(k - 1);
  return b ^ (b >> 1);
}

int order_at(const PatternSpec& spec, double v) {
  const int k = static_cast<int>(std::floor(v / spec.period_px)) + 1;
  return std::clamp(k, 1, 1 << spec.n_gray_bits);
}

int gray_bit_value(const PatternSpec& spec, int bit, double v) {
  const std::uint32_t code = gray_codeword(order_at(spec, v));
  return static_cast<int>((code >> (spec.n_gray_bits - bit)) & 1u);
}

RasterF gen_sinusoid(const PatternSpec& spec, int n) {
  spec.validate();
  if (n < 1 || n > 3) throw RangeError("shift index must be 1, 2 or 3");
  return fill_along_axis(spec, [&](double v) { return sinusoid_value(spec.period_px, n, spec.phi0, v); });
}

const std::array<std::array<int, 8>, 8>& bayer8() {
  static const auto m = build_bayer8();
  return m;
}

RasterF dither_binarize(const RasterF& ideal) {
  const auto& bayer = bayer8();
  RasterF out(ideal.width(), ideal.height());
  std::vector<double> thresholds(static_cast<std::size_t>(ideal.width()));
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(ideal.width()));
  const auto& k = kernels::active();
  for (int y = 0; y < ideal.height(); ++y) {
    for (int x = 0; x < ideal.width(); ++x) {
      thresholds[static_cast<std::size_t>(x)] = (bayer[y % 8][x % 8] + 0.5) / 64.0;
    }
    k.greater_than(ideal.row(y).data(), thresholds.data(), bits.data(), bits.size());
    auto row = out.row(y);
    for (std::size_t x = 0; x < bits.size(); ++x) row[x] = bits[x];
  }
  return out;
}

RasterF gen_gray_pattern(const PatternSpec& spec, int bit) {
  spec.validate();
  if (bit < 1 || bit > spec.n_gray_bits) throw RangeError("gray bit index out of range");
  return fill_along_axis(spec, [&](double v) { return static_cast<double>(gray_bit_value(spec, bit, v)); });
}

CodewordTable::CodewordTable(int n_bits, std::optional<int> n_orders) : n_bits_(n_bits) {
  if (n_bits < 1 || n_bits > 16) throw RangeError("codeword table needs 1 <= N <= 16");
  const int full = 1 << n_bits;
  const int orders = n_orders.value_or(full);
  if (orders < 1 || orders > full) throw RangeError("order count outside [1, 2^N]");
  k_to_v_.resize(static_cast<std::size_t>(orders));
  v_to_k_.assign(static_cast<std::size_t>(full), 0);
  for (int k = 1; k <= orders; ++k) {
    // Reading the codeword MSB first with weights 2^(N-i) yields its integer value.
    const auto v = static_cast<std::int32_t>(gray_codeword(k));
    k_to_v_[static_cast<std::size_t>(k - 1)] = v;
    v_to_k_[static_cast<std::size_t>(v)] = k;
  }
}

std::int32_t CodewordTable::code_of(int k) const {
  if (k < 1 || k > n_orders()) throw RangeError("order outside codeword table");
  return k_to_v_[static_cast<std::size_t>(k - 1)];
}

std::optional<int> CodewordTable::order_of(std::int32_t v) const noexcept {
  if (v < 0 || static_cast<std::size_t>(v) >= v_to_k_.size()) return std::nullopt;
  const int k = v_to_k_[static_cast<std::size_t>(v)];
  if (k == 0) return std::nullopt;
  return k;
}

CodewordTable build_codeword_table(int n_bits) { return CodewordTable(n_bits); }

std::vector<ProjectedPattern> make_sinusoid_set(const PatternSpec& spec, bool dithered) {
  std::vector<ProjectedPattern> out;
  for (int n = 1; n <= 3; ++n) {
    RasterF ideal = gen_sinusoid(spec, n);
    if (dithered) {
      out.push_back({dither_binarize(ideal), std::nullopt});
    } else {
      out.push_back({std::move(ideal), FringeProfile{spec.period_px, n, spec.phi0}});
    }
  }
  return out;
}

std::vector<ProjectedPattern> make_gray_set(const PatternSpec& spec) {
  std::vector<ProjectedPattern> out;
  for (int b = 1; b <= spec.n_gray_bits; ++b) out.push_back({gen_gray_pattern(spec, b), std::nullopt});
  return out;
}

PatternSpec with_period_count(const PatternSpec& spec, int n_periods) {
  PatternSpec s = spec;
  s.n_periods = n_periods;
  s.period_px = static_cast<double>(spec.n_periods) * spec.period_px / n_periods;
  return s;
}

std::string pattern_manifest(const PatternSpec& spec, bool dithered) {
  std::ostringstream os;
  os.precision(17);
  os << "period_px = " << spec.period_px << "\n"
     << "n_periods = " << spec.n_periods << "\n"
     << "phase_axis = " << to_string(spec.axis) << "\n"
     << "n_gray_bits = " << spec.n_gray_bits << "\n"
     << "phi0 = " << spec.phi0 << "\n"
     << "proj_width = " << spec.width << "\n"
     << "proj_height = " << spec.height << "\n"
     << "dithered = " << (dithered ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace graysl
