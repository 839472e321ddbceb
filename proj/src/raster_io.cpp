#include "graysl/raster_io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace graysl {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::byte> bytes, std::size_t start = 0)
      : bytes_(bytes), pos_(start) {}

  [[nodiscard]] std::size_t offset() const noexcept { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = at(pos_);
      if (c == '#') {
        while (pos_ < bytes_.size() && at(pos_) != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  long read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(at(pos_)))) {
      value = value * 10 + (at(pos_) - '0');
      if (value > 1'000'000'000L) fail(std::string(what) + " too large", start);
      ++pos_;
    }
    if (pos_ == start) fail(std::string("expected ") + what, start);
    return value;
  }

  [[noreturn]] static void fail(const std::string& msg, std::size_t offset) {
    throw ParseError(msg + " at byte offset " + std::to_string(offset));
  }

  [[nodiscard]] char at(std::size_t i) const { return static_cast<char>(bytes_[i]); }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

float load_f32_le(const std::byte* p) {
  std::uint32_t bits = 0;
  for (int b = 3; b >= 0; --b) bits = (bits << 8) | static_cast<std::uint8_t>(p[b]);
  return std::bit_cast<float>(bits);
}

void store_f32_le(float v, std::string& out) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
}

std::span<const std::byte> as_bytes(const std::string& s) {
  return std::as_bytes(std::span<const char>(s.data(), s.size()));
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for " + path.string());
}

RasterF parse_pgm(std::span<const std::byte> bytes) {
  HeaderReader hdr(bytes);
  if (bytes.size() < 2 || hdr.at(0) != 'P' || hdr.at(1) != '5') {
    HeaderReader::fail("missing P5 magic", 0);
  }
  HeaderReader body(bytes, 2);
  const long width = body.read_uint("width");
  const long height = body.read_uint("height");
  const long maxval = body.read_uint("maxval");
  std::size_t pos = body.offset();
  if (width < 1 || height < 1) HeaderReader::fail("non-positive dimensions", pos);
  if (maxval < 1 || maxval > 65535) HeaderReader::fail("maxval out of range", pos);
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(hdr.at(pos)))) {
    HeaderReader::fail("expected single whitespace after maxval", pos);
  }
  ++pos;

  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t need = count * sample_bytes;
  if (bytes.size() - pos < need) {
    HeaderReader::fail("truncated payload (" + std::to_string(bytes.size() - pos) + " of " +
                           std::to_string(need) + " bytes)",
                       bytes.size());
  }
  std::vector<double> values(count);
  const double scale = static_cast<double>(maxval);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned sample = 0;
    if (sample_bytes == 1) {
      sample = static_cast<std::uint8_t>(bytes[pos + i]);
    } else {
      sample = (static_cast<unsigned>(static_cast<std::uint8_t>(bytes[pos + 2 * i])) << 8) |
               static_cast<std::uint8_t>(bytes[pos + 2 * i + 1]);
    }
    if (sample > static_cast<unsigned>(maxval)) {
      HeaderReader::fail("sample exceeds maxval", pos + i * sample_bytes);
    }
    values[i] = static_cast<double>(sample) / scale;
  }
  return RasterF(static_cast<int>(width), static_cast<int>(height), std::move(values));
}

RasterF read_pgm(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  try {
    return parse_pgm(as_bytes(data));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string encode_pgm(const RasterF& r, int maxval) {
  if (maxval != 255 && maxval != 65535) {
    throw RangeError("maxval must be 255 or 65535, got " + std::to_string(maxval));
  }
  std::string out = "P5\n" + std::to_string(r.width()) + " " + std::to_string(r.height()) + "\n" +
                    std::to_string(maxval) + "\n";
  out.reserve(out.size() + r.size() * (maxval > 255 ? 2 : 1));
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      const double v = r(x, y);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw RangeError("pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                         ") value outside [0, 1]");
      }
      const auto q = static_cast<unsigned>(std::floor(v * maxval + 0.5));
      if (maxval > 255) {
        out.push_back(static_cast<char>((q >> 8) & 0xFFu));
        out.push_back(static_cast<char>(q & 0xFFu));
      } else {
        out.push_back(static_cast<char>(q & 0xFFu));
      }
    }
  }
  return out;
}

void write_pgm(const RasterF& r, const std::filesystem::path& path, int maxval) {
  write_file(path, encode_pgm(r, maxval));
}

RasterF parse_raster(std::span<const std::byte> bytes) {
  HeaderReader hdr(bytes);
  if (bytes.size() < 4 || hdr.at(0) != 'F' || hdr.at(1) != 'R' || hdr.at(2) != 'F' ||
      hdr.at(3) != ' ') {
    HeaderReader::fail("header mismatch: expected \"FRF <width> <height>\"", 0);
  }
  std::size_t pos = 4;
  auto read_num = [&](const char* what) {
    const std::size_t start = pos;
    long v = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(hdr.at(pos)))) {
      v = v * 10 + (hdr.at(pos) - '0');
      if (v > 1'000'000'000L) HeaderReader::fail(std::string(what) + " too large", start);
      ++pos;
    }
    if (pos == start) HeaderReader::fail(std::string("header mismatch: expected ") + what, start);
    return v;
  };
  const long width = read_num("width");
  if (pos >= bytes.size() || hdr.at(pos) != ' ') HeaderReader::fail("header mismatch", pos);
  ++pos;
  const long height = read_num("height");
  if (pos >= bytes.size() || hdr.at(pos) != '\n') HeaderReader::fail("header mismatch", pos);
  ++pos;
  if (width < 1 || height < 1) HeaderReader::fail("non-positive dimensions", pos);

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t payload = bytes.size() - pos;
  if (payload != count * 4) {
    throw ParseError("size mismatch: header declares " + std::to_string(count) +
                     " values, payload holds " + std::to_string(payload) + " bytes at byte offset " +
                     std::to_string(pos));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = static_cast<double>(load_f32_le(bytes.data() + pos + 4 * i));
  }
  return RasterF(static_cast<int>(width), static_cast<int>(height), std::move(values));
}

RasterF read_raster(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  try {
    return parse_raster(as_bytes(data));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string encode_raster(const RasterF& r) {
  std::string out = "FRF " + std::to_string(r.width()) + " " + std::to_string(r.height()) + "\n";
  out.reserve(out.size() + 4 * r.size());
  for (double v : r.values()) store_f32_le(static_cast<float>(v), out);
  return out;
}

void write_raster(const RasterF& r, const std::filesystem::path& path) {
  write_file(path, encode_raster(r));
}

std::string encode_ply(std::span<const Point3> points, PlyStats* stats) {
  std::string body;
  PlyStats s;
  char line[128];
  for (const auto& p : points) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2])) {
      ++s.dropped;
      continue;
    }
    const int n = std::snprintf(line, sizeof line, "%.9g %.9g %.9g\n", p[0], p[1], p[2]);
    body.append(line, static_cast<std::size_t>(n));
    ++s.written;
  }
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(s.written) +
                    "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  out += body;
  if (stats != nullptr) *stats = s;
  return out;
}

PlyStats write_ply(std::span<const Point3> points, const std::filesystem::path& path) {
  PlyStats stats;
  write_file(path, encode_ply(points, &stats));
  return stats;
}

}  // namespace graysl
