#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include "graysl/raster.hpp"

namespace graysl {

/// Binary PGM (P5). Samples are scaled to [0,1] by maxval; 16-bit samples are
/// big-endian.
RasterF read_pgm(const std::filesystem::path& path);
RasterF parse_pgm(std::span<const std::byte> bytes);

/// Quantizes round-half-up(v * maxval). maxval must be 255 or 65535. Throws
/// RangeError naming the first pixel outside [0,1].
void write_pgm(const RasterF& r, const std::filesystem::path& path, int maxval = 255);
std::string encode_pgm(const RasterF& r, int maxval = 255);

/// "FRF <w> <h>\n" followed by w*h little-endian float32 values, row-major.
RasterF read_raster(const std::filesystem::path& path);
RasterF parse_raster(std::span<const std::byte> bytes);
void write_raster(const RasterF& r, const std::filesystem::path& path);
std::string encode_raster(const RasterF& r);

struct PlyStats {
  std::size_t written = 0;
  std::size_t dropped = 0;  // points with a non-finite coordinate
};

using Point3 = std::array<double, 3>;

/// ASCII PLY 1.0 with float x, y, z vertex properties.
PlyStats write_ply(std::span<const Point3> points, const std::filesystem::path& path);
std::string encode_ply(std::span<const Point3> points, PlyStats* stats = nullptr);

/// Whole-file helpers shared by the readers and the CLI.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace graysl
