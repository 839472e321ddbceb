#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "graysl/error.hpp"

namespace graysl {

/// Row-major 2-D grid. Width and height are always at least one.
template <class T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw DimensionError("grid dimensions must be positive, got " + std::to_string(width) +
                           "x" + std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Grid(int width, int height, std::vector<T> values) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw DimensionError("grid dimensions must be positive");
    }
    if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw DimensionError("grid payload has " + std::to_string(values.size()) +
                           " values, expected " + std::to_string(width * height));
    }
    data_ = std::move(values);
  }

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  [[nodiscard]] std::span<T> values() noexcept { return data_; }
  [[nodiscard]] std::span<const T> values() const noexcept { return data_; }
  [[nodiscard]] std::span<T> row(int y) noexcept {
    return std::span<T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }
  [[nodiscard]] std::span<const T> row(int y) const noexcept {
    return std::span<const T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }
  [[nodiscard]] T* data() noexcept { return data_.data(); }
  [[nodiscard]] const T* data() const noexcept { return data_.data(); }

  template <class U>
  [[nodiscard]] bool same_shape(const Grid<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  /// Same shape and contents; NaN entries compare equal to NaN.
  friend bool operator==(const Grid& a, const Grid& b) {
    if (a.width_ != b.width_ || a.height_ != b.height_) return false;
    for (std::size_t i = 0; i < a.data_.size(); ++i) {
      if constexpr (std::is_floating_point_v<T>) {
        if (std::isnan(a.data_[i]) && std::isnan(b.data_[i])) continue;
      }
      if (a.data_[i] != b.data_[i]) return false;
    }
    return true;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Real-valued raster: intensities in [0,1], phases in radians or heights in mm.
/// NaN marks pixels without a value.
using RasterF = Grid<double>;
/// Validity flags, 1 = valid.
using Mask = Grid<std::uint8_t>;
using IntGrid = Grid<std::int32_t>;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class A, class B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, std::string_view what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": dimension mismatch " + std::to_string(a.width()) +
                         "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                         "x" + std::to_string(b.height()));
  }
}

/// Number of set flags.
std::size_t count_valid(const Mask& mask);

/// Mask of finite entries.
Mask finite_mask(const RasterF& r);

/// a AND b, elementwise.
Mask mask_and(const Mask& a, const Mask& b);

}  // namespace graysl
