#pragma once

// 1D -> 2D index layouts. The Hilbert layout keeps bytes that are close in
// the stream close in the image; the scanline layout is the row-major
// baseline it is measured against.
//
// Canonical Hilbert orientation: d = 0 at (0,0), the order-1 curve visits
// (0,0) (0,1) (1,1) (1,0). Every golden image depends on it.

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace binvis::curve {

struct Point {
  std::uint32_t x = 0;
  std::uint32_t y = 0;

  friend constexpr auto operator<=>(const Point&, const Point&) = default;
};

inline constexpr unsigned kMaxHilbertOrder = 16;
/// Largest order for which CurveLayout materialises a table (16M cells).
inline constexpr unsigned kMaxLayoutOrder = 12;

/// O(order) bit manipulation. Throws Error(IndexOutOfRange) for d >= 4^order
/// and for orders outside [1, kMaxHilbertOrder].
[[nodiscard]] Point hilbert_d_to_xy(unsigned order, std::uint64_t d);

/// Inverse of hilbert_d_to_xy.
[[nodiscard]] std::uint64_t hilbert_xy_to_d(unsigned order, Point p);

/// x = d mod width, y = d div width.
[[nodiscard]] Point scanline_d_to_xy(std::uint32_t width, std::uint64_t d);

enum class CurveKind { Hilbert, Scanline };

std::string_view to_string(CurveKind kind) noexcept;

/// A bijection from [0, capacity) onto a width x height grid, backed by a
/// precomputed coordinate table. Copies share the table.
class CurveLayout {
 public:
  static CurveLayout hilbert(unsigned order);
  /// Square scanline grid with the same side as hilbert(order).
  static CurveLayout scanline_square(unsigned order);
  static CurveLayout scanline(std::uint32_t width, std::uint32_t height);

  [[nodiscard]] CurveKind kind() const noexcept { return kind_; }
  /// log2 of the side for square layouts, 0 for arbitrary scanline grids.
  [[nodiscard]] unsigned order() const noexcept { return order_; }
  [[nodiscard]] std::uint32_t width() const noexcept { return width_; }
  [[nodiscard]] std::uint32_t height() const noexcept { return height_; }
  [[nodiscard]] std::uint64_t capacity() const noexcept {
    return std::uint64_t{width_} * height_;
  }

  /// Throws Error(IndexOutOfRange) for d >= capacity().
  [[nodiscard]] Point at(std::uint64_t d) const;
  [[nodiscard]] std::span<const Point> table() const noexcept { return *table_; }

 private:
  CurveLayout(CurveKind kind, unsigned order, std::uint32_t width, std::uint32_t height);

  CurveKind kind_;
  unsigned order_;
  std::uint32_t width_;
  std::uint32_t height_;
  std::shared_ptr<const std::vector<Point>> table_;
};

/// Mean Euclidean grid distance between the cells of indices i and i + window,
/// over every i in [0, capacity - window). Requires 1 <= window < capacity.
[[nodiscard]] double locality_score(const CurveLayout& layout, std::uint64_t window);

}  // namespace binvis::curve
