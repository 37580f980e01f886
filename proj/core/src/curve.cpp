#include "binvis/curve.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include "binvis/error.hpp"

namespace binvis::curve {
namespace {

void check_order(unsigned order) {
  if (order < 1 || order > kMaxHilbertOrder) {
    throw Error(ErrorCode::IndexOutOfRange,
                "hilbert order " + std::to_string(order) + " outside [1, 16]");
  }
}

// Reflect/transpose a quadrant so the sub-curve has the parent's orientation.
constexpr void rotate(std::uint32_t side, std::uint32_t& x, std::uint32_t& y, std::uint32_t rx,
                      std::uint32_t ry) noexcept {
  if (ry == 0) {
    if (rx == 1) {
      x = side - 1 - x;
      y = side - 1 - y;
    }
    std::swap(x, y);
  }
}

void check_layout_order(unsigned order) {
  check_order(order);
  if (order > kMaxLayoutOrder) {
    throw Error(ErrorCode::IndexOutOfRange,
                "layout order " + std::to_string(order) + " exceeds " + std::to_string(kMaxLayoutOrder));
  }
}

}  // namespace

std::string_view to_string(CurveKind kind) noexcept {
  return kind == CurveKind::Hilbert ? "hilbert" : "scanline";
}

Point hilbert_d_to_xy(unsigned order, std::uint64_t d) {
  check_order(order);
  const std::uint64_t capacity = std::uint64_t{1} << (2 * order);
  if (d >= capacity) {
    throw Error(ErrorCode::IndexOutOfRange, "index " + std::to_string(d) + " >= 4^" +
                                                std::to_string(order));
  }
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint64_t t = d;
  for (unsigned level = 0; level < order; ++level) {
    const std::uint32_t s = std::uint32_t{1} << level;
    const auto rx = static_cast<std::uint32_t>(1 & (t >> 1));
    const auto ry = static_cast<std::uint32_t>(1 & (t ^ rx));
    rotate(s, x, y, rx, ry);
    x += s * rx;
    y += s * ry;
    t >>= 2;
  }
  return {x, y};
}

std::uint64_t hilbert_xy_to_d(unsigned order, Point p) {
  check_order(order);
  const std::uint32_t side = std::uint32_t{1} << order;
  if (p.x >= side || p.y >= side) {
    throw Error(ErrorCode::IndexOutOfRange, "point outside the order-" + std::to_string(order) +
                                                " grid");
  }
  std::uint64_t d = 0;
  for (std::uint32_t s = side / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (p.x & s) > 0 ? 1 : 0;
    const std::uint32_t ry = (p.y & s) > 0 ? 1 : 0;
    d += std::uint64_t{s} * s * ((3 * rx) ^ ry);
    rotate(side, p.x, p.y, rx, ry);
  }
  return d;
}

Point scanline_d_to_xy(std::uint32_t width, std::uint64_t d) {
  if (width == 0) {
    throw Error(ErrorCode::IndexOutOfRange, "scanline width must be >= 1");
  }
  return {static_cast<std::uint32_t>(d % width), static_cast<std::uint32_t>(d / width)};
}

CurveLayout::CurveLayout(CurveKind kind, unsigned order, std::uint32_t width, std::uint32_t height)
    : kind_(kind), order_(order), width_(width), height_(height) {
  std::vector<Point> table(capacity());
  for (std::uint64_t d = 0; d < table.size(); ++d) {
    table[d] = kind == CurveKind::Hilbert ? hilbert_d_to_xy(order, d) : scanline_d_to_xy(width, d);
  }
  table_ = std::make_shared<const std::vector<Point>>(std::move(table));
}

CurveLayout CurveLayout::hilbert(unsigned order) {
  check_layout_order(order);
  const std::uint32_t side = std::uint32_t{1} << order;
  return {CurveKind::Hilbert, order, side, side};
}

CurveLayout CurveLayout::scanline_square(unsigned order) {
  check_layout_order(order);
  const std::uint32_t side = std::uint32_t{1} << order;
  return {CurveKind::Scanline, order, side, side};
}

CurveLayout CurveLayout::scanline(std::uint32_t width, std::uint32_t height) {
  if (width == 0 || height == 0) {
    throw Error(ErrorCode::IndexOutOfRange, "scanline grid must be at least 1x1");
  }
  if (std::uint64_t{width} * height > (std::uint64_t{1} << (2 * kMaxLayoutOrder))) {
    throw Error(ErrorCode::IndexOutOfRange, "scanline grid too large");
  }
  unsigned order = 0;
  if (width == height && std::has_single_bit(width) && width > 1) {
    order = static_cast<unsigned>(std::countr_zero(width));
  }
  return {CurveKind::Scanline, order, width, height};
}

Point CurveLayout::at(std::uint64_t d) const {
  if (d >= capacity()) {
    throw Error(ErrorCode::IndexOutOfRange, "index " + std::to_string(d) + " >= capacity " +
                                                std::to_string(capacity()));
  }
  return (*table_)[d];
}

double locality_score(const CurveLayout& layout, std::uint64_t window) {
  const std::uint64_t capacity = layout.capacity();
  if (window < 1 || window >= capacity) {
    throw Error(ErrorCode::IndexOutOfRange, "window " + std::to_string(window) +
                                                " outside [1, capacity)");
  }
  const auto table = layout.table();
  double sum = 0.0;
  for (std::uint64_t i = 0; i + window < capacity; ++i) {
    const double dx = static_cast<double>(table[i].x) - static_cast<double>(table[i + window].x);
    const double dy = static_cast<double>(table[i].y) - static_cast<double>(table[i + window].y);
    sum += std::sqrt(dx * dx + dy * dy);
  }
  return sum / static_cast<double>(capacity - window);
}

}  // namespace binvis::curve
