#pragma once

// Byte-class colouring in the Binvis style: every byte value falls in one of
// five ASCII classes, and each class owns one hue.
//
//   Null              0x00                black
//   Control           0x01-0x1F, 0x7F     green
//   Printable         0x20-0x7E           blue
//   Extended          0x80-0xFE           red
//   NonBreakingSpace  0xFF                white
//
// Under value-scaled shading the class hue is dimmed to a level in [64, 255]
// proportional to the byte's rank inside its class, so neighbouring byte values
// stay distinguishable while the class remains recoverable from the hue.

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace binvis::color {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend constexpr auto operator<=>(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kBlack{0, 0, 0};
inline constexpr Rgb kWhite{255, 255, 255};

enum class ByteClass : std::uint8_t { Null, Printable, Control, Extended, NonBreakingSpace };

inline constexpr std::array<ByteClass, 5> kAllClasses{ByteClass::Null, ByteClass::Printable,
                                                      ByteClass::Control, ByteClass::Extended,
                                                      ByteClass::NonBreakingSpace};

std::string_view to_string(ByteClass c) noexcept;

[[nodiscard]] constexpr ByteClass classify_byte(std::uint8_t b) noexcept {
  if (b == 0x00) return ByteClass::Null;
  if (b == 0xFF) return ByteClass::NonBreakingSpace;
  if (b >= 0x80) return ByteClass::Extended;
  if (b >= 0x20 && b <= 0x7E) return ByteClass::Printable;
  return ByteClass::Control;
}

/// Position of b among the members of its class (ascending byte value) and
/// the class size. Control is not contiguous: 0x7F ranks after 0x1F.
struct ClassRank {
  unsigned rank = 0;
  unsigned size = 1;
};

[[nodiscard]] constexpr ClassRank class_rank(std::uint8_t b) noexcept {
  switch (classify_byte(b)) {
    case ByteClass::Null:
    case ByteClass::NonBreakingSpace: return {0, 1};
    case ByteClass::Printable: return {static_cast<unsigned>(b - 0x20), 95};
    case ByteClass::Extended: return {static_cast<unsigned>(b - 0x80), 127};
    case ByteClass::Control: return {b == 0x7F ? 31U : static_cast<unsigned>(b - 0x01), 32};
  }
  return {};
}

inline constexpr unsigned kShadeFloor = 64;

/// 64 + round(191 * rank / (size - 1)), with halves rounded up.
[[nodiscard]] constexpr std::uint8_t shade_level(std::uint8_t b) noexcept {
  const auto [rank, size] = class_rank(b);
  if (size <= 1) return 255;
  const unsigned span = 255 - kShadeFloor;
  const unsigned denom = size - 1;
  return static_cast<std::uint8_t>(kShadeFloor + (2 * span * rank + denom) / (2 * denom));
}

enum class Shading { Flat, ValueScaled };

std::string_view to_string(Shading s) noexcept;

class ColorScheme {
 public:
  /// Blue printable, green control, red extended, value-scaled, grey padding.
  static ColorScheme binvis_default();

  /// Parse the plain-text form produced by serialize(). Unknown keys, bad hex
  /// colours, a non-black null or non-white 0xFF entry, or a padding colour
  /// some byte can reach all raise Error(BadScheme).
  static ColorScheme parse(std::string_view text);

  [[nodiscard]] Rgb hue(ByteClass c) const noexcept { return hues_[static_cast<std::size_t>(c)]; }
  [[nodiscard]] Shading shading() const noexcept { return shading_; }
  [[nodiscard]] Rgb padding() const noexcept { return padding_; }

  ColorScheme& set_hue(ByteClass c, Rgb rgb);
  ColorScheme& set_shading(Shading s) noexcept;
  ColorScheme& set_padding(Rgb rgb) noexcept;

  /// "key = #rrggbb" lines in a fixed order; also the input of digest().
  [[nodiscard]] std::string serialize() const;

  /// 16 hex digits identifying the palette; embedded in image metadata.
  [[nodiscard]] std::string digest() const;

  /// Throws Error(BadScheme) when padding collides with a byte colour.
  void validate() const;

 private:
  std::array<Rgb, 5> hues_{};
  Shading shading_ = Shading::ValueScaled;
  Rgb padding_{128, 128, 128};
};

[[nodiscard]] Rgb color_of(std::uint8_t b, const ColorScheme& scheme) noexcept;

/// color_of for all 256 byte values, for the encoder's inner loop.
using ColorTable = std::array<Rgb, 256>;
[[nodiscard]] ColorTable build_color_table(const ColorScheme& scheme) noexcept;

std::string to_hex(Rgb rgb);

}  // namespace binvis::color
