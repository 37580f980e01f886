#include "binvis/colormap.hpp"

#include <charconv>
#include <optional>
#include <sstream>

#include "binvis/error.hpp"
#include "binvis/hash.hpp"

namespace binvis::color {
namespace {

constexpr std::array<std::string_view, 5> kClassKeys{"null", "printable", "control", "extended",
                                                     "nbsp"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<Rgb> parse_hex(std::string_view s) {
  if (s.size() != 7 || s[0] != '#') return std::nullopt;
  unsigned value = 0;
  const auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), value, 16);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return Rgb{static_cast<std::uint8_t>(value >> 16), static_cast<std::uint8_t>(value >> 8),
             static_cast<std::uint8_t>(value)};
}

std::uint8_t scale(std::uint8_t channel, std::uint8_t level) noexcept {
  return static_cast<std::uint8_t>((2U * channel * level + 255U) / 510U);
}

}  // namespace

std::string_view to_string(ByteClass c) noexcept {
  switch (c) {
    case ByteClass::Null: return "null";
    case ByteClass::Printable: return "printable";
    case ByteClass::Control: return "control";
    case ByteClass::Extended: return "extended";
    case ByteClass::NonBreakingSpace: return "nbsp";
  }
  return "?";
}

std::string_view to_string(Shading s) noexcept {
  return s == Shading::Flat ? "flat" : "value_scaled";
}

std::string to_hex(Rgb rgb) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = "#";
  for (const std::uint8_t v : {rgb.r, rgb.g, rgb.b}) {
    out += kDigits[v >> 4];
    out += kDigits[v & 0xF];
  }
  return out;
}

ColorScheme ColorScheme::binvis_default() {
  ColorScheme s;
  s.hues_[static_cast<std::size_t>(ByteClass::Null)] = kBlack;
  s.hues_[static_cast<std::size_t>(ByteClass::Printable)] = {0, 0, 255};
  s.hues_[static_cast<std::size_t>(ByteClass::Control)] = {0, 255, 0};
  s.hues_[static_cast<std::size_t>(ByteClass::Extended)] = {255, 0, 0};
  s.hues_[static_cast<std::size_t>(ByteClass::NonBreakingSpace)] = kWhite;
  return s;
}

ColorScheme& ColorScheme::set_hue(ByteClass c, Rgb rgb) {
  if ((c == ByteClass::Null && rgb != kBlack) ||
      (c == ByteClass::NonBreakingSpace && rgb != kWhite)) {
    throw Error(ErrorCode::BadScheme, std::string(to_string(c)) + " colour is fixed");
  }
  hues_[static_cast<std::size_t>(c)] = rgb;
  return *this;
}

ColorScheme& ColorScheme::set_shading(Shading s) noexcept {
  shading_ = s;
  return *this;
}

ColorScheme& ColorScheme::set_padding(Rgb rgb) noexcept {
  padding_ = rgb;
  return *this;
}

std::string ColorScheme::serialize() const {
  std::ostringstream os;
  for (const ByteClass c : kAllClasses) {
    os << kClassKeys[static_cast<std::size_t>(c)] << " = " << to_hex(hue(c)) << '\n';
  }
  os << "shading = " << to_string(shading_) << '\n';
  os << "padding = " << to_hex(padding_) << '\n';
  return os.str();
}

ColorScheme ColorScheme::parse(std::string_view text) {
  ColorScheme s = binvis_default();
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto semi = line.find(';'); semi != std::string_view::npos) line = line.substr(0, semi);
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    const auto where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::BadScheme, where + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    if (key == "shading") {
      if (value == "flat") {
        s.shading_ = Shading::Flat;
      } else if (value == "value_scaled") {
        s.shading_ = Shading::ValueScaled;
      } else {
        throw Error(ErrorCode::BadScheme, where + ": unknown shading '" + std::string(value) + "'");
      }
      continue;
    }

    const auto rgb = parse_hex(value);
    if (!rgb) {
      throw Error(ErrorCode::BadScheme, where + ": expected #rrggbb, got '" + std::string(value) + "'");
    }
    if (key == "padding") {
      s.padding_ = *rgb;
      continue;
    }
    bool matched = false;
    for (const ByteClass c : kAllClasses) {
      if (key == kClassKeys[static_cast<std::size_t>(c)]) {
        s.set_hue(c, *rgb);
        matched = true;
      }
    }
    if (!matched) {
      throw Error(ErrorCode::BadScheme, where + ": unknown key '" + std::string(key) + "'");
    }
  }
  s.validate();
  return s;
}

std::string ColorScheme::digest() const {
  return binvis::to_hex(Fnv1a64{}.update(serialize()).value());
}

void ColorScheme::validate() const {
  const ColorTable table = build_color_table(*this);
  for (unsigned b = 0; b < 256; ++b) {
    if (table[b] == padding_) {
      throw Error(ErrorCode::BadScheme, "padding colour " + to_hex(padding_) +
                                            " is produced by byte " + std::to_string(b));
    }
  }
}

Rgb color_of(std::uint8_t b, const ColorScheme& scheme) noexcept {
  const ByteClass c = classify_byte(b);
  const Rgb base = scheme.hue(c);
  if (c == ByteClass::Null || c == ByteClass::NonBreakingSpace ||
      scheme.shading() == Shading::Flat) {
    return base;
  }
  const std::uint8_t level = shade_level(b);
  return {scale(base.r, level), scale(base.g, level), scale(base.b, level)};
}

ColorTable build_color_table(const ColorScheme& scheme) noexcept {
  ColorTable table{};
  for (unsigned b = 0; b < 256; ++b) {
    table[b] = color_of(static_cast<std::uint8_t>(b), scheme);
  }
  return table;
}

}  // namespace binvis::color
