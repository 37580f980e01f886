#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace binvis {

/// 64-bit FNV-1a. Stable across platforms and runs, which is all the
/// dataset split and scheme digest need.
class Fnv1a64 {
 public:
  static constexpr std::uint64_t kOffsetBasis = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

  constexpr Fnv1a64& update(std::string_view bytes) noexcept {
    for (const char c : bytes) {
      state_ ^= static_cast<std::uint8_t>(c);
      state_ *= kPrime;
    }
    return *this;
  }

  // Little-endian, fixed width.
  constexpr Fnv1a64& update(std::uint64_t value) noexcept {
    for (int i = 0; i < 8; ++i) {
      state_ ^= (value >> (8 * i)) & 0xFF;
      state_ *= kPrime;
    }
    return *this;
  }

  [[nodiscard]] constexpr std::uint64_t value() const noexcept { return state_; }

 private:
  std::uint64_t state_ = kOffsetBasis;
};

std::string to_hex(std::uint64_t value);

}  // namespace binvis
