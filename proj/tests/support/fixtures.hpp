#pragma once

// Test-only helpers: a pcap writer that shares no code with the parser, a
// minimal PNG decoder on raw zlib, and scratch directories.

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace binvis::testing {

struct FixturePacket {
  std::uint32_t ts_sec = 1;
  std::uint32_t ts_frac = 0;
  std::vector<std::uint8_t> data;
  std::uint32_t orig_len = 0;  // 0: same as data.size()
};

struct FixtureOptions {
  bool big_endian = false;
  bool nanosecond = false;
  std::uint32_t snaplen = 262144;
  std::uint32_t linktype = 1;
};

std::vector<std::uint8_t> make_pcap(const std::vector<FixturePacket>& packets,
                                    const FixtureOptions& opts = {});
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// n packets with random lengths in [min_len, max_len] and random bytes.
std::vector<FixturePacket> random_packets(std::mt19937_64& rng, std::size_t n, std::size_t min_len,
                                          std::size_t max_len);

/// One packet per slice of payload.
std::vector<FixturePacket> packets_from_payload(const std::vector<std::uint8_t>& payload,
                                                std::size_t packet_len);

struct DecodedRgb {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
  std::map<std::string, std::string> text;
};

/// Decodes 8-bit RGB, non-interlaced PNGs. Throws std::runtime_error.
DecodedRgb decode_png_with_zlib(const std::vector<std::uint8_t>& file);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

}  // namespace binvis::testing
