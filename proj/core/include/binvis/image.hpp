#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "binvis/colormap.hpp"
#include "binvis/curve.hpp"
#include "binvis/pcap.hpp"

namespace binvis::image {

inline constexpr unsigned kMaxOrder = 8;
inline constexpr std::uint64_t kMaxChunkBytes = std::uint64_t{1} << (2 * kMaxOrder);

/// Smallest k with 4^k >= data_len. Throws EmptyChunk for 0 and Oversize
/// above 4^8.
[[nodiscard]] unsigned choose_order(std::uint64_t data_len);

struct ImageMeta {
  std::string source_id;
  std::size_t chunk_index = 0;
  curve::CurveKind layout = curve::CurveKind::Hilbert;
  unsigned order = 0;
  std::string scheme_digest;
};

/// Row-major RGB grid.
struct EncodedImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<color::Rgb> pixels;
  ImageMeta meta;

  [[nodiscard]] color::Rgb at(std::uint32_t x, std::uint32_t y) const {
    return pixels[std::size_t{y} * width + x];
  }
};

/// Encodes chunks against one layout and scheme. Holds the colour table and
/// digest so repeated calls skip the per-byte classification.
class Encoder {
 public:
  Encoder(curve::CurveLayout layout, const color::ColorScheme& scheme);

  /// pixel(layout(d)) = colour(byte d); cells past the chunk get the padding
  /// colour. Throws EmptyChunk or ChunkTooLarge.
  [[nodiscard]] EncodedImage encode(const pcap::Chunk& chunk) const;

  [[nodiscard]] const curve::CurveLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] const std::string& scheme_digest() const noexcept { return digest_; }

 private:
  curve::CurveLayout layout_;
  color::ColorTable table_;
  color::Rgb padding_;
  std::string digest_;
};

[[nodiscard]] EncodedImage encode_chunk(const pcap::Chunk& chunk, const curve::CurveLayout& layout,
                                        const color::ColorScheme& scheme);

/// "<source_id>__<chunk_index>__<layout>__o<order>.png"
[[nodiscard]] std::string image_filename(const ImageMeta& meta);

/// Replace characters that are awkward in file names with '_'.
[[nodiscard]] std::string sanitize_source_id(std::string_view raw);

}  // namespace binvis::image
