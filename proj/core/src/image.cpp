#include "binvis/image.hpp"

#include <cctype>

#include "binvis/error.hpp"

namespace binvis::image {

static_assert(sizeof(color::Rgb) == 3, "pixel buffers are written to PNG rows verbatim");

unsigned choose_order(std::uint64_t data_len) {
  if (data_len == 0) {
    throw Error(ErrorCode::EmptyChunk, "cannot size an image for zero bytes");
  }
  if (data_len > kMaxChunkBytes) {
    throw Error(ErrorCode::Oversize, std::to_string(data_len) + " bytes exceed the order-8 grid (" +
                                         std::to_string(kMaxChunkBytes) + ")");
  }
  unsigned order = 1;
  while ((std::uint64_t{1} << (2 * order)) < data_len) {
    ++order;
  }
  return order;
}

Encoder::Encoder(curve::CurveLayout layout, const color::ColorScheme& scheme)
    : layout_(std::move(layout)),
      table_(color::build_color_table(scheme)),
      padding_(scheme.padding()),
      digest_(scheme.digest()) {}

EncodedImage Encoder::encode(const pcap::Chunk& chunk) const {
  if (chunk.bytes.empty()) {
    throw Error(ErrorCode::EmptyChunk, "chunk " + std::to_string(chunk.index) + " of '" +
                                           chunk.source_id + "' is empty");
  }
  if (chunk.bytes.size() > layout_.capacity()) {
    throw Error(ErrorCode::ChunkTooLarge, std::to_string(chunk.bytes.size()) +
                                              " bytes exceed layout capacity " +
                                              std::to_string(layout_.capacity()));
  }

  EncodedImage img;
  img.width = layout_.width();
  img.height = layout_.height();
  img.pixels.assign(layout_.capacity(), padding_);
  img.meta = {chunk.source_id, chunk.index, layout_.kind(), layout_.order(), digest_};

  const auto cells = layout_.table();
  for (std::size_t d = 0; d < chunk.bytes.size(); ++d) {
    const curve::Point p = cells[d];
    img.pixels[std::size_t{p.y} * img.width + p.x] = table_[chunk.bytes[d]];
  }
  return img;
}

EncodedImage encode_chunk(const pcap::Chunk& chunk, const curve::CurveLayout& layout,
                          const color::ColorScheme& scheme) {
  return Encoder(layout, scheme).encode(chunk);
}

std::string image_filename(const ImageMeta& meta) {
  return meta.source_id + "__" + std::to_string(meta.chunk_index) + "__" +
         std::string(curve::to_string(meta.layout)) + "__o" + std::to_string(meta.order) + ".png";
}

std::string sanitize_source_id(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (const char c : raw) {
    const auto u = static_cast<unsigned char>(c);
    out += (std::isalnum(u) != 0 || c == '-' || c == '.') ? c : '_';
  }
  return out.empty() ? std::string("capture") : out;
}

}  // namespace binvis::image
