#include "binvis/png_io.hpp"

#include <png.h>
#include <zlib.h>

#include <bit>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

#include "binvis/error.hpp"

namespace binvis::image {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  return f;
}

// Kept free of objects with destructors: libpng reports errors by longjmp.
bool write_rows(std::FILE* fp, std::uint32_t width, std::uint32_t height, png_bytep* rows,
                png_textp text, int text_count) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_compression_level(png, 9);
  png_set_compression_mem_level(png, 8);
  png_set_compression_strategy(png, Z_DEFAULT_STRATEGY);
  png_set_compression_window_bits(png, 15);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_BASE, PNG_FILTER_TYPE_BASE);
  png_set_text(png, info, text, text_count);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  return true;
}

struct RawRead {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;
  std::vector<std::pair<std::string, std::string>> text;
};

bool read_rows(std::FILE* fp, RawRead* out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  if ((color_type & PNG_COLOR_MASK_ALPHA) != 0) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  out->width = png_get_image_width(png, info);
  out->height = png_get_image_height(png, info);
  out->channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out->data.resize(stride * out->height);
  std::vector<png_bytep> rows(out->height);
  for (png_uint_32 y = 0; y < out->height; ++y) {
    rows[y] = out->data.data() + stride * y;
  }
  png_read_image(png, rows.data());
  png_read_end(png, info);

  png_textp text = nullptr;
  int count = 0;
  png_get_text(png, info, &text, &count);
  for (int i = 0; i < count; ++i) {
    out->text.emplace_back(text[i].key, std::string(text[i].text, text[i].text_length));
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

}  // namespace

void write_png(const EncodedImage& image, const std::filesystem::path& path) {
  if (image.pixels.size() != std::size_t{image.width} * image.height || image.width == 0) {
    throw Error(ErrorCode::IoError, "image buffer does not match its dimensions");
  }

  std::vector<png_bytep> rows(image.height);
  auto* base = reinterpret_cast<png_bytep>(const_cast<color::Rgb*>(image.pixels.data()));
  for (std::uint32_t y = 0; y < image.height; ++y) {
    rows[y] = base + std::size_t{y} * image.width * 3;
  }

  std::vector<std::pair<std::string, std::string>> fields{
      {"source", image.meta.source_id},
      {"chunk", std::to_string(image.meta.chunk_index)},
      {"layout", std::string(curve::to_string(image.meta.layout))},
      {"scheme", image.meta.scheme_digest},
  };
  std::vector<png_text> text(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    text[i].compression = PNG_TEXT_COMPRESSION_NONE;
    text[i].key = fields[i].first.data();
    text[i].text = fields[i].second.data();
    text[i].text_length = fields[i].second.size();
  }

  auto fp = open_file(path, "wb");
  if (!write_rows(fp.get(), image.width, image.height, rows.data(), text.data(),
                  static_cast<int>(text.size()))) {
    throw Error(ErrorCode::IoError, "libpng failed writing " + path.string());
  }
  if (std::fflush(fp.get()) != 0) {
    throw Error(ErrorCode::IoError, "flush failed for " + path.string());
  }
}

DecodedPng read_png(const std::filesystem::path& path) {
  auto fp = open_file(path, "rb");
  RawRead raw;
  if (!read_rows(fp.get(), &raw) || raw.channels != 3) {
    throw Error(ErrorCode::IoError, "cannot decode " + path.string() + " as RGB PNG");
  }

  DecodedPng out;
  out.image.width = raw.width;
  out.image.height = raw.height;
  out.image.pixels.resize(std::size_t{raw.width} * raw.height);
  for (std::size_t i = 0; i < out.image.pixels.size(); ++i) {
    out.image.pixels[i] = {raw.data[3 * i], raw.data[3 * i + 1], raw.data[3 * i + 2]};
  }
  for (auto& [k, v] : raw.text) {
    out.text[k] = v;
  }

  auto& meta = out.image.meta;
  if (auto it = out.text.find("source"); it != out.text.end()) meta.source_id = it->second;
  if (auto it = out.text.find("chunk"); it != out.text.end()) {
    meta.chunk_index = static_cast<std::size_t>(std::stoull(it->second));
  }
  if (auto it = out.text.find("layout"); it != out.text.end()) {
    meta.layout = it->second == "scanline" ? curve::CurveKind::Scanline : curve::CurveKind::Hilbert;
  }
  if (auto it = out.text.find("scheme"); it != out.text.end()) meta.scheme_digest = it->second;
  if (raw.width == raw.height && std::has_single_bit(raw.width)) {
    meta.order = static_cast<unsigned>(std::countr_zero(raw.width));
  }
  return out;
}

}  // namespace binvis::image
