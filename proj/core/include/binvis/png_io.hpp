#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "binvis/image.hpp"

namespace binvis::image {

/// 8-bit RGB PNG with tEXt chunks source/chunk/layout/scheme. Compression is
/// pinned (zlib level 9, no row filter, no timestamp chunk) so equal images
/// give byte-identical files. Throws Error(IoError).
void write_png(const EncodedImage& image, const std::filesystem::path& path);

struct DecodedPng {
  EncodedImage image;  // meta filled from the text chunks when present
  std::map<std::string, std::string> text;
};

/// Reads any 8-bit RGB or RGBA PNG (alpha discarded). Throws Error(IoError).
DecodedPng read_png(const std::filesystem::path& path);

}  // namespace binvis::image
