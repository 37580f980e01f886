#include "fixtures.hpp"

#include <zlib.h>

#include <atomic>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <unistd.h>

namespace binvis::testing {
namespace {

void put32(std::vector<std::uint8_t>& out, std::uint32_t v, bool big) {
  for (int i = 0; i < 4; ++i) {
    const int shift = big ? 8 * (3 - i) : 8 * i;
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v, bool big) {
  if (big) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
  } else {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  }
}

std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         p[3];
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  return pb <= pc ? b : c;
}

}  // namespace

std::vector<std::uint8_t> make_pcap(const std::vector<FixturePacket>& packets,
                                    const FixtureOptions& opts) {
  std::vector<std::uint8_t> out;
  const bool big = opts.big_endian;
  put32(out, opts.nanosecond ? 0xA1B23C4D : 0xA1B2C3D4, big);
  put16(out, 2, big);
  put16(out, 4, big);
  put32(out, 0, big);
  put32(out, 0, big);
  put32(out, opts.snaplen, big);
  put32(out, opts.linktype, big);
  for (const auto& p : packets) {
    const auto len = static_cast<std::uint32_t>(p.data.size());
    put32(out, p.ts_sec, big);
    put32(out, p.ts_frac, big);
    put32(out, len, big);
    put32(out, p.orig_len == 0 ? len : p.orig_len, big);
    out.insert(out.end(), p.data.begin(), p.data.end());
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<FixturePacket> random_packets(std::mt19937_64& rng, std::size_t n, std::size_t min_len,
                                          std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<FixturePacket> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].ts_sec = static_cast<std::uint32_t>(1600000000 + i);
    out[i].ts_frac = static_cast<std::uint32_t>(i * 7);
    out[i].data.resize(len(rng));
    for (auto& b : out[i].data) b = static_cast<std::uint8_t>(byte(rng));
  }
  return out;
}

std::vector<FixturePacket> packets_from_payload(const std::vector<std::uint8_t>& payload,
                                                std::size_t packet_len) {
  std::vector<FixturePacket> out;
  for (std::size_t off = 0; off < payload.size(); off += packet_len) {
    const std::size_t end = std::min(payload.size(), off + packet_len);
    FixturePacket p;
    p.data.assign(payload.begin() + static_cast<std::ptrdiff_t>(off),
                  payload.begin() + static_cast<std::ptrdiff_t>(end));
    out.push_back(std::move(p));
  }
  return out;
}

DecodedRgb decode_png_with_zlib(const std::vector<std::uint8_t>& file) {
  static const std::uint8_t kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (file.size() < 8 || !std::equal(kSig, kSig + 8, file.begin())) {
    throw std::runtime_error("not a PNG");
  }
  DecodedRgb out;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  while (pos + 12 <= file.size()) {
    const std::uint32_t len = be32(&file[pos]);
    const std::string type(reinterpret_cast<const char*>(&file[pos + 4]), 4);
    const std::uint8_t* body = &file[pos + 8];
    if (pos + 12 + len > file.size()) throw std::runtime_error("chunk overruns file");
    const auto crc = static_cast<std::uint32_t>(crc32(crc32(0, &file[pos + 4], 4), body, len));
    if (crc != be32(body + len)) throw std::runtime_error("bad CRC in " + type);
    if (type == "IHDR") {
      out.width = be32(body);
      out.height = be32(body + 4);
      if (body[8] != 8 || body[9] != 2 || body[12] != 0) {
        throw std::runtime_error("only 8-bit RGB non-interlaced supported");
      }
    } else if (type == "IDAT") {
      idat.insert(idat.end(), body, body + len);
    } else if (type == "tEXt") {
      const std::string s(reinterpret_cast<const char*>(body), len);
      const auto nul = s.find('\0');
      out.text[s.substr(0, nul)] = s.substr(nul + 1);
    } else if (type == "IEND") {
      break;
    }
    pos += 12 + len;
  }

  const std::size_t stride = std::size_t{out.width} * 3;
  std::vector<std::uint8_t> raw((stride + 1) * out.height);
  uLongf raw_len = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      raw_len != raw.size()) {
    throw std::runtime_error("inflate failed");
  }

  out.rgb.assign(stride * out.height, 0);
  for (std::size_t y = 0; y < out.height; ++y) {
    const std::uint8_t filter = raw[y * (stride + 1)];
    const std::uint8_t* src = &raw[y * (stride + 1) + 1];
    std::uint8_t* dst = &out.rgb[y * stride];
    const std::uint8_t* up = y > 0 ? &out.rgb[(y - 1) * stride] : nullptr;
    for (std::size_t i = 0; i < stride; ++i) {
      const int a = i >= 3 ? dst[i - 3] : 0;
      const int b = up != nullptr ? up[i] : 0;
      const int c = (up != nullptr && i >= 3) ? up[i - 3] : 0;
      int pred = 0;
      switch (filter) {
        case 0: pred = 0; break;
        case 1: pred = a; break;
        case 2: pred = b; break;
        case 3: pred = (a + b) / 2; break;
        case 4: pred = paeth(a, b, c); break;
        default: throw std::runtime_error("bad filter type");
      }
      dst[i] = static_cast<std::uint8_t>(src[i] + pred);
    }
  }
  return out;
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("binvis-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace binvis::testing
