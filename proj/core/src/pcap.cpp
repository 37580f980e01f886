#include "binvis/pcap.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <utility>

#include "binvis/error.hpp"

namespace binvis::pcap {
namespace {

std::uint32_t load_le32(const std::uint8_t* p) noexcept {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

std::uint32_t load_be32(const std::uint8_t* p) noexcept {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

std::string at(std::uint64_t offset) { return " at byte offset " + std::to_string(offset); }

// Host-independent view of where a file's integers sit.
bool file_is_little_endian(const PcapHeader& h) noexcept {
  const bool host_little = std::endian::native == std::endian::little;
  return (h.byte_order == ByteOrder::Native) == host_little;
}

}  // namespace

std::uint64_t PcapCapture::payload_bytes() const noexcept {
  return std::accumulate(records.begin(), records.end(), std::uint64_t{0},
                         [](std::uint64_t acc, const PcapRecord& r) { return acc + r.data.size(); });
}

PcapReader::PcapReader(std::istream& in) : in_(in) {
  std::array<std::uint8_t, kGlobalHeaderSize> raw{};
  const std::size_t got = read_fully(raw);
  if (got < 4) {
    throw Error(ErrorCode::Truncated, "stream ends inside the global header" + at(got));
  }

  const std::uint32_t le = load_le32(raw.data());
  const std::uint32_t be = load_be32(raw.data());
  bool little = false;
  if (le == kMagicMicro || le == kMagicNano) {
    little = true;
    header_.magic = le;
  } else if (be == kMagicMicro || be == kMagicNano) {
    header_.magic = be;
  } else if (le == kPcapngBlockType) {
    throw Error(ErrorCode::Pcapng, "pcapng files are not supported; convert to classic pcap");
  } else {
    std::ostringstream os;
    os << "unknown magic 0x" << std::hex << be << at(0);
    throw Error(ErrorCode::BadMagic, os.str());
  }
  if (got < kGlobalHeaderSize) {
    throw Error(ErrorCode::Truncated, "stream ends inside the global header" + at(got));
  }

  const bool host_little = std::endian::native == std::endian::little;
  header_.byte_order = little == host_little ? ByteOrder::Native : ByteOrder::Swapped;

  const std::uint8_t* p = raw.data();
  const auto u16 = [&](std::size_t off) -> std::uint16_t {
    return little ? static_cast<std::uint16_t>(p[off] | (p[off + 1] << 8))
                  : static_cast<std::uint16_t>((p[off] << 8) | p[off + 1]);
  };
  header_.version_major = u16(4);
  header_.version_minor = u16(6);
  header_.thiszone = static_cast<std::int32_t>(u32(p + 8));
  header_.sigfigs = u32(p + 12);
  header_.snaplen = u32(p + 16);
  header_.linktype = u32(p + 20);
  if (header_.snaplen == 0) {
    throw Error(ErrorCode::BadHeader, "global header declares snaplen 0" + at(16));
  }
}

std::uint32_t PcapReader::u32(const std::uint8_t* p) const noexcept {
  return file_is_little_endian(header_) ? load_le32(p) : load_be32(p);
}

std::size_t PcapReader::read_fully(std::span<std::uint8_t> out) {
  in_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
  const auto got = static_cast<std::size_t>(in_.gcount());
  offset_ += got;
  return got;
}

std::optional<PcapRecord> PcapReader::next() {
  const std::uint64_t record_start = offset_;
  std::array<std::uint8_t, kRecordHeaderSize> raw{};
  const std::size_t got = read_fully(raw);
  if (got == 0) {
    return std::nullopt;
  }
  if (got < raw.size()) {
    throw Error(ErrorCode::Truncated, "stream ends inside a record header" + at(record_start));
  }

  PcapRecord rec;
  rec.ts_sec = u32(raw.data());
  rec.ts_frac = u32(raw.data() + 4);
  rec.incl_len = u32(raw.data() + 8);
  rec.orig_len = u32(raw.data() + 12);
  if (rec.incl_len > header_.snaplen) {
    throw Error(ErrorCode::OversizeRecord, "incl_len " + std::to_string(rec.incl_len) +
                                               " exceeds snaplen " +
                                               std::to_string(header_.snaplen) + at(record_start));
  }

  rec.data.resize(rec.incl_len);
  const std::size_t body = read_fully(rec.data);
  if (body < rec.incl_len) {
    throw Error(ErrorCode::Truncated, "record claims " + std::to_string(rec.incl_len) +
                                          " bytes but only " + std::to_string(body) +
                                          " remain" + at(record_start));
  }
  return rec;
}

PcapCapture parse_pcap(std::istream& in) {
  PcapReader reader(in);
  PcapCapture capture{reader.header(), {}};
  while (auto rec = reader.next()) {
    capture.records.push_back(std::move(*rec));
  }
  return capture;
}

PcapCapture parse_pcap(std::span<const std::uint8_t> bytes) {
  std::istringstream in(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  return parse_pcap(in);
}

PcapCapture read_pcap_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  try {
    return parse_pcap(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

Chunker::Chunker(std::string source_id, std::size_t chunk_size, Sink sink)
    : source_id_(std::move(source_id)), chunk_size_(std::max<std::size_t>(chunk_size, 1)),
      sink_(std::move(sink)) {
  pending_.reserve(chunk_size_);
}

void Chunker::feed(std::span<const std::uint8_t> bytes) {
  while (!bytes.empty()) {
    const std::size_t take = std::min(bytes.size(), chunk_size_ - pending_.size());
    pending_.insert(pending_.end(), bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(take));
    bytes = bytes.subspan(take);
    if (pending_.size() == chunk_size_) {
      emit();
    }
  }
}

void Chunker::finish() {
  if (!pending_.empty()) {
    emit();
  }
}

void Chunker::emit() {
  Chunk chunk{source_id_, next_index_, next_offset_, std::move(pending_)};
  ++next_index_;
  next_offset_ += chunk.bytes.size();
  pending_ = {};
  pending_.reserve(chunk_size_);
  sink_(std::move(chunk));
}

std::vector<Chunk> chunk_stream(std::span<const PcapRecord> records, std::size_t chunk_size,
                                const std::string& source_id) {
  std::vector<Chunk> out;
  Chunker chunker(source_id, chunk_size, [&out](Chunk&& c) { out.push_back(std::move(c)); });
  for (const auto& rec : records) {
    chunker.feed(rec.data);
  }
  chunker.finish();
  return out;
}

}  // namespace binvis::pcap
