#pragma once

// Classic libpcap capture files and the byte-window chunking that feeds the
// image encoder.
//
// On-disk layout:
//   global header (24 bytes): magic u32, version u16+u16, thiszone i32,
//                             sigfigs u32, snaplen u32, linktype u32
//   record header (16 bytes): ts_sec u32, ts_frac u32, incl_len u32, orig_len u32
//   record body:              incl_len bytes

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace binvis::pcap {

inline constexpr std::uint32_t kMagicMicro = 0xA1B2C3D4;
inline constexpr std::uint32_t kMagicNano = 0xA1B23C4D;
inline constexpr std::uint32_t kPcapngBlockType = 0x0A0D0D0A;
inline constexpr std::size_t kGlobalHeaderSize = 24;
inline constexpr std::size_t kRecordHeaderSize = 16;
inline constexpr std::size_t kDefaultChunkSize = 65536;

/// Byte order of the file relative to the host.
enum class ByteOrder { Native, Swapped };
enum class TimestampPrecision { Micro, Nano };

struct PcapHeader {
  std::uint32_t magic = kMagicMicro;  // resolved, i.e. as the writer saw it
  std::uint16_t version_major = 2;
  std::uint16_t version_minor = 4;
  std::int32_t thiszone = 0;
  std::uint32_t sigfigs = 0;
  std::uint32_t snaplen = 65535;
  std::uint32_t linktype = 1;
  ByteOrder byte_order = ByteOrder::Native;

  [[nodiscard]] TimestampPrecision precision() const noexcept {
    return magic == kMagicNano ? TimestampPrecision::Nano : TimestampPrecision::Micro;
  }
};

struct PcapRecord {
  std::uint32_t ts_sec = 0;
  std::uint32_t ts_frac = 0;  // micro- or nanoseconds, see PcapHeader::precision()
  std::uint32_t incl_len = 0;
  std::uint32_t orig_len = 0;
  std::vector<std::uint8_t> data;
};

struct PcapCapture {
  PcapHeader header;
  std::vector<PcapRecord> records;

  [[nodiscard]] std::uint64_t payload_bytes() const noexcept;
};

/// Incremental reader over a classic pcap stream. The global header is read
/// and validated on construction; records are pulled one at a time.
///
/// Throws binvis::Error with BadMagic, Pcapng, Truncated or OversizeRecord.
/// Messages carry the byte offset at which the problem was found.
class PcapReader {
 public:
  explicit PcapReader(std::istream& in);

  [[nodiscard]] const PcapHeader& header() const noexcept { return header_; }

  /// Next record in file order, or nullopt at a clean end of stream.
  std::optional<PcapRecord> next();

  /// Offset of the next unread byte.
  [[nodiscard]] std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::size_t read_fully(std::span<std::uint8_t> out);
  [[nodiscard]] std::uint32_t u32(const std::uint8_t* p) const noexcept;

  std::istream& in_;
  PcapHeader header_;
  std::uint64_t offset_ = 0;
};

PcapCapture parse_pcap(std::istream& in);
PcapCapture parse_pcap(std::span<const std::uint8_t> bytes);
PcapCapture read_pcap_file(const std::filesystem::path& path);

/// A contiguous window of the concatenated record payloads.
struct Chunk {
  std::string source_id;
  std::size_t index = 0;
  std::uint64_t offset = 0;
  std::vector<std::uint8_t> bytes;
};

/// Splits a byte stream fed in arbitrary pieces into chunk_size windows.
/// Full windows are handed to the sink as soon as they fill; finish() flushes
/// the trailing partial window, if any.
class Chunker {
 public:
  using Sink = std::function<void(Chunk&&)>;

  Chunker(std::string source_id, std::size_t chunk_size, Sink sink);

  void feed(std::span<const std::uint8_t> bytes);
  void finish();

  [[nodiscard]] std::size_t chunks_emitted() const noexcept { return next_index_; }

 private:
  void emit();

  std::string source_id_;
  std::size_t chunk_size_;
  Sink sink_;
  std::vector<std::uint8_t> pending_;
  std::size_t next_index_ = 0;
  std::uint64_t next_offset_ = 0;
};

/// Concatenate record payloads and split them into chunk_size windows. The
/// last window may be short; an empty input gives no chunks.
std::vector<Chunk> chunk_stream(std::span<const PcapRecord> records, std::size_t chunk_size,
                                const std::string& source_id = {});

/// Number of chunks chunk_stream would produce for payload_bytes of data.
[[nodiscard]] constexpr std::uint64_t chunk_count(std::uint64_t payload_bytes,
                                                  std::size_t chunk_size) noexcept {
  return chunk_size == 0 ? 0 : (payload_bytes + chunk_size - 1) / chunk_size;
}

}  // namespace binvis::pcap
