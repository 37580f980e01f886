#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace binvis {

enum class ErrorCode {
  // pcap
  BadMagic,
  Pcapng,
  BadHeader,
  Truncated,
  OversizeRecord,
  // layout / encoder
  IndexOutOfRange,
  Oversize,
  ChunkTooLarge,
  EmptyChunk,
  // colour scheme config
  BadScheme,
  // dataset
  EmptyCorpus,
  EmptyManifest,
  BadManifest,
  // evaluation
  MissingPrediction,
  UnknownImage,
  DuplicatePrediction,
  BadPrediction,
  EmptyConfusion,
  // io
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix, for re-wrapping with more context.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace binvis
