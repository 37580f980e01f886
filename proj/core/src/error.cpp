#include "binvis/error.hpp"

namespace binvis {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::Pcapng: return "Pcapng";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::OversizeRecord: return "OversizeRecord";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::Oversize: return "Oversize";
    case ErrorCode::ChunkTooLarge: return "ChunkTooLarge";
    case ErrorCode::EmptyChunk: return "EmptyChunk";
    case ErrorCode::BadScheme: return "BadScheme";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyManifest: return "EmptyManifest";
    case ErrorCode::BadManifest: return "BadManifest";
    case ErrorCode::MissingPrediction: return "MissingPrediction";
    case ErrorCode::UnknownImage: return "UnknownImage";
    case ErrorCode::DuplicatePrediction: return "DuplicatePrediction";
    case ErrorCode::BadPrediction: return "BadPrediction";
    case ErrorCode::EmptyConfusion: return "EmptyConfusion";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace binvis
