#pragma once

// Subcommand implementations behind the `binvis` executable. Each takes a
// fully resolved configuration and writes its human report to `out`.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "binvis/colormap.hpp"
#include "binvis/curve.hpp"
#include "binvis/error.hpp"

namespace binvis::cli {

/// Process exit statuses.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInputFormat = 2,
  kExitEvalContract = 3,
};

[[nodiscard]] int exit_code_for(ErrorCode code) noexcept;

struct PipelineConfig {
  std::size_t chunk_size = 65536;
  curve::CurveKind layout = curve::CurveKind::Hilbert;
  std::optional<unsigned> order;  // nullopt: choose_order(chunk_size)
  color::ColorScheme scheme = color::ColorScheme::binvis_default();
  std::uint64_t seed = 0;
  double train_ratio = 0.8;
  bool split_by_source = false;
  unsigned jobs = 1;
  std::filesystem::path output_dir = "binvis-out";

  /// Throws Error(Oversize / ChunkTooLarge) or std::invalid_argument.
  void validate() const;
  /// Image order for this run.
  [[nodiscard]] unsigned resolved_order() const;
  /// Effective configuration, one JSON object, stable key order.
  [[nodiscard]] std::string to_json(const std::string& command) const;
};

struct EncodeReport {
  std::string source_id;
  std::size_t records = 0;
  std::size_t records_truncated = 0;  // incl_len < orig_len
  std::uint64_t payload_bytes = 0;
  std::size_t images = 0;
  unsigned order = 0;
};

EncodeReport cmd_encode(const std::filesystem::path& pcap_path, const PipelineConfig& config,
                        std::ostream& out);

struct InspectReport {
  std::uint64_t total_bytes = 0;
  std::array<std::uint64_t, 5> class_counts{};  // indexed by color::ByteClass
  [[nodiscard]] double fraction(color::ByteClass c) const;
  /// Share of non-padding pixels that render pure black or pure white.
  [[nodiscard]] double black_white_fraction() const;
};

InspectReport cmd_inspect(const std::filesystem::path& pcap_path, bool json, std::ostream& out);

void cmd_curve_dump(curve::CurveKind kind, unsigned order, std::ostream& out);

void cmd_build_dataset(const std::filesystem::path& normal_dir,
                       const std::filesystem::path& malware_dir, const PipelineConfig& config,
                       std::ostream& out);

/// Prints the text report followed by one JSON line. Contract violations
/// propagate as binvis::Error.
void cmd_eval(const std::filesystem::path& manifest, const std::filesystem::path& predictions,
              double threshold, const std::optional<std::filesystem::path>& json_out,
              std::ostream& out);

}  // namespace binvis::cli
