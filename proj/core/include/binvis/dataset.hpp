#pragma once

// Labelled image datasets: walk a normal and a malware capture tree, encode
// every chunk, and record each image in a line-delimited JSON manifest with a
// reproducible train/test split.
//
// Manifest line (fields in this order):
//   {"image_path":..., "label":"normal"|"malware", "malware_family":str|null,
//    "source_pcap":..., "chunk_index":n, "split":"train"|"test"}

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "binvis/colormap.hpp"
#include "binvis/curve.hpp"

namespace binvis::dataset {

enum class Label { Normal, Malware };
enum class Split { Train, Test };

std::string_view to_string(Label label) noexcept;
std::string_view to_string(Split split) noexcept;
std::optional<Label> parse_label(std::string_view text) noexcept;
std::optional<Split> parse_split(std::string_view text) noexcept;

struct ManifestEntry {
  std::string image_path;  // relative to the dataset root
  Label label = Label::Normal;
  std::optional<std::string> malware_family;
  std::string source_pcap;  // "<label>/<path under that label's root>"
  std::size_t chunk_index = 0;
  Split split = Split::Train;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

using Manifest = std::vector<ManifestEntry>;

void write_manifest(std::ostream& out, const Manifest& manifest);
/// Throws Error(BadManifest) naming the offending line.
Manifest read_manifest(std::istream& in);
Manifest read_manifest_file(const std::filesystem::path& path);

struct FamilyShare {
  std::size_t count = 0;
  double percent = 0.0;
};

struct DatasetSummary {
  std::size_t total = 0;
  std::map<Label, std::size_t> by_label;
  std::map<Split, std::size_t> by_split;
  std::map<std::pair<Label, Split>, std::size_t> by_label_split;
  /// Over the malware subset only; empty when there is no malware.
  /// Malware entries without a family are counted under "unspecified".
  std::map<std::string, FamilyShare> families;

  // Filled by build_dataset only.
  std::size_t files_scanned = 0;
  std::size_t files_without_payload = 0;
  std::vector<std::pair<std::string, std::string>> file_errors;  // source, message

  [[nodiscard]] double split_percent(Split s) const;
};

/// Throws Error(EmptyManifest).
[[nodiscard]] DatasetSummary summarize(const Manifest& manifest);

std::string format_summary(const DatasetSummary& summary);
std::string summary_json(const DatasetSummary& summary);

struct DatasetConfig {
  std::size_t chunk_size = 65536;
  curve::CurveKind layout = curve::CurveKind::Hilbert;
  /// nullopt: choose_order(chunk_size), shared by every image of the run.
  std::optional<unsigned> order;
  color::ColorScheme scheme = color::ColorScheme::binvis_default();
  std::uint64_t seed = 0;
  double train_ratio = 0.8;
  bool split_by_source = false;
  unsigned jobs = 1;
};

/// Hash of (seed, source_pcap, chunk_index) that orders entries for the split.
[[nodiscard]] std::uint64_t split_key(std::uint64_t seed, std::string_view source_pcap,
                                      std::size_t chunk_index) noexcept;

/// Assigns exactly round(train_ratio * n) entries to train (chunk mode):
/// entries are ranked by split_key and the lowest ranks go to train. The
/// result depends only on the set of (source_pcap, chunk_index) pairs, never
/// on their order in the input. In source mode whole captures are ranked and
/// taken into train until the target count is reached.
void assign_splits(Manifest& manifest, std::uint64_t seed, double train_ratio,
                   bool split_by_source);

struct BuildResult {
  Manifest manifest;
  DatasetSummary summary;
};

/// Encodes every capture under the two roots into output_dir/images/<label>/
/// and writes output_dir/manifest.jsonl and output_dir/summary.json.
/// Captures that fail to parse are skipped and listed in the summary.
/// Throws Error(EmptyCorpus) when no image could be produced, and
/// Error(IoError) if output_dir/images exists without a manifest beside it.
BuildResult build_dataset(const std::filesystem::path& normal_dir,
                          const std::filesystem::path& malware_dir,
                          const std::filesystem::path& output_dir, const DatasetConfig& config);

/// Sorted capture files (.pcap / .cap, any case) below root.
std::vector<std::filesystem::path> discover_captures(const std::filesystem::path& root);

}  // namespace binvis::dataset
