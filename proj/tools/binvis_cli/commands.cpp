#include "binvis_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "binvis/dataset.hpp"
#include "binvis/eval.hpp"
#include "binvis/image.hpp"
#include "binvis/pcap.hpp"
#include "binvis/png_io.hpp"

namespace binvis::cli {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
}

// run-config.json and scheme.txt accompany every output directory.
void write_provenance(const PipelineConfig& config, const std::string& command) {
  fs::create_directories(config.output_dir);
  write_text(config.output_dir / "run-config.json", config.to_json(command) + "\n");
  write_text(config.output_dir / "scheme.txt", config.scheme.serialize());
}

curve::CurveLayout make_layout(curve::CurveKind kind, unsigned order) {
  return kind == curve::CurveKind::Hilbert ? curve::CurveLayout::hilbert(order)
                                           : curve::CurveLayout::scanline_square(order);
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::Oversize:
    case ErrorCode::ChunkTooLarge:
      return kExitUsage;
    case ErrorCode::MissingPrediction:
    case ErrorCode::UnknownImage:
    case ErrorCode::DuplicatePrediction:
    case ErrorCode::BadPrediction:
    case ErrorCode::EmptyConfusion:
      return kExitEvalContract;
    default:
      return kExitInputFormat;
  }
}

void PipelineConfig::validate() const {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw std::invalid_argument("train ratio must lie strictly between 0 and 1");
  }
  if (chunk_size == 0) {
    throw std::invalid_argument("chunk size must be at least 1");
  }
  const unsigned k = resolved_order();
  if (k < 1 || k > image::kMaxOrder) {
    throw Error(ErrorCode::Oversize, "order " + std::to_string(k) + " outside [1, 8]");
  }
  if (chunk_size > (std::uint64_t{1} << (2 * k))) {
    throw Error(ErrorCode::ChunkTooLarge, "chunk size " + std::to_string(chunk_size) +
                                              " exceeds the " + std::to_string(1U << k) + "x" +
                                              std::to_string(1U << k) + " grid");
  }
}

unsigned PipelineConfig::resolved_order() const {
  return order.value_or(image::choose_order(chunk_size));
}

std::string PipelineConfig::to_json(const std::string& command) const {
  ordered_json j;
  j["command"] = command;
  j["chunk_size"] = chunk_size;
  j["layout"] = curve::to_string(layout);
  j["order"] = resolved_order();
  j["order_policy"] = order ? "fixed" : "auto";
  j["shading"] = color::to_string(scheme.shading());
  j["scheme_digest"] = scheme.digest();
  j["seed"] = seed;
  j["train_ratio"] = train_ratio;
  j["split_by_source"] = split_by_source;
  return j.dump(2);
}

EncodeReport cmd_encode(const fs::path& pcap_path, const PipelineConfig& config,
                        std::ostream& out) {
  config.validate();
  const pcap::PcapCapture capture = pcap::read_pcap_file(pcap_path);

  EncodeReport report;
  report.source_id = image::sanitize_source_id(pcap_path.stem().string());
  report.records = capture.records.size();
  report.records_truncated = static_cast<std::size_t>(
      std::count_if(capture.records.begin(), capture.records.end(),
                    [](const pcap::PcapRecord& r) { return r.incl_len < r.orig_len; }));
  report.payload_bytes = capture.payload_bytes();
  report.order = config.resolved_order();

  const std::vector<pcap::Chunk> chunks =
      pcap::chunk_stream(capture.records, config.chunk_size, report.source_id);
  const image::Encoder encoder(make_layout(config.layout, report.order), config.scheme);

  write_provenance(config, "encode");

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < chunks.size(); i = next++) {
      const image::EncodedImage img = encoder.encode(chunks[i]);
      image::write_png(img, config.output_dir / image::image_filename(img.meta));
    }
  };
  {
    const unsigned jobs = std::max(1U, std::min<unsigned>(config.jobs, static_cast<unsigned>(chunks.size())));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }
  report.images = chunks.size();

  ordered_json j;
  j["source"] = pcap_path.string();
  j["source_id"] = report.source_id;
  j["records"] = report.records;
  j["records_truncated"] = report.records_truncated;
  j["payload_bytes"] = report.payload_bytes;
  j["images"] = report.images;
  j["layout"] = curve::to_string(config.layout);
  j["order"] = report.order;
  write_text(config.output_dir / "encode-report.jsonl", j.dump() + "\n");

  out << pcap_path.string() << ": " << report.records << " records, " << report.payload_bytes
      << " payload bytes -> " << report.images << " images (" << curve::to_string(config.layout)
      << ", order " << report.order << ") in " << config.output_dir.string() << '\n';
  if (report.records_truncated > 0) {
    out << "  " << report.records_truncated << " records were cut short by the capture snaplen\n";
  }
  return report;
}

double InspectReport::fraction(color::ByteClass c) const {
  if (total_bytes == 0) return 0.0;
  return static_cast<double>(class_counts[static_cast<std::size_t>(c)]) /
         static_cast<double>(total_bytes);
}

double InspectReport::black_white_fraction() const {
  return fraction(color::ByteClass::Null) + fraction(color::ByteClass::NonBreakingSpace);
}

InspectReport cmd_inspect(const fs::path& pcap_path, bool json, std::ostream& out) {
  std::ifstream in(pcap_path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + pcap_path.string());
  }
  InspectReport report;
  try {
    pcap::PcapReader reader(in);
    while (auto rec = reader.next()) {
      for (const std::uint8_t b : rec->data) {
        ++report.class_counts[static_cast<std::size_t>(color::classify_byte(b))];
      }
      report.total_bytes += rec->data.size();
    }
  } catch (const Error& e) {
    throw Error(e.code(), pcap_path.string() + ": " + e.detail());
  }

  if (json) {
    ordered_json j;
    j["source"] = pcap_path.string();
    j["bytes"] = report.total_bytes;
    for (const auto c : color::kAllClasses) {
      j["classes"][std::string(color::to_string(c))] = {
          {"count", report.class_counts[static_cast<std::size_t>(c)]},
          {"fraction", report.fraction(c)}};
    }
    j["black_white_fraction"] = report.black_white_fraction();
    out << j.dump() << '\n';
    return report;
  }

  out << pcap_path.string() << ": " << report.total_bytes << " payload bytes\n";
  out << std::fixed << std::setprecision(4);
  for (const auto c : color::kAllClasses) {
    out << "  " << std::left << std::setw(10) << color::to_string(c) << std::right << std::setw(12)
        << report.class_counts[static_cast<std::size_t>(c)] << std::setw(10) << report.fraction(c)
        << '\n';
  }
  out << "  black+white pixel fraction " << report.black_white_fraction() << '\n';
  return report;
}

void cmd_curve_dump(curve::CurveKind kind, unsigned order, std::ostream& out) {
  const curve::CurveLayout layout = make_layout(kind, order);
  const auto table = layout.table();
  for (std::size_t d = 0; d < table.size(); ++d) {
    out << d << ' ' << table[d].x << ' ' << table[d].y << '\n';
  }
}

void cmd_build_dataset(const fs::path& normal_dir, const fs::path& malware_dir,
                       const PipelineConfig& config, std::ostream& out) {
  config.validate();
  dataset::DatasetConfig dc;
  dc.chunk_size = config.chunk_size;
  dc.layout = config.layout;
  dc.order = config.resolved_order();
  dc.scheme = config.scheme;
  dc.seed = config.seed;
  dc.train_ratio = config.train_ratio;
  dc.split_by_source = config.split_by_source;
  dc.jobs = config.jobs;

  fs::create_directories(config.output_dir);
  const auto result = dataset::build_dataset(normal_dir, malware_dir, config.output_dir, dc);
  write_provenance(config, "build-dataset");
  out << dataset::format_summary(result.summary);
  out << "manifest: " << (config.output_dir / "manifest.jsonl").string() << '\n';
}

void cmd_eval(const fs::path& manifest_path, const fs::path& predictions_path, double threshold,
              const std::optional<fs::path>& json_out, std::ostream& out) {
  const dataset::Manifest manifest = dataset::read_manifest_file(manifest_path);
  const auto predictions = eval::read_predictions_file(predictions_path.string());
  const eval::Confusion c = eval::confusion(manifest, predictions, threshold);
  const auto malware_view = eval::metrics(c);
  const auto normal_view = eval::metrics(c.swapped());
  const std::string json = eval::report_json(malware_view, normal_view, threshold);

  out << eval::format_report(malware_view, normal_view);
  out << json << '\n';
  if (json_out) {
    write_text(*json_out, json + "\n");
  }
}

}  // namespace binvis::cli
