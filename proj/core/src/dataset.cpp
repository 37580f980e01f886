#include "binvis/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "binvis/error.hpp"
#include "binvis/hash.hpp"
#include "binvis/image.hpp"
#include "binvis/pcap.hpp"
#include "binvis/png_io.hpp"

namespace binvis::dataset {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kUnspecifiedFamily = "unspecified";

bool is_capture(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".pcap" || ext == ".cap";
}

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::size_t train_target(std::size_t n, double ratio) {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
}

// One capture queued for encoding.
struct Source {
  fs::path path;
  Label label = Label::Normal;
  std::string source_pcap;
  std::string source_id;
  std::optional<std::string> family;
};

struct SourceResult {
  Manifest entries;
  bool empty = false;
  std::optional<std::string> error;
};

std::vector<Source> collect_sources(const fs::path& root, Label label) {
  std::vector<Source> out;
  for (const fs::path& path : discover_captures(root)) {
    const fs::path rel = fs::relative(path, root);
    Source s;
    s.path = path;
    s.label = label;
    s.source_pcap = std::string(to_string(label)) + "/" + rel.generic_string();
    fs::path stem = rel;
    stem.replace_extension();
    s.source_id = image::sanitize_source_id(stem.generic_string());
    if (label == Label::Malware && std::distance(rel.begin(), rel.end()) > 1) {
      s.family = rel.begin()->string();
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Two captures can sanitize to the same id ("a/b" and "a_b"); disambiguate
// the later ones with a path hash.
void make_ids_unique(std::vector<Source>& sources) {
  std::set<std::pair<Label, std::string>> seen;
  for (Source& s : sources) {
    if (!seen.insert({s.label, s.source_id}).second) {
      s.source_id += "-" + to_hex(Fnv1a64{}.update(s.source_pcap).value()).substr(0, 8);
      seen.insert({s.label, s.source_id});
    }
  }
}

SourceResult encode_source(const Source& src, const image::Encoder& encoder, std::size_t chunk_size,
                           const fs::path& output_dir) {
  SourceResult result;
  pcap::PcapCapture capture;
  try {
    capture = pcap::read_pcap_file(src.path);
  } catch (const Error& e) {
    result.error = e.what();
    return result;
  }

  const fs::path rel_dir = fs::path("images") / std::string(to_string(src.label));
  std::vector<std::string> written;
  try {
    pcap::Chunker chunker(src.source_id, chunk_size, [&](pcap::Chunk&& chunk) {
      const image::EncodedImage img = encoder.encode(chunk);
      const fs::path rel = rel_dir / image::image_filename(img.meta);
      image::write_png(img, output_dir / rel);
      written.push_back(rel.generic_string());
      result.entries.push_back(
          {rel.generic_string(), src.label, src.family, src.source_pcap, chunk.index, Split::Train});
    });
    for (const auto& rec : capture.records) {
      chunker.feed(rec.data);
    }
    chunker.finish();
  } catch (const Error& e) {
    for (const auto& rel : written) {
      std::error_code ec;
      fs::remove(output_dir / rel, ec);
    }
    result.entries.clear();
    result.error = e.what();
    return result;
  }
  result.empty = result.entries.empty();
  return result;
}

void prepare_output(const fs::path& output_dir) {
  const fs::path images = output_dir / "images";
  if (fs::exists(images)) {
    if (!fs::exists(output_dir / "manifest.jsonl")) {
      throw Error(ErrorCode::IoError, images.string() +
                                          " exists but has no manifest.jsonl beside it; refusing to "
                                          "overwrite");
    }
    fs::remove_all(images);
  }
  fs::create_directories(images / std::string(to_string(Label::Normal)));
  fs::create_directories(images / std::string(to_string(Label::Malware)));
}

}  // namespace

std::string_view to_string(Label label) noexcept {
  return label == Label::Malware ? "malware" : "normal";
}

std::string_view to_string(Split split) noexcept {
  return split == Split::Test ? "test" : "train";
}

std::optional<Label> parse_label(std::string_view text) noexcept {
  if (text == "normal") return Label::Normal;
  if (text == "malware") return Label::Malware;
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view text) noexcept {
  if (text == "train") return Split::Train;
  if (text == "test") return Split::Test;
  return std::nullopt;
}

void write_manifest(std::ostream& out, const Manifest& manifest) {
  for (const auto& e : manifest) {
    ordered_json j;
    j["image_path"] = e.image_path;
    j["label"] = to_string(e.label);
    j["malware_family"] = e.malware_family ? ordered_json(*e.malware_family) : ordered_json(nullptr);
    j["source_pcap"] = e.source_pcap;
    j["chunk_index"] = e.chunk_index;
    j["split"] = to_string(e.split);
    out << j.dump() << '\n';
  }
}

Manifest read_manifest(std::istream& in) {
  Manifest manifest;
  std::set<std::string> paths;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "manifest line " + std::to_string(line_no);
    ManifestEntry e;
    try {
      const auto j = nlohmann::json::parse(line);
      e.image_path = j.at("image_path").get<std::string>();
      const auto label = parse_label(j.at("label").get<std::string>());
      const auto split = parse_split(j.at("split").get<std::string>());
      if (!label || !split) {
        throw Error(ErrorCode::BadManifest, where + ": bad label or split");
      }
      e.label = *label;
      e.split = *split;
      if (j.contains("malware_family") && !j["malware_family"].is_null()) {
        e.malware_family = j["malware_family"].get<std::string>();
      }
      e.source_pcap = j.at("source_pcap").get<std::string>();
      e.chunk_index = j.at("chunk_index").get<std::size_t>();
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::BadManifest, where + ": " + ex.what());
    }
    if (!paths.insert(e.image_path).second) {
      throw Error(ErrorCode::BadManifest, where + ": duplicate image_path " + e.image_path);
    }
    manifest.push_back(std::move(e));
  }
  return manifest;
}

Manifest read_manifest_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  return read_manifest(in);
}

double DatasetSummary::split_percent(Split s) const {
  const auto it = by_split.find(s);
  return percent(it == by_split.end() ? 0 : it->second, total);
}

DatasetSummary summarize(const Manifest& manifest) {
  if (manifest.empty()) {
    throw Error(ErrorCode::EmptyManifest, "cannot summarize an empty manifest");
  }
  DatasetSummary s;
  s.total = manifest.size();
  for (const Label l : {Label::Normal, Label::Malware}) s.by_label[l] = 0;
  for (const Split sp : {Split::Train, Split::Test}) s.by_split[sp] = 0;

  std::size_t malware = 0;
  for (const auto& e : manifest) {
    ++s.by_label[e.label];
    ++s.by_split[e.split];
    ++s.by_label_split[{e.label, e.split}];
    if (e.label == Label::Malware) {
      ++malware;
      ++s.families[e.malware_family.value_or(std::string(kUnspecifiedFamily))].count;
    }
  }
  for (auto& [name, share] : s.families) {
    share.percent = percent(share.count, malware);
  }
  return s;
}

std::string format_summary(const DatasetSummary& s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "images: " << s.total << '\n';
  os << "  label    train     test    total\n";
  for (const Label l : {Label::Normal, Label::Malware}) {
    const auto count = [&](Split sp) {
      const auto it = s.by_label_split.find({l, sp});
      return it == s.by_label_split.end() ? std::size_t{0} : it->second;
    };
    os << "  " << std::left << std::setw(7) << to_string(l) << std::right << std::setw(7)
       << count(Split::Train) << std::setw(9) << count(Split::Test) << std::setw(9)
       << s.by_label.at(l) << '\n';
  }
  os << "split: train " << s.split_percent(Split::Train) << "%, test "
     << s.split_percent(Split::Test) << "%\n";
  if (s.families.empty()) {
    os << "malware families: none\n";
  } else {
    os << "malware families:\n";
    for (const auto& [name, share] : s.families) {
      os << "  " << std::left << std::setw(14) << name << std::right << std::setw(7) << share.count
         << std::setw(9) << share.percent << "%\n";
    }
  }
  if (s.files_scanned > 0) {
    os << "captures: " << s.files_scanned << " scanned, " << s.file_errors.size() << " skipped, "
       << s.files_without_payload << " without payload\n";
    for (const auto& [src, msg] : s.file_errors) {
      os << "  skipped " << src << ": " << msg << '\n';
    }
  }
  return os.str();
}

std::string summary_json(const DatasetSummary& s) {
  ordered_json j;
  j["total"] = s.total;
  for (const Label l : {Label::Normal, Label::Malware}) {
    j["labels"][std::string(to_string(l))] = s.by_label.count(l) ? s.by_label.at(l) : 0;
  }
  for (const Split sp : {Split::Train, Split::Test}) {
    const auto name = std::string(to_string(sp));
    j["splits"][name] = s.by_split.count(sp) ? s.by_split.at(sp) : 0;
    j["split_percent"][name] = s.split_percent(sp);
  }
  for (const auto& [key, count] : s.by_label_split) {
    j["by_label_split"][std::string(to_string(key.first))][std::string(to_string(key.second))] =
        count;
  }
  j["malware_families"] = ordered_json::object();
  for (const auto& [name, share] : s.families) {
    j["malware_families"][name] = {{"count", share.count}, {"percent", share.percent}};
  }
  j["captures_scanned"] = s.files_scanned;
  j["captures_without_payload"] = s.files_without_payload;
  j["capture_errors"] = ordered_json::array();
  for (const auto& [src, msg] : s.file_errors) {
    j["capture_errors"].push_back({{"source_pcap", src}, {"error", msg}});
  }
  return j.dump(2) + "\n";
}

std::uint64_t split_key(std::uint64_t seed, std::string_view source_pcap,
                        std::size_t chunk_index) noexcept {
  return Fnv1a64{}.update(seed).update(source_pcap).update(std::uint64_t{chunk_index}).value();
}

void assign_splits(Manifest& manifest, std::uint64_t seed, double train_ratio,
                   bool split_by_source) {
  const std::size_t target = train_target(manifest.size(), train_ratio);

  if (!split_by_source) {
    std::vector<std::size_t> order(manifest.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::uint64_t> keys(manifest.size());
    for (std::size_t i = 0; i < manifest.size(); ++i) {
      keys[i] = split_key(seed, manifest[i].source_pcap, manifest[i].chunk_index);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& ea = manifest[a];
      const auto& eb = manifest[b];
      return std::tie(keys[a], ea.source_pcap, ea.chunk_index) <
             std::tie(keys[b], eb.source_pcap, eb.chunk_index);
    });
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      manifest[order[rank]].split = rank < target ? Split::Train : Split::Test;
    }
    return;
  }

  std::map<std::string, std::size_t> per_source;
  for (const auto& e : manifest) ++per_source[e.source_pcap];
  std::vector<std::pair<std::uint64_t, std::string>> ranked;
  for (const auto& [src, n] : per_source) {
    ranked.emplace_back(split_key(seed, src, 0), src);
  }
  std::sort(ranked.begin(), ranked.end());
  std::map<std::string, Split> split_of;
  std::size_t train = 0;
  for (const auto& [key, src] : ranked) {
    const bool to_train = train < target;
    split_of[src] = to_train ? Split::Train : Split::Test;
    if (to_train) train += per_source[src];
  }
  for (auto& e : manifest) e.split = split_of[e.source_pcap];
}

std::vector<fs::path> discover_captures(const fs::path& root) {
  std::vector<fs::path> out;
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::IoError, root.string() + " is not a directory");
  }
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && is_capture(entry.path())) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

BuildResult build_dataset(const fs::path& normal_dir, const fs::path& malware_dir,
                          const fs::path& output_dir, const DatasetConfig& config) {
  std::vector<Source> sources = collect_sources(normal_dir, Label::Normal);
  {
    auto malware = collect_sources(malware_dir, Label::Malware);
    sources.insert(sources.end(), std::make_move_iterator(malware.begin()),
                   std::make_move_iterator(malware.end()));
  }
  if (sources.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "no .pcap/.cap files under " + normal_dir.string() +
                                            " or " + malware_dir.string());
  }
  make_ids_unique(sources);

  const unsigned order = config.order.value_or(image::choose_order(config.chunk_size));
  if (order < 1 || order > image::kMaxOrder) {
    throw Error(ErrorCode::Oversize, "image order " + std::to_string(order) + " outside [1, 8]");
  }
  if (config.chunk_size == 0 || config.chunk_size > (std::uint64_t{1} << (2 * order))) {
    throw Error(ErrorCode::ChunkTooLarge, "chunk size " + std::to_string(config.chunk_size) +
                                              " does not fit an order-" + std::to_string(order) +
                                              " image");
  }
  const image::Encoder encoder(config.layout == curve::CurveKind::Hilbert
                                   ? curve::CurveLayout::hilbert(order)
                                   : curve::CurveLayout::scanline_square(order),
                               config.scheme);

  prepare_output(output_dir);

  std::vector<SourceResult> results(sources.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < sources.size(); i = next++) {
      results[i] = encode_source(sources[i], encoder, config.chunk_size, output_dir);
    }
  };
  const unsigned jobs = std::max(1U, std::min<unsigned>(config.jobs, static_cast<unsigned>(sources.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }

  BuildResult out;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    auto& r = results[i];
    if (r.error) {
      out.summary.file_errors.emplace_back(sources[i].source_pcap, *r.error);
      continue;
    }
    if (r.empty) ++out.summary.files_without_payload;
    out.manifest.insert(out.manifest.end(), std::make_move_iterator(r.entries.begin()),
                        std::make_move_iterator(r.entries.end()));
  }
  if (out.manifest.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "no images were produced (" +
                                            std::to_string(out.summary.file_errors.size()) +
                                            " captures failed to parse)");
  }

  assign_splits(out.manifest, config.seed, config.train_ratio, config.split_by_source);

  DatasetSummary summary = summarize(out.manifest);
  summary.files_scanned = sources.size();
  summary.files_without_payload = out.summary.files_without_payload;
  summary.file_errors = std::move(out.summary.file_errors);
  out.summary = std::move(summary);

  {
    std::ofstream m(output_dir / "manifest.jsonl", std::ios::binary);
    write_manifest(m, out.manifest);
    std::ofstream s(output_dir / "summary.json", std::ios::binary);
    s << summary_json(out.summary);
    if (!m || !s) {
      throw Error(ErrorCode::IoError, "failed writing manifest or summary under " +
                                          output_dir.string());
    }
  }
  return out;
}

}  // namespace binvis::dataset
