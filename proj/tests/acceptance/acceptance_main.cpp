// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "binvis/colormap.hpp"
#include "binvis/curve.hpp"
#include "binvis/dataset.hpp"
#include "binvis/error.hpp"
#include "binvis/eval.hpp"
#include "binvis/image.hpp"
#include "binvis/pcap.hpp"
#include "support/fixtures.hpp"

namespace {

namespace fs = std::filesystem;
using namespace binvis;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Bijectivity and unit steps for orders 1-8; the order-8 sweep is timed.
void hilbert_correctness(Outcome& o) {
  double order8_seconds = 0.0;
  for (unsigned order = 1; order <= 8; ++order) {
    const auto t0 = Clock::now();
    const std::uint32_t side = 1U << order;
    const std::uint64_t n = std::uint64_t{side} * side;
    std::vector<char> hit(n, 0);
    bool ok = true;
    curve::Point prev{};
    for (std::uint64_t d = 0; d < n && ok; ++d) {
      const auto p = curve::hilbert_d_to_xy(order, d);
      const std::size_t cell = std::size_t{p.y} * side + p.x;
      ok = p.x < side && p.y < side && hit[cell] == 0;
      hit[cell] = 1;
      if (ok && d > 0) {
        ok = std::abs(static_cast<int>(p.x) - static_cast<int>(prev.x)) +
                 std::abs(static_cast<int>(p.y) - static_cast<int>(prev.y)) ==
             1;
      }
      prev = p;
    }
    ok = ok && std::all_of(hit.begin(), hit.end(), [](char c) { return c == 1; });
    o.require(ok, "order " + std::to_string(order));
    if (order == 8) order8_seconds = seconds_since(t0);
  }
  o.require(order8_seconds < 1.0, "order-8 sweep took >= 1 s");
  o.detail << "orders 1-8 bijective with unit steps; 65536 points in " << order8_seconds << " s";
}

void color_partition(Outcome& o) {
  const auto scheme = color::ColorScheme::binvis_default();
  std::array<int, 5> counts{};
  for (unsigned b = 0; b < 256; ++b) {
    const auto c = color::classify_byte(static_cast<std::uint8_t>(b));
    int memberships = 0;
    for (const auto k : color::kAllClasses) memberships += c == k ? 1 : 0;
    o.require(memberships == 1, "byte " + std::to_string(b) + " class membership");
    ++counts[static_cast<std::size_t>(c)];
    o.require(color::color_of(static_cast<std::uint8_t>(b), scheme) != scheme.padding(),
              "byte " + std::to_string(b) + " hits padding");
  }
  o.require(counts[0] + counts[1] + counts[2] + counts[3] + counts[4] == 256, "sum 256");
  o.require(color::color_of(0x00, scheme) == color::Rgb{0, 0, 0}, "0x00 black");
  o.require(color::color_of(0xFF, scheme) == color::Rgb{255, 255, 255}, "0xFF white");
  o.detail << "class sizes null/printable/control/extended/nbsp = " << counts[0] << '/'
           << counts[1] << '/' << counts[2] << '/' << counts[3] << '/' << counts[4]
           << "; 0x00->(0,0,0), 0xFF->(255,255,255)";
}

void byte_accounting(Outcome& o) {
  std::mt19937_64 rng(20200703);
  std::uniform_int_distribution<std::size_t> len(1, 65536);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_real_distribution<double> bias(0.0, 0.8);
  const auto scheme = color::ColorScheme::binvis_default();
  const image::Encoder hilbert(curve::CurveLayout::hilbert(8), scheme);
  const auto padding = scheme.padding();
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::uint8_t> bytes(len(rng));
    std::bernoulli_distribution extreme(bias(rng));
    for (auto& b : bytes) {
      b = extreme(rng) ? (byte(rng) % 2 == 0 ? 0x00 : 0xFF) : static_cast<std::uint8_t>(byte(rng));
    }
    const auto img = hilbert.encode({"acc", static_cast<std::size_t>(i), 0, bytes});
    const auto non_padding = static_cast<std::size_t>(
        std::count_if(img.pixels.begin(), img.pixels.end(), [&](color::Rgb c) { return c != padding; }));
    const auto bw = static_cast<std::size_t>(std::count_if(
        img.pixels.begin(), img.pixels.end(),
        [](color::Rgb c) { return c == color::kBlack || c == color::kWhite; }));
    const auto extremes = static_cast<std::size_t>(
        std::count_if(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0 || b == 0xFF; }));
    // Fractions compared as exact rationals: bw/non_padding == extremes/len.
    o.require(non_padding == bytes.size(), "chunk " + std::to_string(i) + " pixel count");
    o.require(bw * bytes.size() == extremes * non_padding, "chunk " + std::to_string(i) + " b/w fraction");
    ++checked;
  }
  o.detail << checked << " random chunks: non-padding pixels == bytes, black+white share == 0x00/0xFF share";
}

void locality_dominance(Outcome& o) {
  const auto t0 = Clock::now();
  const auto hilbert = curve::CurveLayout::hilbert(8);
  const auto scanline = curve::CurveLayout::scanline(256, 256);
  for (const std::uint64_t w : {16, 64, 256, 1024}) {
    const double h = curve::locality_score(hilbert, w);
    const double s = curve::locality_score(scanline, w);
    o.require(h < s, "w=" + std::to_string(w));
    o.detail << "w=" << w << " hilbert " << h << " scanline " << s << "; ";
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 5.0, "enumeration took >= 5 s");
  o.detail << "total " << elapsed << " s";
}

void metrics_fidelity(Outcome& o) {
  const double f1 = 100.0 * *eval::f1_score(0.9578, 0.9402);
  o.require(std::abs(f1 - 94.90) <= 0.05, "headline F1");
  o.detail << "F1(95.78, 94.02) = " << f1 << "; ";

  const std::vector<eval::ReportedRow> table{{"Resnet34", 93.57, 64.55, 76.40},
                                             {"Resnet50", 95.78, 94.02, 94.90},
                                             {"MobileNet", 91.67, 91.03, 91.35},
                                             {"SOINN", 89.68, 95.52, 92.50}};
  for (const auto& v : eval::consistency_check(table, 0.05)) {
    o.require(v.consistent, v.name);
    o.detail << v.name << ' ' << v.computed_f1 << " vs " << v.reported_f1 << "; ";
  }
}

void split_fidelity(Outcome& o) {
  testing::TempDir dir;
  std::mt19937_64 rng(1000);
  // 40 captures x 25 chunks of 1024 bytes = 1000 images.
  for (int i = 0; i < 40; ++i) {
    const std::string label = i < 20 ? "normal" : "malware";
    std::vector<std::uint8_t> payload(25 * 1024);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
    testing::write_file(dir / (label + "/cap" + std::to_string(i) + ".pcap"),
                        testing::make_pcap(testing::packets_from_payload(payload, 1024)));
  }
  dataset::DatasetConfig cfg;
  cfg.chunk_size = 1024;
  cfg.seed = 2020;
  cfg.train_ratio = 0.8;
  cfg.jobs = 4;
  const auto a = dataset::build_dataset(dir / "normal", dir / "malware", dir / "run1", cfg);
  const auto b = dataset::build_dataset(dir / "normal", dir / "malware", dir / "run2", cfg);
  const auto train = a.summary.by_split.at(dataset::Split::Train);
  const auto test = a.summary.by_split.at(dataset::Split::Test);
  o.require(a.summary.total == 1000, "1000 images");
  o.require(train == 800 && test == 200, "800/200");
  const bool identical = testing::read_file(dir / "run1/manifest.jsonl") ==
                         testing::read_file(dir / "run2/manifest.jsonl");
  o.require(identical, "byte-identical manifests");
  o.detail << a.summary.total << " images -> " << train << " train / " << test
           << " test; manifests " << (identical ? "byte-identical" : "differ");
}

ErrorCode error_of(const std::vector<std::uint8_t>& bytes) {
  try {
    (void)pcap::parse_pcap(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

void pcap_round_trip(Outcome& o) {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<std::size_t> chunk_size(1, 65536);
  int captures = 0;
  for (const std::size_t n : {1, 2, 10, 100, 500, 1000}) {
    const auto packets = testing::random_packets(rng, n, 0, 1514);
    std::vector<std::uint8_t> expected;
    for (const auto& p : packets) expected.insert(expected.end(), p.data.begin(), p.data.end());
    const std::size_t cs = chunk_size(rng);
    for (const bool big : {false, true}) {
      const auto capture = pcap::parse_pcap(testing::make_pcap(packets, {.big_endian = big}));
      std::vector<std::uint8_t> rebuilt;
      for (const auto& c : pcap::chunk_stream(capture.records, cs)) {
        rebuilt.insert(rebuilt.end(), c.bytes.begin(), c.bytes.end());
      }
      o.require(capture.records.size() == n && rebuilt == expected,
                std::to_string(n) + " packets big=" + std::to_string(big));
      ++captures;
    }
  }

  testing::FixturePacket p;
  p.data.assign(10, 1);
  auto truncated = testing::make_pcap({p});
  truncated.resize(truncated.size() - 6);
  std::vector<std::uint8_t> bad_magic(24, 0x42);
  std::vector<std::uint8_t> pcapng{0x0A, 0x0D, 0x0D, 0x0A};
  pcapng.resize(32, 0);
  testing::FixturePacket big;
  big.data.assign(200, 0);
  const auto oversize = testing::make_pcap({big}, {.snaplen = 100});
  auto short_header = testing::make_pcap({});
  short_header.resize(12);

  o.require(error_of(truncated) == ErrorCode::Truncated, "Truncated body");
  o.require(error_of(short_header) == ErrorCode::Truncated, "Truncated header");
  o.require(error_of(bad_magic) == ErrorCode::BadMagic, "BadMagic");
  o.require(error_of(pcapng) == ErrorCode::Pcapng, "pcapng");
  o.require(error_of(oversize) == ErrorCode::OversizeRecord, "OversizeRecord");
  o.detail << captures << " captures (1-1000 packets, both byte orders) reconstructed exactly; "
           << "Truncated/BadMagic/Pcapng/OversizeRecord raised";
}

void encode_determinism(Outcome& o) {
  testing::TempDir dir;
  std::mt19937_64 rng(8);
  const auto packets = testing::random_packets(rng, 120, 60, 1514);
  testing::write_file(dir / "fixture.pcap", testing::make_pcap(packets));
  const std::string cli = BINVIS_CLI_PATH;
  for (const char* run : {"a", "b"}) {
    const std::string cmd = "\"" + cli + "\" -j 2 encode \"" + (dir / "fixture.pcap").string() +
                            "\" -o \"" + (dir / run).string() + "\" > /dev/null";
    o.require(std::system(cmd.c_str()) == 0, std::string("encode run ") + run);
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    if (e.path().extension() != ".png") continue;
    ++files;
    const auto other = dir / "b" / e.path().filename();
    o.require(fs::exists(other) && testing::read_file(e.path()) == testing::read_file(other),
              e.path().filename().string());
  }
  o.require(files > 0, "no PNGs produced");
  o.detail << files << " PNGs byte-identical across two `binvis encode` runs";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"hilbert-correctness", hilbert_correctness},
      {"color-partition", color_partition},
      {"byte-accounting", byte_accounting},
      {"locality-dominance", locality_dominance},
      {"metrics-fidelity", metrics_fidelity},
      {"split-fidelity", split_fidelity},
      {"pcap-round-trip", pcap_round_trip},
      {"encode-determinism", encode_determinism},
  };

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
    failed += o.pass ? 0 : 1;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " acceptance criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
