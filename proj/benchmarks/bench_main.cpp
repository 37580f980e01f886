#include <benchmark/benchmark.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <sstream>
#include <vector>

#include "binvis/colormap.hpp"
#include "binvis/curve.hpp"
#include "binvis/image.hpp"
#include "binvis/pcap.hpp"
#include "binvis/png_io.hpp"

namespace {

using namespace binvis;

std::vector<std::uint8_t> random_bytes(std::size_t n) {
  std::mt19937_64 rng(n);
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

void BM_HilbertDToXy(benchmark::State& state) {
  const auto order = static_cast<unsigned>(state.range(0));
  const std::uint64_t n = std::uint64_t{1} << (2 * order);
  for (auto _ : state) {
    for (std::uint64_t d = 0; d < n; ++d) benchmark::DoNotOptimize(curve::hilbert_d_to_xy(order, d));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_HilbertDToXy)->Arg(4)->Arg(8)->Arg(10);

void BM_LayoutBuild(benchmark::State& state) {
  const auto order = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(curve::CurveLayout::hilbert(order));
}
BENCHMARK(BM_LayoutBuild)->Arg(8)->Arg(10);

void BM_LocalityScore(benchmark::State& state) {
  const auto layout = curve::CurveLayout::hilbert(8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(curve::locality_score(layout, static_cast<std::uint64_t>(state.range(0))));
  }
}
BENCHMARK(BM_LocalityScore)->Arg(16)->Arg(1024);

void BM_EncodeChunk(benchmark::State& state) {
  const auto bytes = random_bytes(static_cast<std::size_t>(state.range(0)));
  const image::Encoder encoder(curve::CurveLayout::hilbert(8), color::ColorScheme::binvis_default());
  for (auto _ : state) benchmark::DoNotOptimize(encoder.encode({"bench", 0, 0, bytes}));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_EncodeChunk)->Arg(4096)->Arg(65536);

void BM_ParsePcap(benchmark::State& state) {
  // 1000 records of 1000 bytes, little-endian microsecond capture.
  std::ostringstream os;
  auto put32 = [&](std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); };
  auto put16 = [&](std::uint16_t v) { os.write(reinterpret_cast<const char*>(&v), 2); };
  put32(pcap::kMagicMicro);
  put16(2);
  put16(4);
  put32(0);
  put32(0);
  put32(65535);
  put32(1);
  const auto payload = random_bytes(1000);
  for (int i = 0; i < 1000; ++i) {
    put32(0);
    put32(0);
    put32(1000);
    put32(1000);
    os.write(reinterpret_cast<const char*>(payload.data()), 1000);
  }
  const std::string raw = os.str();
  const std::vector<std::uint8_t> data(raw.begin(), raw.end());
  for (auto _ : state) benchmark::DoNotOptimize(pcap::parse_pcap(data));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * data.size()));
}
BENCHMARK(BM_ParsePcap);

void BM_WritePng(benchmark::State& state) {
  const image::Encoder encoder(curve::CurveLayout::hilbert(8), color::ColorScheme::binvis_default());
  const auto img = encoder.encode({"bench", 0, 0, random_bytes(65536)});
  const auto path = std::filesystem::temp_directory_path() / "binvis_bench.png";
  for (auto _ : state) image::write_png(img, path);
  std::filesystem::remove(path);
}
BENCHMARK(BM_WritePng);

}  // namespace

BENCHMARK_MAIN();
