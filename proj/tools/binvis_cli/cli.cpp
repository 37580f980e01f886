#include "binvis_cli/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "binvis_cli/commands.hpp"

namespace binvis::cli {
namespace {

// Options shared by encode and build-dataset, resolved into PipelineConfig
// after parsing.
struct PipelineOptions {
  std::size_t chunk_size = 65536;
  std::string layout = "hilbert";
  std::string order = "auto";
  std::string shading;
  std::string scheme_file;
  std::string output_dir = "binvis-out";
};

void add_pipeline_options(CLI::App& cmd, PipelineOptions& o) {
  cmd.add_option("--chunk-size", o.chunk_size, "Bytes per image")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{65536}));
  cmd.add_option("--layout", o.layout, "Pixel layout")
      ->capture_default_str()
      ->check(CLI::IsMember({"hilbert", "scanline"}));
  cmd.add_option("--order", o.order, "Image side is 2^order; 'auto' fits the chunk size")
      ->capture_default_str();
  cmd.add_option("--shading", o.shading, "Override the scheme's shading")
      ->check(CLI::IsMember({"flat", "value_scaled"}));
  cmd.add_option("--scheme", o.scheme_file, "Colour scheme file (key = #rrggbb lines)")
      ->check(CLI::ExistingFile);
  cmd.add_option("-o,--out", o.output_dir, "Output directory")->capture_default_str();
}

PipelineConfig resolve(const PipelineOptions& o) {
  PipelineConfig c;
  c.chunk_size = o.chunk_size;
  c.layout = o.layout == "scanline" ? curve::CurveKind::Scanline : curve::CurveKind::Hilbert;
  if (o.order != "auto") {
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(o.order, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != o.order.size() || k < 1) {
      throw CLI::ValidationError("--order", "expected 'auto' or a positive integer");
    }
    c.order = static_cast<unsigned>(k);
  }
  if (!o.scheme_file.empty()) {
    std::ifstream in(o.scheme_file);
    std::stringstream text;
    text << in.rdbuf();
    c.scheme = color::ColorScheme::parse(text.str());
  }
  if (!o.shading.empty()) {
    c.scheme.set_shading(o.shading == "flat" ? color::Shading::Flat : color::Shading::ValueScaled);
  }
  c.output_dir = o.output_dir;
  return c;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"binvis: pcap captures to byte-class Hilbert images, datasets and evaluation"};
  app.set_config("--config", "", "TOML/INI file with option defaults (flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();

  unsigned jobs = std::max(1U, std::thread::hardware_concurrency());
  app.add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* encode = app.add_subcommand("encode", "Encode one capture into PNG images");
  std::string encode_pcap;
  PipelineOptions encode_opts;
  encode->add_option("pcap", encode_pcap, "Capture file")->required()->check(CLI::ExistingFile);
  add_pipeline_options(*encode, encode_opts);

  auto* inspect = app.add_subcommand("inspect", "Byte-class histogram of a capture");
  std::string inspect_pcap;
  bool inspect_json = false;
  inspect->add_option("pcap", inspect_pcap, "Capture file")->required()->check(CLI::ExistingFile);
  inspect->add_flag("--json", inspect_json, "Print one JSON line instead of a table");

  auto* dump = app.add_subcommand("curve-dump", "Print 'd x y' for every index of a layout");
  std::string dump_kind;
  unsigned dump_order = 1;
  dump->add_option("kind", dump_kind)->required()->check(CLI::IsMember({"hilbert", "scanline"}));
  dump->add_option("order", dump_order)->required()->check(CLI::Range(1U, 12U));

  auto* build = app.add_subcommand("build-dataset", "Encode labelled captures into a dataset");
  std::string normal_dir;
  std::string malware_dir;
  std::uint64_t seed = 0;
  double train_ratio = 0.8;
  bool split_by_source = false;
  PipelineOptions build_opts;
  build->add_option("--normal", normal_dir, "Directory of normal captures")
      ->required()
      ->check(CLI::ExistingDirectory);
  build->add_option("--malware", malware_dir, "Directory of malware captures")
      ->required()
      ->check(CLI::ExistingDirectory);
  build->add_option("--seed", seed, "Split seed")->capture_default_str();
  build->add_option("--train-ratio", train_ratio, "Fraction of images in train")
      ->capture_default_str();
  build->add_flag("--split-by-source", split_by_source,
                  "Keep all chunks of one capture in the same split");
  add_pipeline_options(*build, build_opts);

  auto* evaluate = app.add_subcommand("eval", "Score predictions against a manifest's test split");
  std::string manifest_path;
  std::string predictions_path;
  std::string json_out;
  double threshold = 0.5;
  evaluate->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--predictions", predictions_path)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--threshold", threshold, "Malware decision threshold on score")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--json-out", json_out, "Also write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (encode->parsed()) {
      PipelineConfig c = resolve(encode_opts);
      c.jobs = jobs;
      cmd_encode(encode_pcap, c, out);
    } else if (inspect->parsed()) {
      cmd_inspect(inspect_pcap, inspect_json, out);
    } else if (dump->parsed()) {
      cmd_curve_dump(dump_kind == "scanline" ? curve::CurveKind::Scanline : curve::CurveKind::Hilbert,
                     dump_order, out);
    } else if (build->parsed()) {
      PipelineConfig c = resolve(build_opts);
      c.jobs = jobs;
      c.seed = seed;
      c.train_ratio = train_ratio;
      c.split_by_source = split_by_source;
      cmd_build_dataset(normal_dir, malware_dir, c, out);
    } else if (evaluate->parsed()) {
      cmd_eval(manifest_path, predictions_path, threshold,
               json_out.empty() ? std::nullopt : std::optional<std::filesystem::path>(json_out),
               out);
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputFormat;
  }
  return kExitOk;
}

}  // namespace binvis::cli
