// Command-line front end for the intensity simulation pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lidarsim/error.hpp"
#include "lidarsim/pipeline.hpp"
#include "lidarsim/pipeline_config.hpp"

namespace fs = std::filesystem;
using namespace lidarsim;

namespace {

struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;
  bool strict = false;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
};

PipelineConfig load_config(const CommonFlags& flags, KeyValueFile overrides) {
  for (const auto& item : flags.sets) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::kConfig, "--set expects key=value, got '" + item + "'");
    }
    overrides.set(item.substr(0, eq), item.substr(eq + 1));
  }
  if (flags.strict) overrides.set("strict", "true");
  if (flags.jobs) overrides.set("jobs", std::to_string(*flags.jobs));
  if (flags.seed) overrides.set("seed", std::to_string(*flags.seed));
  if (flags.config.empty()) return PipelineConfig::from_key_values(overrides, fs::current_path());
  if (!fs::is_regular_file(flags.config)) {
    throw Error(ErrorCode::kConfig, "config file not found: " + flags.config);
  }
  return PipelineConfig::load(flags.config, overrides);
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config, "key = value configuration file");
  cmd->add_option("--set", flags.sets, "Override a configuration key (key=value)");
  cmd->add_flag("--strict", flags.strict, "Treat any frame error as fatal");
  cmd->add_option("-j,--jobs", flags.jobs, "Worker threads")->check(CLI::Range(1, 256));
  cmd->add_option("--seed", flags.seed, "Seed for stochastic steps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR intensity simulation pipeline"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* real = app.add_subcommand("prepare-real", "Build training pairs from real scans");
  add_common(real, flags);

  auto* synth = app.add_subcommand("prepare-synth", "Convert a synthetic sequence to KITTI layout");
  add_common(synth, flags);

  auto* cloud = app.add_subcommand("synth-cloud", "Turn synthetic depth and intensity into scans");
  add_common(cloud, flags);
  int lines = 0;
  bool drop_zero = false;
  std::string intensity_dir;
  cloud->add_option("--lines", lines, "Target scan lines")->check(CLI::IsMember({32, 64}));
  cloud->add_flag("--drop-zero", drop_zero, "Drop zero-intensity points");
  cloud->add_option("--intensity-dir", intensity_dir, "Directory of <id>.png intensity maps");

  auto* metrics = app.add_subcommand("metrics", "Intensity errors, Frechet distance, scan stats");
  add_common(metrics, flags);
  MetricsRequest request;
  std::string report_path;
  metrics->add_option("--predictions", request.predictions, "Directory of <id>.png predictions");
  metrics->add_option("--targets", request.targets, "Directory of <id>_*.png targets");
  metrics->add_option("--features-a", request.features_a, "Feature file of the first set");
  metrics->add_option("--features-b", request.features_b, "Feature file of the second set");
  metrics->add_option("--clouds-a", request.clouds_a, "Directory of .bin scans");
  metrics->add_option("--clouds-b", request.clouds_b, "Directory of .bin scans");
  metrics->add_option("-o,--out", report_path, "Write the JSON report here instead of stdout");

  auto* inspect = app.add_subcommand("inspect", "Dump intermediate layers of one real frame");
  add_common(inspect, flags);
  std::string frame_id;
  std::string inspect_out = "inspect";
  inspect->add_option("--frame", frame_id, "Frame id")->required();
  inspect->add_option("-o,--out", inspect_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitValidation;
  }

  try {
    KeyValueFile overrides;
    if (cloud->parsed()) {
      if (lines != 0) overrides.set("sparsify.lines", std::to_string(lines));
      if (drop_zero) overrides.set("drop.zero", "true");
      if (!intensity_dir.empty()) {
        overrides.set("intensity.dir", fs::absolute(intensity_dir).string());
      }
    }
    const PipelineConfig cfg = load_config(flags, overrides);

    if (real->parsed()) return prepare_real(cfg, std::cerr).exit_code;
    if (synth->parsed()) return prepare_synth(cfg, std::cerr).exit_code;
    if (cloud->parsed()) return synth_cloud(cfg, std::cerr).exit_code;
    if (metrics->parsed()) {
      if (report_path.empty()) return run_metrics(cfg, request, std::cout, std::cerr);
      std::ofstream file(report_path);
      if (!file) throw Error(ErrorCode::kIo, "cannot write " + report_path);
      return run_metrics(cfg, request, file, std::cerr);
    }
    return inspect_frame(cfg, frame_id, inspect_out, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
