#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "stig/config.hpp"
#include "stig/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_seed) {
  cmd->add_option("--config", args.config_path, "flat key=value config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--threads", args.threads, "worker threads (overrides the config)")
      ->check(CLI::PositiveNumber);
  if (with_seed) cmd->add_option("--seed", args.seed, "random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hotspot detection on geotagged event streams"};
  app.require_subcommand(1);
  CommonArgs args;

  CLI::App* ingest =
      app.add_subcommand("ingest", "validate an event file and write the rejection report");
  add_common(ingest, args, false);
  CLI::App* generate =
      app.add_subcommand("generate", "synthesize a planted scenario with ground truth");
  add_common(generate, args, true);
  CLI::App* run = app.add_subcommand("run", "detect permanent and intermittent hotspots");
  add_common(run, args, false);
  CLI::App* tune = app.add_subcommand("tune", "sweep detection thresholds");
  add_common(tune, args, false);
  CLI::App* export_cmd =
      app.add_subcommand("export", "write the whole-period activity heatmap");
  add_common(export_cmd, args, false);

  CLI11_PARSE(app, argc, argv);

  try {
    const stig::FlatConfig cfg = stig::FlatConfig::load(args.config_path);
    if (ingest->parsed()) {
      const stig::IngestReport report = stig::run_ingest(cfg, args.out_dir);
      std::cout << "rows_read=" << report.rows_read << " rows_kept=" << report.rows_kept
                << " rejected=" << report.rejected() << '\n';
    } else if (generate->parsed()) {
      stig::run_generate(cfg, args.seed, args.out_dir);
      std::cout << "scenario written to " << args.out_dir << '\n';
    } else if (run->parsed()) {
      const stig::RunArtifacts art = stig::run_pipeline(cfg, args.out_dir, args.threads);
      for (const std::string& warning : art.warnings) {
        std::cerr << "warning: " << warning << '\n';
      }
      std::cout << "permanent_regions=" << art.permanent_regions
                << " intermittent_regions=" << art.intermittent_regions
                << " occurrences=" << art.occurrences << '\n';
    } else if (tune->parsed()) {
      const stig::TuneResult result = stig::run_tune(cfg, args.out_dir, args.threads);
      std::cout << "best tau_permanent=" << result.best.tau_permanent
                << " tau_intermittent=" << result.best.tau_intermittent << '\n';
    } else if (export_cmd->parsed()) {
      stig::run_export(cfg, args.out_dir);
      std::cout << "heatmap written to " << args.out_dir << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
