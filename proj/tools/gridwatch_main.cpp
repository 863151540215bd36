#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "gridwatch/cli.hpp"
#include "gridwatch/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gridwatch: streaming spectral anomaly detection and localization over "
               "multi-device telemetry"};
  app.require_subcommand(1);

  std::string input, scenario, config, out, spec_path, follow, dir;
  std::uint64_t seed = 42;
  int threads = 0;
  long tick = 0;

  CLI::App* analyze = app.add_subcommand("analyze", "Batch-analyze a telemetry CSV or scenario");
  analyze->add_option("--input", input, "telemetry CSV path");
  analyze->add_option("--scenario", scenario, "scenario spec (JSON)");
  analyze->add_option("--config", config, "run config (JSON)");
  analyze->add_option("--out", out, "output directory")->required();
  CLI::Option* analyze_seed = analyze->add_option("--seed", seed, "master seed override");
  CLI::Option* analyze_threads =
      analyze->add_option("--threads", threads, "worker threads (0 = hardware)");

  CLI::App* synth = app.add_subcommand("synth", "Write a scenario as a schema-conformant CSV");
  synth->add_option("--spec", spec_path, "scenario spec (JSON)")->required();
  synth->add_option("--seed", seed, "generation seed");
  synth->add_option("--out", out, "output CSV path")->required();

  CLI::App* stream = app.add_subcommand("stream", "Process a CSV tick-by-tick as a consumer");
  stream->add_option("--follow", follow, "telemetry CSV path")->required();
  stream->add_option("--config", config, "run config (JSON)");
  stream->add_option("--out", out, "output directory")->required();
  CLI::Option* stream_seed = stream->add_option("--seed", seed, "master seed override");

  CLI::App* spectra = app.add_subcommand("spectra", "Emit one window's ESD/MP and ring data");
  spectra->add_option("--input", input, "telemetry CSV path");
  spectra->add_option("--scenario", scenario, "scenario spec (JSON)");
  spectra->add_option("--tick", tick, "window end tick (1-based)")->required();
  spectra->add_option("--config", config, "run config (JSON)");
  spectra->add_option("--out", out, "output directory")->required();
  CLI::Option* spectra_seed = spectra->add_option("--seed", seed, "master seed override");

  CLI::App* selfcheck = app.add_subcommand("selfcheck", "Validate an output directory's schemas");
  selfcheck->add_option("--dir", dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(analyze)) {
      gridwatch::cli::RunConfig cfg = gridwatch::cli::load_run_config(config);
      cfg.input_path = input;
      cfg.scenario_path = scenario;
      cfg.out_dir = out;
      if (analyze_seed->count() > 0) {
        cfg.seed = seed;
        cfg.detector.seed = seed;
      }
      if (analyze_threads->count() > 0) cfg.threads = threads;
      return gridwatch::cli::cmd_analyze(cfg);
    }
    if (app.got_subcommand(synth)) {
      return gridwatch::cli::cmd_synth(spec_path, seed, out);
    }
    if (app.got_subcommand(stream)) {
      gridwatch::cli::RunConfig cfg = gridwatch::cli::load_run_config(config);
      cfg.input_path = follow;
      cfg.out_dir = out;
      if (stream_seed->count() > 0) {
        cfg.seed = seed;
        cfg.detector.seed = seed;
      }
      return gridwatch::cli::cmd_stream(cfg);
    }
    if (app.got_subcommand(spectra)) {
      gridwatch::cli::RunConfig cfg = gridwatch::cli::load_run_config(config);
      cfg.input_path = input;
      cfg.scenario_path = scenario;
      cfg.out_dir = out;
      if (spectra_seed->count() > 0) {
        cfg.seed = seed;
        cfg.detector.seed = seed;
      }
      return gridwatch::cli::cmd_spectra(cfg, tick);
    }
    if (app.got_subcommand(selfcheck)) {
      return gridwatch::cli::cmd_selfcheck(dir);
    }
  } catch (const gridwatch::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gridwatch::cli::exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
