#pragma once

#include <cstdint>
#include <string>

#include "gridwatch/errors.hpp"
#include "gridwatch/ingest.hpp"
#include "gridwatch/pipeline.hpp"

namespace gridwatch::cli {

struct EmitFlags {
  bool esd = false;
  bool ring = false;
  bool les = true;
  bool eta_surface = false;
  bool events = true;
};

/// Effective run configuration: hard defaults overlaid by the JSON config
/// file, then by command-line flags. Exactly one of input_path/scenario_path
/// may be set.
struct RunConfig {
  std::string input_path;
  std::string scenario_path;
  std::string config_path;
  std::string out_dir;
  pipeline::DetectorConfig detector;
  double tau_snr = 0.0;  // <= 0 disables noise injection
  std::uint64_t seed = 42;
  int threads = 0;
  EmitFlags emit;
  bool augment_enabled = false;
  int augment_n = 0;
  int augment_k = 2;
  double augment_tau = 1.0;  // scalar broadcast weight

  void validate_source_choice() const;  // throws ConfigError
};

/// Defaults overlaid with the JSON document at path; unknown keys are
/// configuration errors. Empty path returns the defaults.
RunConfig load_run_config(const std::string& config_path);

/// Scenario document: rows, ticks, baseline{value,jitter_pct},
/// signals[{row,start,end,base,step}].
ingest::ScenarioSpec load_scenario_spec(const std::string& path);

/// Load, normalize, and (tau_snr > 0) noise-inject the run's source matrix.
ingest::DataMatrix load_source(const RunConfig& cfg);

int cmd_analyze(const RunConfig& cfg);
int cmd_stream(const RunConfig& cfg);
int cmd_spectra(const RunConfig& cfg, long tick);
int cmd_synth(const std::string& spec_path, std::uint64_t seed, const std::string& out_path);
int cmd_selfcheck(const std::string& dir);

/// 2 input, 3 config, 4 numeric.
int exit_code(const Error& error);

}  // namespace gridwatch::cli
