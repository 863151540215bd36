#include "gridwatch/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "gridwatch/report.hpp"
#include "gridwatch/rng.hpp"
#include "gridwatch/spectra.hpp"

namespace gridwatch::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string("cannot open ") + what + " " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw ConfigError(std::string(what) + " " + path + " is not valid JSON");
  }
  return doc;
}

void expect_keys(const json& obj, std::initializer_list<const char*> allowed, const char* scope) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown key '" + it.key() + "' in " + scope);
  }
}

template <typename T>
void read_to(const json& obj, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

json effective_config_json(const RunConfig& cfg) {
  json c;
  c["window_cols"] = cfg.detector.window_cols;
  c["stride"] = cfg.detector.stride;
  c["test_function"] = cfg.detector.test_function.name();
  c["cp_coefficients"] = cfg.detector.test_function.coefficients;
  c["confidence_level"] = cfg.detector.confidence_level;
  c["ring_L"] = cfg.detector.ring_L;
  c["augment"] = {{"enabled", cfg.augment_enabled},
                  {"n", cfg.augment_n},
                  {"k", cfg.augment_k},
                  {"tau", cfg.augment_tau}};
  c["mad_kappa"] = cfg.detector.mad_kappa;
  c["history_len"] = cfg.detector.history_len;
  c["tau_snr"] = cfg.tau_snr;
  c["threads"] = cfg.threads;
  c["emit"] = {{"esd", cfg.emit.esd},
               {"ring", cfg.emit.ring},
               {"les", cfg.emit.les},
               {"eta_surface", cfg.emit.eta_surface},
               {"events", cfg.emit.events}};
  return c;
}

void write_manifest(const RunConfig& cfg, const char* command,
                    const std::vector<std::string>& outputs, const json& extra = json::object()) {
  json m;
  m["version"] = report::version;
  m["command"] = command;
  m["seed"] = cfg.seed;
  m["input"] = {{"kind", cfg.input_path.empty() ? "scenario" : "csv"},
                {"path", cfg.input_path.empty() ? cfg.scenario_path : cfg.input_path}};
  m["config"] = effective_config_json(cfg);
  m["outputs"] = outputs;
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  const std::string path = (fs::path(cfg.out_dir) / "manifest.json").string();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << m.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

/// AugmentConfig resolution needs the source row count; k = 1 leaves the
/// block structure trivial and is treated as augmentation off.
void resolve_augment(RunConfig& cfg, long p) {
  if (!cfg.augment_enabled || cfg.augment_k < 2) return;
  augment::AugmentConfig a;
  a.k = cfg.augment_k;
  a.n = cfg.augment_n > 0 ? cfg.augment_n : static_cast<int>(p / cfg.augment_k);
  if (cfg.augment_tau != 1.0) {
    a.tau.assign(static_cast<std::size_t>(cfg.detector.window_cols), cfg.augment_tau);
  }
  a.validate(p);
  cfg.detector.augment = a;
}

/// ESD/MP and ring plot data for the window ending at `tick`, raw
/// (unaugmented) analysis path, ring substream identical to process_tick's.
std::vector<std::string> write_window_spectra(const RunConfig& cfg,
                                              const ingest::DataMatrix& source, long tick,
                                              bool esd, bool ring, bool summary) {
  std::vector<std::string> written;
  const spectra::RawWindow window =
      pipeline::form_window(source, tick, cfg.detector.window_cols);
  const spectra::StandardizedWindow std_w = spectra::standardize(window);
  const double c = static_cast<double>(std_w.p()) / static_cast<double>(std_w.t());
  const spectra::MpReference mp = spectra::mp_reference(c, 1.0);
  const spectra::EigenSpectrum spectrum = spectra::eigen(spectra::covariance(std_w));
  const std::vector<double> lambda = spectrum.real_eigenvalues();
  const int outliers = static_cast<int>(
      std::count_if(lambda.begin(), lambda.end(), [&](double l) { return l > mp.b; }));
  const double mp_l1 = spectra::mp_l1_distance(lambda, c, 1.0);

  const spectra::RingReference ring_ref = spectra::ring_reference(c, cfg.detector.ring_L);
  const std::uint64_t ring_seed = rng::derive(rng::derive(cfg.detector.seed, rng::salt_ring_tick),
                                              static_cast<std::uint64_t>(tick));
  const spectra::EigenSpectrum ring_spec = spectra::ring_product(
      std::vector<spectra::StandardizedWindow>(static_cast<std::size_t>(cfg.detector.ring_L),
                                               std_w),
      cfg.detector.ring_L, ring_seed);
  const double ring_frac = spectra::ring_annulus_fraction(ring_spec, ring_ref.inner_radius);

  const fs::path root(cfg.out_dir);
  if (esd) {
    report::write_esd_csv(spectra::esd_histogram(spectrum, 50), mp, (root / "esd.csv").string());
    written.push_back("esd.csv");
  }
  if (ring) {
    report::write_ring_csv(ring_spec, (root / "ring.csv").string());
    written.push_back("ring.csv");
  }
  if (summary) {
    std::vector<std::pair<std::string, std::string>> entries{
        {"tick", std::to_string(tick)},
        {"p", std::to_string(std_w.p())},
        {"t", std::to_string(std_w.t())},
        {"c", report::format_double(c)},
        {"sigma2", report::format_double(1.0)},
        {"mp_a", report::format_double(mp.a)},
        {"mp_b", report::format_double(mp.b)},
        {"ring_inner", report::format_double(ring_ref.inner_radius)},
        {"ring_outer", report::format_double(1.0)},
        {"outlier_count", std::to_string(outliers)},
        {"mp_l1", report::format_double(mp_l1)},
        {"ring_fraction", report::format_double(ring_frac)}};
    report::write_spectra_summary_csv(entries, (root / "spectra_summary.csv").string());
    written.push_back("spectra_summary.csv");
  }
  std::cout << "tick=" << tick << " outliers=" << outliers
            << " mp_l1=" << report::format_double(mp_l1)
            << " ring_fraction=" << report::format_double(ring_frac) << '\n';
  return written;
}

std::vector<std::string> emit_run_outputs(const RunConfig& cfg, const pipeline::RunResult& run,
                                          const ingest::DataMatrix& source) {
  fs::create_directories(cfg.out_dir);
  const fs::path root(cfg.out_dir);
  std::vector<std::string> outputs;
  report::write_ticks_csv(run.ticks, (root / "ticks.csv").string());
  outputs.push_back("ticks.csv");
  if (cfg.emit.les) {
    report::write_les_csv(run.les_series, (root / "les.csv").string());
    outputs.push_back("les.csv");
  }
  if (cfg.emit.events) {
    report::write_events_csv(run.events, (root / "events.csv").string());
    outputs.push_back("events.csv");
  }
  if (cfg.emit.eta_surface) {
    report::write_eta_surface_csv(run.ticks, (root / "eta_surface.csv").string());
    outputs.push_back("eta_surface.csv");
  }
  if (cfg.emit.esd || cfg.emit.ring) {
    long last_clean = 0;
    for (const auto& tr : run.ticks) {
      if (!tr.degraded) last_clean = tr.tick;
    }
    if (last_clean > 0) {
      auto spectra_files =
          write_window_spectra(cfg, source, last_clean, cfg.emit.esd, cfg.emit.ring, false);
      outputs.insert(outputs.end(), spectra_files.begin(), spectra_files.end());
    }
  }
  return outputs;
}

}  // namespace

void RunConfig::validate_source_choice() const {
  if (input_path.empty() == scenario_path.empty()) {
    throw ConfigError("exactly one of --input and --scenario must be given");
  }
}

RunConfig load_run_config(const std::string& config_path) {
  RunConfig cfg;
  cfg.detector.test_function = les::TestFunction::parse("cp");
  if (config_path.empty()) {
    cfg.detector.seed = cfg.seed;
    return cfg;
  }
  cfg.config_path = config_path;
  const json doc = load_json_file(config_path, "config");
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  expect_keys(doc,
              {"window_cols", "stride", "test_function", "cp_coefficients", "confidence_level",
               "ring_L", "augment", "mad_kappa", "history_len", "seed", "tau_snr", "threads",
               "emit"},
              "config");
  read_to(doc, "window_cols", cfg.detector.window_cols);
  read_to(doc, "stride", cfg.detector.stride);
  std::string tf_name = "cp";
  std::vector<double> coeffs;
  read_to(doc, "test_function", tf_name);
  read_to(doc, "cp_coefficients", coeffs);
  cfg.detector.test_function = les::TestFunction::parse(tf_name, coeffs);
  read_to(doc, "confidence_level", cfg.detector.confidence_level);
  read_to(doc, "ring_L", cfg.detector.ring_L);
  read_to(doc, "mad_kappa", cfg.detector.mad_kappa);
  read_to(doc, "history_len", cfg.detector.history_len);
  read_to(doc, "seed", cfg.seed);
  read_to(doc, "tau_snr", cfg.tau_snr);
  read_to(doc, "threads", cfg.threads);
  if (doc.contains("augment")) {
    const json& a = doc.at("augment");
    expect_keys(a, {"enabled", "n", "k", "tau"}, "config.augment");
    read_to(a, "enabled", cfg.augment_enabled);
    read_to(a, "n", cfg.augment_n);
    read_to(a, "k", cfg.augment_k);
    read_to(a, "tau", cfg.augment_tau);
  }
  if (doc.contains("emit")) {
    const json& e = doc.at("emit");
    expect_keys(e, {"esd", "ring", "les", "eta_surface", "events"}, "config.emit");
    read_to(e, "esd", cfg.emit.esd);
    read_to(e, "ring", cfg.emit.ring);
    read_to(e, "les", cfg.emit.les);
    read_to(e, "eta_surface", cfg.emit.eta_surface);
    read_to(e, "events", cfg.emit.events);
  }
  cfg.detector.seed = cfg.seed;
  cfg.detector.validate();
  return cfg;
}

ingest::ScenarioSpec load_scenario_spec(const std::string& path) {
  const json doc = load_json_file(path, "scenario spec");
  if (!doc.is_object()) throw InvalidSpec("scenario root must be a JSON object");
  expect_keys(doc, {"rows", "ticks", "baseline", "signals"}, "scenario");
  if (!doc.contains("rows") || !doc.contains("ticks")) {
    throw InvalidSpec("scenario needs 'rows' and 'ticks'");
  }
  ingest::ScenarioSpec spec;
  read_to(doc, "rows", spec.rows);
  read_to(doc, "ticks", spec.ticks);
  if (doc.contains("baseline")) {
    const json& b = doc.at("baseline");
    expect_keys(b, {"value", "jitter_pct"}, "scenario.baseline");
    read_to(b, "value", spec.baseline_value);
    read_to(b, "jitter_pct", spec.jitter_pct);
  }
  if (doc.contains("signals")) {
    const json& sigs = doc.at("signals");
    if (!sigs.is_array()) throw InvalidSpec("'signals' must be an array");
    for (const json& s : sigs) {
      expect_keys(s, {"row", "start", "end", "base", "step"}, "scenario.signals[]");
      if (!s.contains("row") || !s.contains("start") || !s.contains("step")) {
        throw InvalidSpec("each signal needs 'row', 'start', and 'step'");
      }
      ingest::SignalSpec sig;
      sig.end = spec.ticks;
      sig.base = spec.baseline_value;
      read_to(s, "row", sig.row);
      read_to(s, "start", sig.start);
      read_to(s, "end", sig.end);
      read_to(s, "base", sig.base);
      read_to(s, "step", sig.step);
      spec.signals.push_back(sig);
    }
  }
  spec.validate();
  return spec;
}

ingest::DataMatrix load_source(const RunConfig& cfg) {
  ingest::DataMatrix d;
  if (!cfg.input_path.empty()) {
    d = ingest::parse_csv(cfg.input_path);
  } else {
    d = ingest::generate_scenario(load_scenario_spec(cfg.scenario_path), cfg.seed);
  }
  d = ingest::minmax_normalize(d);
  if (cfg.tau_snr > 0.0) {
    ingest::NoiseSpec noise{cfg.tau_snr, 0.0, cfg.seed};
    d = ingest::inject_noise(d, noise);
  }
  return d;
}

int cmd_analyze(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  cfg.validate_source_choice();
  if (cfg.out_dir.empty()) throw ConfigError("an output directory is required");
  const ingest::DataMatrix source = load_source(cfg);
  resolve_augment(cfg, source.p());
  const pipeline::RunResult run = pipeline::run_offline(source, cfg.detector, cfg.threads);
  fs::create_directories(cfg.out_dir);
  std::vector<std::string> outputs = emit_run_outputs(cfg, run, source);
  write_manifest(cfg, "analyze", outputs);
  long degraded = 0;
  for (const auto& tr : run.ticks) degraded += tr.degraded ? 1 : 0;
  std::cout << "analyzed ticks=" << run.ticks.size() << " events=" << run.events.size()
            << " degraded=" << degraded << " out=" << cfg.out_dir << '\n';
  return 0;
}

int cmd_stream(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  if (cfg.input_path.empty()) throw ConfigError("stream mode follows a CSV file (--follow)");
  if (!cfg.scenario_path.empty()) throw ConfigError("stream mode takes no scenario");
  if (cfg.out_dir.empty()) throw ConfigError("an output directory is required");
  const ingest::DataMatrix source = load_source(cfg);
  resolve_augment(cfg, source.p());

  pipeline::RunResult run;
  run.les_series.test_function = cfg.detector.test_function;
  pipeline::Detector detector(cfg.detector, source.vars_per_device);
  for (long tick = cfg.detector.window_cols; tick <= source.t_total();
       tick += cfg.detector.stride) {
    pipeline::TickResult tr;
    try {
      tr = pipeline::process_tick(source, tick, cfg.detector);
    } catch (const ZeroVarianceRow&) {
      tr = pipeline::TickResult{};
      tr.tick = tick;
      tr.degraded = true;
    }
    if (auto ev = detector.push(tr)) {
      std::cout << "event detection_tick=" << ev->detection_tick
                << " onset_tick=" << ev->onset_tick
                << " les_drop=" << report::format_double(ev->les_drop)
                << " rows=" << report::join_rows(ev->flagged_rows)
                << " devices=" << report::join_rows(ev->flagged_devices) << '\n';
      run.events.push_back(*ev);
    }
    if (!tr.degraded) run.les_series.points.push_back({tr.tick, tr.les_value});
    run.ticks.push_back(std::move(tr));
  }
  std::vector<std::string> outputs = emit_run_outputs(cfg, run, source);
  write_manifest(cfg, "stream", outputs);
  std::cout << "streamed ticks=" << run.ticks.size() << " events=" << run.events.size()
            << " out=" << cfg.out_dir << '\n';
  return 0;
}

int cmd_spectra(const RunConfig& cfg_in, long tick) {
  RunConfig cfg = cfg_in;
  cfg.validate_source_choice();
  if (cfg.out_dir.empty()) throw ConfigError("an output directory is required");
  const ingest::DataMatrix source = load_source(cfg);
  fs::create_directories(cfg.out_dir);
  std::vector<std::string> outputs = write_window_spectra(cfg, source, tick, true, true, true);
  write_manifest(cfg, "spectra", outputs, json{{"tick", tick}});
  return 0;
}

int cmd_synth(const std::string& spec_path, std::uint64_t seed, const std::string& out_path) {
  ingest::ScenarioSpec spec = load_scenario_spec(spec_path);
  // Pad the row count to the CSV schema's 7-variables-per-device layout; pad
  // rows are plain jittered baselines and signal rows keep their substreams.
  ingest::ScenarioSpec padded = spec;
  padded.rows = ((spec.rows + 6) / 7) * 7;
  ingest::DataMatrix d = ingest::generate_scenario(padded, seed);
  d.device_count = padded.rows / 7;
  d.vars_per_device = ingest::vars_per_telemetry_device;
  d.device_ids.clear();
  d.row_labels.clear();
  char id[16];
  for (int dev = 0; dev < d.device_count; ++dev) {
    std::snprintf(id, sizeof id, "dev%03d", dev);
    d.device_ids.emplace_back(id);
    for (int k = 0; k < ingest::vars_per_telemetry_device; ++k) {
      d.row_labels.push_back({dev, ingest::telemetry_variables[k]});
    }
  }
  ingest::write_csv(d, out_path);
  std::cout << "wrote " << out_path << " rows=" << d.p() << " ticks=" << d.t_total()
            << " devices=" << d.device_count << '\n';
  return 0;
}

int cmd_selfcheck(const std::string& dir) {
  const std::vector<std::string> problems = report::self_check(dir);
  if (problems.empty()) {
    std::cout << "selfcheck passed: " << dir << '\n';
    return 0;
  }
  for (const std::string& p : problems) std::cerr << "selfcheck: " << p << '\n';
  return 2;
}

int exit_code(const Error& error) {
  switch (error.category()) {
    case Error::Category::input:
      return 2;
    case Error::Category::config:
      return 3;
    case Error::Category::numeric:
      return 4;
  }
  return 4;
}

}  // namespace gridwatch::cli
