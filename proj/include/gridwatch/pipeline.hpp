#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "gridwatch/augment.hpp"
#include "gridwatch/ingest.hpp"
#include "gridwatch/les.hpp"
#include "gridwatch/locator.hpp"
#include "gridwatch/spectra.hpp"

namespace gridwatch::pipeline {

/// Two consecutive ticks must breach the MAD band before an event fires;
/// single-tick numerical glitches are suppressed.
inline constexpr int debounce_ticks = 2;

struct DetectorConfig {
  int window_cols = 200;
  int stride = 1;
  les::TestFunction test_function = les::TestFunction::parse("cp");
  double confidence_level = 0.95;
  int ring_L = 1;
  std::optional<augment::AugmentConfig> augment;
  double mad_kappa = 5.0;
  int history_len = 96;
  std::uint64_t seed = 42;  // master seed; per-tick substreams derive from (seed, tick)

  void validate() const;  // throws ConfigError
};

struct LawFit {
  double mp_l1_distance = 0.0;
  double ring_annulus_fraction = 0.0;
};

struct TickResult {
  long tick = 0;
  double les_value = 0.0;
  double msr_value = 0.0;
  int outlier_count = 0;
  double largest_eigenvalue = 0.0;
  locator::LocationReport location;  // always populated for clean ticks
  LawFit law_fit;
  bool degraded = false;  // ZeroVarianceRow mid-stream: tick skipped, fields unset
};

struct AnomalyEvent {
  long detection_tick = 0;  // second tick of the debounce run
  long onset_tick = 0;      // first tick beyond the MAD band
  double les_drop = 0.0;    // signed LES(detection) - trailing median
  std::vector<int> flagged_rows;     // 1-based, in the analysis (possibly lifted) space
  std::vector<int> flagged_devices;  // 0-based
  std::optional<locator::AugmentedCandidates> augmented_candidates;
  std::optional<locator::MappingRule> mapping_rule;
};

/// Columns tick-t+1 ... tick (1-based ticks; the last column is the current
/// tick). Throws InsufficientHistory when tick < t.
spectra::RawWindow form_window(const ingest::DataMatrix& source, long tick, int t);

/// standardize -> (optional tensor lift) -> covariance -> eigen -> LES/MSR ->
/// eta/threshold/flags, plus law fits: MP against the analysis covariance
/// (c = rows/t) and ring against the raw standardized window (cfg.ring_L).
/// Pure given (source, tick, cfg); propagates ZeroVarianceRow and
/// ConvergenceFailure.
TickResult process_tick(const ingest::DataMatrix& source, long tick, const DetectorConfig& cfg);

/// Scan a LES series for the first debounced MAD break: tick j flags when
/// |LES(j) - median(trailing history_len)| > mad_kappa * MAD(same trailing
/// window) at both j-1 and j. Returns an event skeleton (no location fields)
/// or nullopt; series shorter than the required history never flags.
std::optional<AnomalyEvent> detect(const les::LesSeries& history, const DetectorConfig& cfg);

/// Streaming decision state machine: owns the trailing LES history, applies
/// the debounced MAD rule with hysteresis (after an event fires, no new event
/// until the series re-enters the band), and stamps events with the location
/// fields of the detection tick. Single-consumer.
class Detector {
 public:
  explicit Detector(DetectorConfig cfg, int vars_per_device = 1);

  /// Feed one completed tick in order; degraded ticks are ignored.
  std::optional<AnomalyEvent> push(const TickResult& result);

  const std::deque<les::LesPoint>& history() const { return history_; }

 private:
  struct Breach {
    bool beyond = false;
    double departure = 0.0;
  };
  Breach evaluate(double les) const;

  DetectorConfig cfg_;
  int vars_per_device_ = 1;
  std::deque<les::LesPoint> history_;  // trailing values, excludes current
  int breach_run_ = 0;
  bool armed_ = true;
  long run_onset_tick_ = 0;
};

struct RunResult {
  std::vector<TickResult> ticks;
  std::vector<AnomalyEvent> events;
  les::LesSeries les_series;  // raw values of clean ticks, in tick order
};

/// Evaluate every full window (first tick = window_cols, then + stride) and
/// run the detector over the results in tick order. Tick evaluation is pure,
/// so it fans out over `threads` workers (0 = hardware concurrency) and the
/// merge re-establishes tick order; output is independent of thread count.
RunResult run_offline(const ingest::DataMatrix& source, const DetectorConfig& cfg, int threads = 0);

}  // namespace gridwatch::pipeline
