#include "gridwatch/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "gridwatch/errors.hpp"
#include "gridwatch/rng.hpp"
#include "gridwatch/stats.hpp"

namespace gridwatch::pipeline {

void DetectorConfig::validate() const {
  if (window_cols < 2) throw ConfigError("window_cols must be >= 2");
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (history_len < 10) throw ConfigError("history_len must be >= 10");
  if (mad_kappa <= 0.0) throw ConfigError("mad_kappa must be > 0");
  if (confidence_level <= 0.0 || confidence_level >= 1.0)
    throw ConfigError("confidence_level must lie in (0, 1)");
  if (ring_L < 1) throw ConfigError("ring_L must be >= 1");
}

spectra::RawWindow form_window(const ingest::DataMatrix& source, long tick, int t) {
  if (tick < t) throw InsufficientHistory(tick, t);
  if (tick > source.t_total()) {
    throw IndexOutOfRange("tick " + std::to_string(tick) + " beyond source length " +
                          std::to_string(source.t_total()));
  }
  return spectra::RawWindow::make(source.values.middleCols(tick - t, t), tick - t + 1, tick,
                                  source.row_labels);
}

namespace {

// Devices behind a 1-based row set (flag_rows output is 1-based; the device
// map wants 0-based rows).
std::vector<int> devices_for_rows(const std::vector<int>& rows_1based, int vars_per_device) {
  std::vector<int> zero_based;
  zero_based.reserve(rows_1based.size());
  for (int r : rows_1based) zero_based.push_back(r - 1);
  return locator::rows_to_devices(zero_based, vars_per_device);
}

}  // namespace

TickResult process_tick(const ingest::DataMatrix& source, long tick, const DetectorConfig& cfg) {
  cfg.validate();
  const spectra::RawWindow window = form_window(source, tick, cfg.window_cols);
  const spectra::StandardizedWindow std_window = spectra::standardize(window);

  spectra::CovarianceMatrix sigma;
  if (cfg.augment) {
    cfg.augment->validate(std_window.p());
    sigma = augment::augmented_covariance(augment::tensor_columns(std_window, *cfg.augment),
                                          cfg.augment->tau);
  } else {
    sigma = spectra::covariance(std_window);
  }
  const spectra::EigenSpectrum spectrum = spectra::eigen(sigma);
  const std::vector<double> lambda = spectrum.real_eigenvalues();

  TickResult out;
  out.tick = tick;
  out.les_value = les::les_value(spectrum, cfg.test_function);
  out.msr_value = les::msr(spectrum);
  out.largest_eigenvalue = lambda.front();

  const double c_analysis = static_cast<double>(sigma.p()) / static_cast<double>(std_window.t());
  const double b_edge = spectra::mp_upper_edge(c_analysis, 1.0);
  out.outlier_count = static_cast<int>(std::count_if(
      lambda.begin(), lambda.end(), [b_edge](double l) { return l > b_edge; }));
  out.law_fit.mp_l1_distance = spectra::mp_l1_distance(lambda, c_analysis, 1.0);

  // Ring fit always reads the raw standardized window: the lifted matrix has
  // no product-of-factors analogue.
  const double c_raw = static_cast<double>(std_window.p()) / static_cast<double>(std_window.t());
  const spectra::RingReference ring_ref = spectra::ring_reference(c_raw, cfg.ring_L);
  const std::uint64_t ring_seed = rng::derive(rng::derive(cfg.seed, rng::salt_ring_tick),
                                              static_cast<std::uint64_t>(tick));
  const spectra::EigenSpectrum ring = spectra::ring_product(
      std::vector<spectra::StandardizedWindow>(static_cast<std::size_t>(cfg.ring_L), std_window),
      cfg.ring_L, ring_seed);
  out.law_fit.ring_annulus_fraction = spectra::ring_annulus_fraction(ring, ring_ref.inner_radius);

  locator::LocationReport& loc = out.location;
  loc.tick = tick;
  loc.confidence_level = cfg.confidence_level;
  loc.z_coefficient = stats::two_sided_z(cfg.confidence_level);
  loc.eta = locator::eta_indicator(spectrum, b_edge);
  loc.eta_threshold = locator::eta_threshold(loc.eta, cfg.confidence_level);
  loc.flagged_rows = locator::flag_rows(loc.eta, loc.eta_threshold);
  if (cfg.augment && cfg.augment->k >= 2 && !loc.flagged_rows.empty()) {
    const locator::AugmentedIndexMap map{cfg.augment->n, cfg.augment->k,
                                         locator::MappingRule::both};
    const locator::AugmentedCandidates cands =
        locator::map_augmented_indices(loc.flagged_rows, map);
    std::vector<int> union_rows = cands.ceil_set;
    union_rows.insert(union_rows.end(), cands.mod_set.begin(), cands.mod_set.end());
    loc.flagged_devices = devices_for_rows(union_rows, source.vars_per_device);
  } else {
    loc.flagged_devices = devices_for_rows(loc.flagged_rows, source.vars_per_device);
  }
  return out;
}

namespace {

struct BreachStat {
  bool beyond = false;
  double departure = 0.0;
};

BreachStat breach_at(const std::vector<double>& values, std::size_t idx, const DetectorConfig& cfg) {
  const auto h = static_cast<std::size_t>(cfg.history_len);
  BreachStat st;
  if (idx < h) return st;
  std::vector<double> trailing(values.begin() + static_cast<long>(idx - h),
                               values.begin() + static_cast<long>(idx));
  const double med = stats::median(trailing);
  const double mad = stats::mad(trailing);
  st.departure = values[idx] - med;
  st.beyond = std::abs(st.departure) > cfg.mad_kappa * mad;
  return st;
}

}  // namespace

std::optional<AnomalyEvent> detect(const les::LesSeries& history, const DetectorConfig& cfg) {
  cfg.validate();
  const std::size_t n = history.points.size();
  if (n < static_cast<std::size_t>(cfg.history_len) + debounce_ticks) return std::nullopt;
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = history.points[i].value;
  int run = 0;
  std::size_t run_start = 0;
  for (std::size_t j = static_cast<std::size_t>(cfg.history_len); j < n; ++j) {
    const BreachStat st = breach_at(values, j, cfg);
    if (!st.beyond) {
      run = 0;
      continue;
    }
    if (run == 0) run_start = j;
    if (++run >= debounce_ticks) {
      AnomalyEvent ev;
      ev.detection_tick = history.points[j].tick;
      ev.onset_tick = history.points[run_start].tick;
      ev.les_drop = st.departure;
      return ev;
    }
  }
  return std::nullopt;
}

Detector::Detector(DetectorConfig cfg, int vars_per_device)
    : cfg_(std::move(cfg)), vars_per_device_(vars_per_device) {
  cfg_.validate();
}

Detector::Breach Detector::evaluate(double les) const {
  Breach st;
  if (history_.size() < static_cast<std::size_t>(cfg_.history_len)) return st;
  std::vector<double> trailing;
  trailing.reserve(static_cast<std::size_t>(cfg_.history_len));
  for (auto it = history_.end() - cfg_.history_len; it != history_.end(); ++it)
    trailing.push_back(it->value);
  const double med = stats::median(trailing);
  const double mad = stats::mad(trailing);
  st.departure = les - med;
  st.beyond = std::abs(st.departure) > cfg_.mad_kappa * mad;
  return st;
}

std::optional<AnomalyEvent> Detector::push(const TickResult& result) {
  if (result.degraded) return std::nullopt;
  const Breach st = evaluate(result.les_value);
  std::optional<AnomalyEvent> fired;
  if (st.beyond) {
    if (breach_run_ == 0) run_onset_tick_ = result.tick;
    ++breach_run_;
    if (breach_run_ >= debounce_ticks && armed_) {
      AnomalyEvent ev;
      ev.detection_tick = result.tick;
      ev.onset_tick = run_onset_tick_;
      ev.les_drop = st.departure;
      ev.flagged_rows = result.location.flagged_rows;
      ev.flagged_devices = result.location.flagged_devices;
      if (cfg_.augment && cfg_.augment->k >= 2 && !ev.flagged_rows.empty()) {
        const locator::AugmentedIndexMap map{cfg_.augment->n, cfg_.augment->k,
                                             locator::MappingRule::both};
        ev.augmented_candidates = locator::map_augmented_indices(ev.flagged_rows, map);
        ev.mapping_rule = locator::MappingRule::both;
      }
      armed_ = false;
      fired = std::move(ev);
    }
  } else {
    breach_run_ = 0;
    armed_ = true;  // hysteresis: re-arm only after re-entering the band
  }
  history_.push_back({result.tick, result.les_value});
  while (history_.size() > static_cast<std::size_t>(cfg_.history_len) + 2) history_.pop_front();
  return fired;
}

RunResult run_offline(const ingest::DataMatrix& source, const DetectorConfig& cfg, int threads) {
  cfg.validate();
  std::vector<long> ticks;
  for (long tk = cfg.window_cols; tk <= source.t_total(); tk += cfg.stride) ticks.push_back(tk);

  RunResult run;
  run.ticks.resize(ticks.size());
  run.les_series.test_function = cfg.test_function;

  unsigned worker_count = threads > 0 ? static_cast<unsigned>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t worker_cap = std::max<std::size_t>(ticks.size(), 1);
  if (worker_count > worker_cap) worker_count = static_cast<unsigned>(worker_cap);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= ticks.size()) return;
      try {
        run.ticks[i] = process_tick(source, ticks[i], cfg);
      } catch (const ZeroVarianceRow&) {
        run.ticks[i] = TickResult{};
        run.ticks[i].tick = ticks[i];
        run.ticks[i].degraded = true;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (worker_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  Detector detector(cfg, source.vars_per_device);
  for (const TickResult& tr : run.ticks) {
    if (auto ev = detector.push(tr)) run.events.push_back(*ev);
    if (!tr.degraded) run.les_series.points.push_back({tr.tick, tr.les_value});
  }
  return run;
}

}  // namespace gridwatch::pipeline
