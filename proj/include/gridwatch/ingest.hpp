#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridwatch/spectra.hpp"

namespace gridwatch::ingest {

/// One device's seven measurements at one timestamp.
struct TelemetryFrame {
  long long timestamp = 0;  // epoch seconds
  std::string device_id;
  double ua = 0, ub = 0, uc = 0;
  double ia = 0, ib = 0, ic = 0;
  double load = 0;
};

inline constexpr int vars_per_telemetry_device = 7;
inline const char* const telemetry_variables[vars_per_telemetry_device] = {"ua", "ub", "uc", "ia",
                                                                           "ib", "ic", "load"};

/// Dense P x T spatio-temporal matrix with row metadata. CSV telemetry packs
/// 7 rows per device in registration order; scenario matrices use one row per
/// signal channel (vars_per_device = 1).
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<spectra::RowLabel> row_labels;
  std::vector<long long> tick_timestamps;
  std::vector<std::string> device_ids;  // registration order
  int device_count = 0;
  int vars_per_device = 1;

  long p() const { return values.rows(); }
  long t_total() const { return values.cols(); }
};

struct NoiseSpec {
  double tau_snr = 0.0;
  double gamma = 0.0;  // derived; see gamma_for_snr
  std::uint64_t seed = 0;
};

struct SignalSpec {
  int row = 0;  // 1-based
  long start = 0, end = 0;  // 1-based tick interval, inclusive
  double base = 0.0, step = 0.0;
};

struct ScenarioSpec {
  int rows = 0;
  long ticks = 0;
  double baseline_value = 20.0;
  double jitter_pct = 0.5;  // sigma as percent of the level; zero jitter degenerates min-max
  std::vector<SignalSpec> signals;

  void validate() const;  // throws InvalidSpec
};

/// Strict schema: header `timestamp,device_id,ua,ub,uc,ia,ib,ic,load`,
/// timestamps as epoch seconds or ISO-8601 (UTC). Devices register in
/// first-appearance order; rows may arrive shuffled but every device needs
/// every timestamp. Throws MalformedRow / MissingTick / NonMonotonicTimestamps.
DataMatrix parse_csv(const std::string& path);

/// Inverse of parse_csv for well-formed matrices (P = 7m telemetry layout).
void write_csv(const DataMatrix& d, const std::string& path);

/// Row-wise affine map onto [0,1]; constant rows map to 0.5 so later noise
/// injection can restore variance.
DataMatrix minmax_normalize(const DataMatrix& d);

/// gamma = sqrt(Tr(D D^T) / (Tr(E E^T) tau_snr)), signal trace from the
/// noise-free matrix.
double gamma_for_snr(const DataMatrix& d_tilde, const Eigen::MatrixXd& noise, double tau_snr);

/// Standard-normal matrix with one deterministic substream per column, so any
/// column's noise is independent of how much of the matrix has been seen.
Eigen::MatrixXd noise_matrix(long p, long t, std::uint64_t seed);

/// D_hat = D + gamma E. Fills spec.gamma. tau_snr <= 0 returns the input.
DataMatrix inject_noise(const DataMatrix& d_tilde, NoiseSpec& spec);

/// Synthetic stepped-baseline matrix: signal rows hold base on [1, start-1],
/// step on [start, end], base after; every row carries Gaussian jitter with
/// sigma = jitter_pct/100 * |row base|. One substream per row.
DataMatrix generate_scenario(const ScenarioSpec& spec, std::uint64_t seed);

/// Parse "2024-01-31T12:00:00Z" or plain epoch seconds.
long long parse_timestamp(const std::string& text);

}  // namespace gridwatch::ingest
