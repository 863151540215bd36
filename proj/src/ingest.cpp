#include "gridwatch/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "gridwatch/errors.hpp"
#include "gridwatch/rng.hpp"

namespace gridwatch::ingest {

namespace {

constexpr const char* kCsvHeader = "timestamp,device_id,ua,ub,uc,ia,ib,ic,load";

// Hinnant's days-from-civil; proleptic Gregorian, epoch 1970-01-01.
long long days_from_civil(long long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

double parse_double_field(const std::string& field) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw MalformedRow(0, "bad numeric field '" + field + "'");
  }
  return value;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

long long parse_timestamp(const std::string& text) {
  if (text.empty()) throw MalformedRow(0, "empty timestamp");
  bool digits_only = true;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(text[i]))) continue;
    if (i == 0 && text[i] == '-' && text.size() > 1) continue;
    digits_only = false;
    break;
  }
  if (digits_only) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw MalformedRow(0, "bad epoch timestamp '" + text + "'");
    }
    return value;
  }
  int year = 0;
  unsigned month = 0, day = 0, hour = 0, minute = 0, second = 0;
  char sep = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%d-%2u-%2u%c%2u:%2u:%2u%n", &year, &month, &day, &sep, &hour,
                  &minute, &second, &consumed) != 7 ||
      (sep != 'T' && sep != ' ')) {
    throw MalformedRow(0, "unparseable timestamp '" + text + "'");
  }
  std::string rest = text.substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest != "Z") throw MalformedRow(0, "unsupported timestamp suffix '" + rest + "'");
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60) {
    throw MalformedRow(0, "timestamp field out of range in '" + text + "'");
  }
  return days_from_civil(year, month, day) * 86400LL + hour * 3600LL + minute * 60LL + second;
}

DataMatrix parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw MalformedRow(1, "missing header");
  if (strip_cr(line) != kCsvHeader) {
    throw MalformedRow(1, "header must be exactly '" + std::string(kCsvHeader) + "'");
  }

  std::vector<std::string> device_ids;
  std::unordered_map<std::string, int> device_index;
  // (device, timestamp) -> 7 values; ordered map canonicalizes shuffled input.
  std::map<std::pair<int, long long>, std::array<double, 7>> samples;

  long line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 9) {
      throw MalformedRow(line_number,
                         "expected 9 fields, got " + std::to_string(fields.size()));
    }
    try {
      long long ts = parse_timestamp(fields[0]);
      if (ts < 0) throw MalformedRow(0, "negative timestamp");
      const std::string& id = fields[1];
      if (id.empty()) throw MalformedRow(0, "empty device_id");
      auto [it, inserted] = device_index.try_emplace(id, static_cast<int>(device_ids.size()));
      if (inserted) device_ids.push_back(id);
      std::array<double, 7> vals{};
      for (int k = 0; k < 7; ++k) vals[static_cast<std::size_t>(k)] = parse_double_field(fields[static_cast<std::size_t>(k + 2)]);
      auto [sit, fresh] = samples.try_emplace({it->second, ts}, vals);
      (void)sit;
      if (!fresh) {
        throw NonMonotonicTimestamps("device " + id + " repeats timestamp " + std::to_string(ts));
      }
    } catch (const MalformedRow& e) {
      throw MalformedRow(line_number, e.reason);
    }
  }
  if (device_ids.empty()) throw MalformedRow(line_number, "no data rows");

  std::vector<long long> ticks;
  for (const auto& [key, vals] : samples) {
    (void)vals;
    if (ticks.empty() || ticks.back() != key.second) ticks.push_back(key.second);
  }
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());

  const int m = static_cast<int>(device_ids.size());
  const long t_total = static_cast<long>(ticks.size());
  DataMatrix out;
  out.values.resize(static_cast<long>(m) * vars_per_telemetry_device, t_total);
  out.tick_timestamps = ticks;
  out.device_ids = device_ids;
  out.device_count = m;
  out.vars_per_device = vars_per_telemetry_device;
  for (int dev = 0; dev < m; ++dev) {
    for (long col = 0; col < t_total; ++col) {
      auto it = samples.find({dev, ticks[static_cast<std::size_t>(col)]});
      if (it == samples.end()) {
        throw MissingTick(device_ids[static_cast<std::size_t>(dev)], ticks[static_cast<std::size_t>(col)]);
      }
      for (int k = 0; k < 7; ++k) {
        out.values(static_cast<long>(dev) * 7 + k, col) = it->second[static_cast<std::size_t>(k)];
      }
    }
    for (int k = 0; k < 7; ++k) {
      out.row_labels.push_back({dev, telemetry_variables[k]});
    }
  }
  return out;
}

void write_csv(const DataMatrix& d, const std::string& path) {
  if (d.vars_per_device != vars_per_telemetry_device ||
      d.p() != static_cast<long>(d.device_count) * vars_per_telemetry_device) {
    throw ShapeMismatch("write_csv needs the 7-rows-per-device telemetry layout");
  }
  if (static_cast<long>(d.tick_timestamps.size()) != d.t_total()) {
    throw ShapeMismatch("tick_timestamps length does not match column count");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << kCsvHeader << '\n';
  char buf[32];
  for (long col = 0; col < d.t_total(); ++col) {
    for (int dev = 0; dev < d.device_count; ++dev) {
      out << d.tick_timestamps[static_cast<std::size_t>(col)] << ','
          << d.device_ids[static_cast<std::size_t>(dev)];
      for (int k = 0; k < 7; ++k) {
        // %.17g keeps the parse_csv round trip bit exact on doubles.
        std::snprintf(buf, sizeof buf, "%.17g", d.values(static_cast<long>(dev) * 7 + k, col));
        out << ',' << buf;
      }
      out << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path);
}

DataMatrix minmax_normalize(const DataMatrix& d) {
  DataMatrix out = d;
  for (long i = 0; i < d.p(); ++i) {
    const double lo = d.values.row(i).minCoeff();
    const double hi = d.values.row(i).maxCoeff();
    const double span = hi - lo;
    if (span > 0.0) {
      out.values.row(i) = (d.values.row(i).array() - lo) / span;
    } else {
      out.values.row(i).setConstant(0.5);
    }
  }
  return out;
}

double gamma_for_snr(const DataMatrix& d_tilde, const Eigen::MatrixXd& noise, double tau_snr) {
  if (tau_snr <= 0.0) throw ConfigError("tau_snr must be positive");
  if (noise.rows() != d_tilde.p() || noise.cols() != d_tilde.t_total()) {
    throw ShapeMismatch("noise matrix shape differs from data matrix");
  }
  const double signal_trace = d_tilde.values.squaredNorm();
  const double noise_trace = noise.squaredNorm();
  if (noise_trace <= 0.0) throw ConfigError("noise matrix has zero energy");
  return std::sqrt(signal_trace / (noise_trace * tau_snr));
}

Eigen::MatrixXd noise_matrix(long p, long t, std::uint64_t seed) {
  Eigen::MatrixXd e(p, t);
  const std::uint64_t base = rng::derive(seed, rng::salt_noise_column);
  for (long j = 0; j < t; ++j) {
    rng::Stream col(rng::derive(base, static_cast<std::uint64_t>(j)));
    for (long i = 0; i < p; ++i) e(i, j) = col.gaussian();
  }
  return e;
}

DataMatrix inject_noise(const DataMatrix& d_tilde, NoiseSpec& spec) {
  if (spec.tau_snr <= 0.0) {
    spec.gamma = 0.0;
    return d_tilde;
  }
  Eigen::MatrixXd e = noise_matrix(d_tilde.p(), d_tilde.t_total(), spec.seed);
  spec.gamma = gamma_for_snr(d_tilde, e, spec.tau_snr);
  DataMatrix out = d_tilde;
  out.values += spec.gamma * e;
  return out;
}

void ScenarioSpec::validate() const {
  if (rows < 1) throw InvalidSpec("rows must be >= 1");
  if (ticks < 2) throw InvalidSpec("ticks must be >= 2");
  if (jitter_pct < 0.0) throw InvalidSpec("jitter_pct must be >= 0");
  for (const SignalSpec& s : signals) {
    if (s.row < 1 || s.row > rows) {
      throw InvalidSpec("signal row " + std::to_string(s.row) + " outside [1, " +
                        std::to_string(rows) + "]");
    }
    if (s.start < 1 || s.end < s.start || s.end > ticks) {
      throw InvalidSpec("signal interval [" + std::to_string(s.start) + ", " +
                        std::to_string(s.end) + "] outside [1, " + std::to_string(ticks) + "]");
    }
  }
}

DataMatrix generate_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<const SignalSpec*> by_row(static_cast<std::size_t>(spec.rows), nullptr);
  for (const SignalSpec& s : spec.signals) by_row[static_cast<std::size_t>(s.row - 1)] = &s;

  DataMatrix out;
  out.values.resize(spec.rows, spec.ticks);
  out.device_count = spec.rows;
  out.vars_per_device = 1;
  out.tick_timestamps.resize(static_cast<std::size_t>(spec.ticks));
  for (long k = 0; k < spec.ticks; ++k) out.tick_timestamps[static_cast<std::size_t>(k)] = k + 1;

  const std::uint64_t base_seed = rng::derive(seed, rng::salt_scenario_row);
  char id[24];
  for (int i = 0; i < spec.rows; ++i) {
    rng::Stream row_stream(rng::derive(base_seed, static_cast<std::uint64_t>(i)));
    const SignalSpec* sig = by_row[static_cast<std::size_t>(i)];
    const double base = sig ? sig->base : spec.baseline_value;
    const double sigma = spec.jitter_pct / 100.0 * std::abs(base);
    for (long tk = 1; tk <= spec.ticks; ++tk) {
      const double level = (sig && tk >= sig->start && tk <= sig->end) ? sig->step : base;
      out.values(i, tk - 1) = level + sigma * row_stream.gaussian();
    }
    std::snprintf(id, sizeof id, "row%04d", i + 1);
    out.device_ids.emplace_back(id);
    out.row_labels.push_back({i, "load"});
  }
  return out;
}

}  // namespace gridwatch::ingest
