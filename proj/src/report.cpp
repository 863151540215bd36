#include "gridwatch/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gridwatch/errors.hpp"

namespace gridwatch::report {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

bool parse_finite(const std::string& field, double& value) {
  const char* begin = field.data();
  auto [ptr, ec] = std::from_chars(begin, begin + field.size(), value);
  return ec == std::errc() && ptr == begin + field.size() && std::isfinite(value);
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string join_rows(const std::vector<int>& rows) {
  if (rows.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(rows[i]);
  }
  return out;
}

void write_ticks_csv(const std::vector<pipeline::TickResult>& ticks, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "tick,les,msr,outlier_count,largest_eigenvalue,mp_l1,ring_fraction,eta_threshold,"
         "degraded\n";
  for (const auto& tr : ticks) {
    out << tr.tick << ',' << format_double(tr.les_value) << ',' << format_double(tr.msr_value)
        << ',' << tr.outlier_count << ',' << format_double(tr.largest_eigenvalue) << ','
        << format_double(tr.law_fit.mp_l1_distance) << ','
        << format_double(tr.law_fit.ring_annulus_fraction) << ','
        << format_double(tr.location.eta_threshold) << ',' << (tr.degraded ? 1 : 0) << '\n';
  }
  finish(out, path);
}

void write_les_csv(const les::LesSeries& series, const std::string& path) {
  std::vector<double> normalized(series.points.size(), 0.5);
  try {
    const les::LesSeries scaled = les::normalize_series(series);
    for (std::size_t i = 0; i < scaled.points.size(); ++i) normalized[i] = scaled.points[i].value;
  } catch (const DegenerateSeries&) {
    // constant series: keep the 0.5 fill
  }
  std::ofstream out = open_out(path);
  out << "tick,les_raw,les_normalized\n";
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    out << series.points[i].tick << ',' << format_double(series.points[i].value) << ','
        << format_double(normalized[i]) << '\n';
  }
  finish(out, path);
}

void write_events_csv(const std::vector<pipeline::AnomalyEvent>& events, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "detection_tick,onset_tick,les_drop,flagged_rows,flagged_devices,mapping_rule\n";
  for (const auto& ev : events) {
    std::string rows;
    if (ev.augmented_candidates) {
      rows = "ceil:" + join_rows(ev.augmented_candidates->ceil_set) +
             "|mod:" + join_rows(ev.augmented_candidates->mod_set);
    } else {
      rows = join_rows(ev.flagged_rows);
    }
    out << ev.detection_tick << ',' << ev.onset_tick << ',' << format_double(ev.les_drop) << ','
        << rows << ',' << join_rows(ev.flagged_devices) << ','
        << (ev.mapping_rule ? locator::mapping_rule_name(*ev.mapping_rule) : "none") << '\n';
  }
  finish(out, path);
}

void write_eta_surface_csv(const std::vector<pipeline::TickResult>& ticks, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "tick,row,eta\n";
  for (const auto& tr : ticks) {
    if (tr.degraded) continue;
    for (std::size_t i = 0; i < tr.location.eta.size(); ++i) {
      out << tr.tick << ',' << (i + 1) << ',' << format_double(tr.location.eta[i]) << '\n';
    }
  }
  finish(out, path);
}

void write_esd_csv(const spectra::EsdHistogram& hist, const spectra::MpReference& mp,
                   const std::string& path) {
  std::ofstream out = open_out(path);
  out << "bin_left,bin_right,count,density,mp_density\n";
  for (std::size_t b = 0; b + 1 < hist.bin_edges.size(); ++b) {
    const double center = 0.5 * (hist.bin_edges[b] + hist.bin_edges[b + 1]);
    out << format_double(hist.bin_edges[b]) << ',' << format_double(hist.bin_edges[b + 1]) << ','
        << hist.counts[b] << ',' << format_double(hist.normalized_density[b]) << ','
        << format_double(mp.pdf(center)) << '\n';
  }
  finish(out, path);
}

void write_ring_csv(const spectra::EigenSpectrum& ring, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "re,im,modulus\n";
  for (const auto& z : ring.eigenvalues) {
    out << format_double(z.real()) << ',' << format_double(z.imag()) << ','
        << format_double(std::abs(z)) << '\n';
  }
  finish(out, path);
}

void write_spectra_summary_csv(const std::vector<std::pair<std::string, std::string>>& entries,
                               const std::string& path) {
  std::ofstream out = open_out(path);
  out << "key,value\n";
  for (const auto& [key, value] : entries) out << key << ',' << value << '\n';
  finish(out, path);
}

namespace {

using Problems = std::vector<std::string>;

std::vector<std::vector<std::string>> load_csv(const std::string& path, const std::string& header,
                                               std::size_t fields, Problems& problems) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  if (!in) {
    problems.push_back(path + ": cannot open");
    return rows;
  }
  std::string line;
  if (!std::getline(in, line) || line != header) {
    problems.push_back(path + ": bad header");
    return rows;
  }
  long number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    auto split = split_fields(line);
    if (split.size() != fields) {
      problems.push_back(path + ":" + std::to_string(number) + ": expected " +
                         std::to_string(fields) + " fields");
      continue;
    }
    rows.push_back(std::move(split));
  }
  return rows;
}

void expect_numeric(const std::string& path, const std::vector<std::vector<std::string>>& rows,
                    const std::vector<std::size_t>& columns, Problems& problems) {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c : columns) {
      double v = 0;
      if (!parse_finite(rows[r][c], v)) {
        problems.push_back(path + ": non-numeric field '" + rows[r][c] + "' in data row " +
                           std::to_string(r + 1));
        return;  // one report per file is enough
      }
    }
  }
}

}  // namespace

std::vector<std::string> self_check(const std::string& dir) {
  namespace fs = std::filesystem;
  Problems problems;
  if (!fs::is_directory(dir)) return {dir + ": not a directory"};

  const fs::path root(dir);
  auto has = [&](const char* name) { return fs::exists(root / name); };
  auto path_of = [&](const char* name) { return (root / name).string(); };

  if (has("ticks.csv")) {
    auto rows = load_csv(path_of("ticks.csv"),
                         "tick,les,msr,outlier_count,largest_eigenvalue,mp_l1,ring_fraction,"
                         "eta_threshold,degraded",
                         9, problems);
    expect_numeric(path_of("ticks.csv"), rows, {0, 1, 2, 3, 4, 5, 6, 7, 8}, problems);
    for (const auto& r : rows) {
      double frac = 0;
      if (parse_finite(r[6], frac) && (frac < 0.0 || frac > 1.0)) {
        problems.push_back(path_of("ticks.csv") + ": ring_fraction outside [0,1]");
        break;
      }
    }
  }
  if (has("les.csv")) {
    auto rows = load_csv(path_of("les.csv"), "tick,les_raw,les_normalized", 3, problems);
    expect_numeric(path_of("les.csv"), rows, {0, 1, 2}, problems);
    for (const auto& r : rows) {
      double v = 0;
      if (parse_finite(r[2], v) && (v < -1e-9 || v > 1.0 + 1e-9)) {
        problems.push_back(path_of("les.csv") + ": normalized value outside [0,1]");
        break;
      }
    }
  }
  if (has("events.csv")) {
    auto rows = load_csv(path_of("events.csv"),
                         "detection_tick,onset_tick,les_drop,flagged_rows,flagged_devices,"
                         "mapping_rule",
                         6, problems);
    expect_numeric(path_of("events.csv"), rows, {0, 1, 2}, problems);
    for (const auto& r : rows) {
      const std::string& rule = r[5];
      if (rule != "none" && rule != "ceil" && rule != "mod" && rule != "both") {
        problems.push_back(path_of("events.csv") + ": unknown mapping_rule '" + rule + "'");
        break;
      }
    }
  }
  if (has("eta_surface.csv")) {
    auto rows = load_csv(path_of("eta_surface.csv"), "tick,row,eta", 3, problems);
    expect_numeric(path_of("eta_surface.csv"), rows, {0, 1, 2}, problems);
    for (const auto& r : rows) {
      double v = 0;
      if (parse_finite(r[2], v) && (v < 0.0 || v > 1.0)) {
        problems.push_back(path_of("eta_surface.csv") + ": eta outside [0,1]");
        break;
      }
    }
  }
  if (has("esd.csv")) {
    auto rows = load_csv(path_of("esd.csv"), "bin_left,bin_right,count,density,mp_density", 5,
                         problems);
    expect_numeric(path_of("esd.csv"), rows, {0, 1, 2, 3, 4}, problems);
  }
  if (has("ring.csv")) {
    auto rows = load_csv(path_of("ring.csv"), "re,im,modulus", 3, problems);
    expect_numeric(path_of("ring.csv"), rows, {0, 1, 2}, problems);
    for (const auto& r : rows) {
      double re = 0, im = 0, mod = 0;
      if (parse_finite(r[0], re) && parse_finite(r[1], im) && parse_finite(r[2], mod) &&
          std::abs(std::hypot(re, im) - mod) > 1e-9) {
        problems.push_back(path_of("ring.csv") + ": modulus does not match re/im");
        break;
      }
    }
  }
  if (has("spectra_summary.csv")) {
    load_csv(path_of("spectra_summary.csv"), "key,value", 2, problems);
  }
  if (has("manifest.json")) {
    std::ifstream in(path_of("manifest.json"));
    nlohmann::json manifest = nlohmann::json::parse(in, nullptr, false);
    if (manifest.is_discarded()) {
      problems.push_back(path_of("manifest.json") + ": invalid JSON");
    } else {
      for (const char* key : {"version", "seed", "command", "config"}) {
        if (!manifest.contains(key)) {
          problems.push_back(path_of("manifest.json") + ": missing key '" + std::string(key) +
                             "'");
        }
      }
    }
  } else {
    problems.push_back((root / "manifest.json").string() + ": missing (every run writes one)");
  }
  return problems;
}

}  // namespace gridwatch::report
