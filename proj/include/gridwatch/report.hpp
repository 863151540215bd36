#pragma once

#include <string>
#include <vector>

#include "gridwatch/les.hpp"
#include "gridwatch/pipeline.hpp"
#include "gridwatch/spectra.hpp"

namespace gridwatch::report {

inline constexpr const char* version = "0.1.0";

/// Canonical numeric formatting for all emitted files: %.12g, locale free.
std::string format_double(double value);

/// tick,les,msr,outlier_count,largest_eigenvalue,mp_l1,ring_fraction,
/// eta_threshold,degraded
void write_ticks_csv(const std::vector<pipeline::TickResult>& ticks, const std::string& path);

/// tick,les_raw,les_normalized. A constant series has no min-max image; its
/// normalized column is pinned to 0.5 (same convention as constant-row
/// min-max).
void write_les_csv(const les::LesSeries& series, const std::string& path);

/// detection_tick,onset_tick,les_drop,flagged_rows,flagged_devices,
/// mapping_rule. Rows join with ';'; augmented events serialize both
/// candidate sets as ceil:a;b|mod:c;d.
void write_events_csv(const std::vector<pipeline::AnomalyEvent>& events, const std::string& path);

/// tick,row,eta with one line per clean tick and analysis row.
void write_eta_surface_csv(const std::vector<pipeline::TickResult>& ticks, const std::string& path);

/// bin_left,bin_right,count,density,mp_density with the reference density
/// evaluated at bin centers.
void write_esd_csv(const spectra::EsdHistogram& hist, const spectra::MpReference& mp,
                   const std::string& path);

/// re,im,modulus for every ring eigenvalue.
void write_ring_csv(const spectra::EigenSpectrum& ring, const std::string& path);

/// key,value lines describing one analyzed window.
void write_spectra_summary_csv(const std::vector<std::pair<std::string, std::string>>& entries,
                               const std::string& path);

/// Validate every recognized output file in dir against its schema. Returns
/// human-readable problems; empty means the directory passes.
std::vector<std::string> self_check(const std::string& dir);

std::string join_rows(const std::vector<int>& rows);

}  // namespace gridwatch::report
