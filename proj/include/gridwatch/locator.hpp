#pragma once

#include <string>
#include <vector>

#include "gridwatch/spectra.hpp"

namespace gridwatch::locator {

/// Per-window localization result. Row indices are 1-based (matching the
/// worked index sets of the source material); device indices are 0-based.
struct LocationReport {
  long tick = 0;
  std::vector<double> eta;           // one entry per matrix row, each in [0,1]
  double eta_threshold = 0.0;
  std::vector<int> flagged_rows;     // sorted, 1-based, strict > threshold
  std::vector<int> flagged_devices;  // sorted, 0-based
  double z_coefficient = 0.0;
  double confidence_level = 0.0;
};

enum class MappingRule { ceil_divide, mod_shift, both };

/// Back-mapping of flagged indices from an n^k-dimensional augmented spectrum
/// to original row candidates.
struct AugmentedIndexMap {
  int n = 0;
  int k = 2;
  MappingRule rule = MappingRule::both;
};

struct AugmentedCandidates {
  std::vector<int> ceil_set;  // candidates in the leading block, 1-based rows
  std::vector<int> mod_set;   // candidates in the trailing block, 1-based rows
};

/// eta_i = (sum over outliers lambda_k (v_k_i)^2) / (sum_k lambda_k), outliers
/// being eigenvalues above b_edge. No outliers yields the zero vector.
std::vector<double> eta_indicator(const spectra::EigenSpectrum& spectrum, double b_edge);
std::vector<double> eta_indicator(const spectra::EigenSpectrum& spectrum, const spectra::MpReference& mp);

/// mu(eta) + z sigma(eta) with population sigma and the two-sided normal
/// quantile for the given confidence level.
double eta_threshold(const std::vector<double>& eta, double confidence_level);

/// {i : eta_i > threshold}, 1-based, strict inequality.
std::vector<int> flag_rows(const std::vector<double>& eta, double threshold);

/// floor(row / vars_per_device) for 0-based rows, deduplicated and sorted.
std::vector<int> rows_to_devices(const std::vector<int>& rows, int vars_per_device);

/// ceil rule: ceil(i/n); mod rule: (i mod n) + n with residue 0 mapped to n.
/// Indices are 1-based in [1, n^k]. Throws IndexOutOfRange.
AugmentedCandidates map_augmented_indices(const std::vector<int>& itilde, const AugmentedIndexMap& map);

/// Analytic derivative of eigenvalue k (1-based, descending order) of sigma
/// with respect to a single-entry perturbation of entry (i, j), both 1-based:
/// v_k_i * v_k_j. Element-wise perturbation, not the symmetric pair; the
/// symmetric-pair derivative would double off-diagonal values. Requires the
/// eigenvalue to be simple (gap > 1e-8); throws DegenerateEigenvalue.
double eigen_sensitivity(const spectra::CovarianceMatrix& sigma, int k, int i, int j);

std::string mapping_rule_name(MappingRule rule);

}  // namespace gridwatch::locator
