#include "gridwatch/locator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gridwatch/errors.hpp"
#include "gridwatch/stats.hpp"

namespace gridwatch::locator {

std::vector<double> eta_indicator(const spectra::EigenSpectrum& spectrum, double b_edge) {
  if (spectrum.source_kind != spectra::SourceKind::covariance || spectrum.eigenvectors.size() == 0)
    throw ShapeMismatch("eta_indicator needs a covariance spectrum with eigenvectors");
  const long p = spectrum.eigenvectors.rows();
  std::vector<double> eta(static_cast<std::size_t>(p), 0.0);
  double total = 0.0;
  for (const auto& ev : spectrum.eigenvalues) total += ev.real();
  if (total <= 0.0) return eta;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double lam = spectrum.eigenvalues[k].real();
    if (lam <= b_edge) continue;
    for (long i = 0; i < p; ++i) {
      const double v = spectrum.eigenvectors(i, static_cast<long>(k));
      eta[static_cast<std::size_t>(i)] += lam * v * v;
    }
  }
  for (double& e : eta) e /= total;
  return eta;
}

std::vector<double> eta_indicator(const spectra::EigenSpectrum& spectrum, const spectra::MpReference& mp) {
  return eta_indicator(spectrum, mp.b);
}

double eta_threshold(const std::vector<double>& eta, double confidence_level) {
  if (eta.size() < 2) throw ShapeMismatch("eta_threshold needs p >= 2");
  const double mu = stats::mean(eta);
  const double sd = stats::pop_stddev(eta.data(), eta.size(), mu);
  return mu + stats::two_sided_z(confidence_level) * sd;
}

std::vector<int> flag_rows(const std::vector<double>& eta, double threshold) {
  std::vector<int> rows;
  for (std::size_t i = 0; i < eta.size(); ++i)
    if (eta[i] > threshold) rows.push_back(static_cast<int>(i) + 1);
  return rows;
}

std::vector<int> rows_to_devices(const std::vector<int>& rows, int vars_per_device) {
  if (vars_per_device < 1) throw ShapeMismatch("vars_per_device must be >= 1");
  std::set<int> devices;
  for (int r : rows) devices.insert(r / vars_per_device);
  return {devices.begin(), devices.end()};
}

AugmentedCandidates map_augmented_indices(const std::vector<int>& itilde, const AugmentedIndexMap& map) {
  if (map.n < 2 || map.k < 2) throw ShapeMismatch("augmented index map needs n >= 2 and k >= 2");
  double cap = 1.0;
  for (int e = 0; e < map.k; ++e) cap *= map.n;
  std::set<int> ceil_set, mod_set;
  for (int idx : itilde) {
    if (idx < 1 || static_cast<double>(idx) > cap)
      throw IndexOutOfRange("augmented index " + std::to_string(idx) + " outside [1, n^k]");
    if (map.rule == MappingRule::ceil_divide || map.rule == MappingRule::both)
      ceil_set.insert((idx + map.n - 1) / map.n);
    if (map.rule == MappingRule::mod_shift || map.rule == MappingRule::both) {
      const int residue = idx % map.n;
      mod_set.insert((residue == 0 ? map.n : residue) + map.n);
    }
  }
  AugmentedCandidates out;
  out.ceil_set.assign(ceil_set.begin(), ceil_set.end());
  out.mod_set.assign(mod_set.begin(), mod_set.end());
  return out;
}

double eigen_sensitivity(const spectra::CovarianceMatrix& sigma, int k, int i, int j) {
  const long p = sigma.p();
  if (k < 1 || k > p || i < 1 || i > p || j < 1 || j > p)
    throw IndexOutOfRange("eigen_sensitivity indices are 1-based in [1, p]");
  const auto spec = spectra::eigen(sigma);
  const double lam = spec.eigenvalues[static_cast<std::size_t>(k - 1)].real();
  for (long m = 0; m < p; ++m) {
    if (m == k - 1) continue;
    if (std::abs(spec.eigenvalues[static_cast<std::size_t>(m)].real() - lam) <= 1e-8)
      throw DegenerateEigenvalue(k);
  }
  return spec.eigenvectors(i - 1, k - 1) * spec.eigenvectors(j - 1, k - 1);
}

std::string mapping_rule_name(MappingRule rule) {
  switch (rule) {
    case MappingRule::ceil_divide: return "ceil";
    case MappingRule::mod_shift: return "mod";
    case MappingRule::both: return "both";
  }
  return "?";
}

}  // namespace gridwatch::locator
