#pragma once

#include <string>
#include <vector>

#include "gridwatch/spectra.hpp"

namespace gridwatch::les {

enum class TestKind { chebyshev_poly, information_entropy, likelihood_ratio, wasserstein };

/// Spectral test function phi. Chebyshev-polynomial coefficients are in
/// descending power order: {a0, ..., an} means a0 l^n + ... + an, so
/// {0, ..., 0, 1} is the constant 1 and LES counts eigenvalues.
struct TestFunction {
  TestKind kind = TestKind::information_entropy;
  std::vector<double> coefficients;  // chebyshev_poly only; non-empty there

  /// Parse a CLI/config name: "cp" | "ie" | "lrf" | "wd". Empty coefficient
  /// list for "cp" selects the default phi(l) = l^2.
  static TestFunction parse(const std::string& name, const std::vector<double>& coeffs = {});
  std::string name() const;

  double operator()(double lambda) const;
};

struct LesPoint {
  long tick = 0;
  double value = 0.0;
};

struct LesSeries {
  std::vector<LesPoint> points;
  TestFunction test_function;
  bool normalized = false;
};

/// Eigenvalues below 1e-12 are clamped there before the log-based test
/// functions (IE, LRF); covariance spectra carry numerical zeros.
inline constexpr double eigenvalue_floor = 1e-12;

/// N(phi) = sum_i phi(lambda_i) over a covariance-source spectrum.
double les_value(const spectra::EigenSpectrum& spectrum, const TestFunction& phi);

/// Mean spectral radius (1/n) sum |lambda_i|; either source kind.
double msr(const spectra::EigenSpectrum& spectrum);

/// Affine map of values onto [0,1]. Throws DegenerateSeries when constant.
LesSeries normalize_series(const LesSeries& series);

}  // namespace gridwatch::les
