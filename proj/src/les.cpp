#include "gridwatch/les.hpp"

#include <algorithm>
#include <cmath>

#include "gridwatch/errors.hpp"

namespace gridwatch::les {

TestFunction TestFunction::parse(const std::string& name, const std::vector<double>& coeffs) {
  TestFunction tf;
  if (name == "cp" || name == "chebyshev_poly") {
    tf.kind = TestKind::chebyshev_poly;
    tf.coefficients = coeffs.empty() ? std::vector<double>{1.0, 0.0, 0.0} : coeffs;
  } else if (name == "ie" || name == "information_entropy") {
    tf.kind = TestKind::information_entropy;
  } else if (name == "lrf" || name == "likelihood_ratio") {
    tf.kind = TestKind::likelihood_ratio;
  } else if (name == "wd" || name == "wasserstein") {
    tf.kind = TestKind::wasserstein;
  } else {
    throw ConfigError("unknown test function '" + name + "' (expected ie|lrf|wd|cp)");
  }
  if (tf.kind == TestKind::chebyshev_poly && tf.coefficients.empty())
    throw ConfigError("chebyshev_poly needs a non-empty coefficient list");
  return tf;
}

std::string TestFunction::name() const {
  switch (kind) {
    case TestKind::chebyshev_poly: return "cp";
    case TestKind::information_entropy: return "ie";
    case TestKind::likelihood_ratio: return "lrf";
    case TestKind::wasserstein: return "wd";
  }
  return "?";
}

double TestFunction::operator()(double lambda) const {
  switch (kind) {
    case TestKind::chebyshev_poly: {
      double acc = 0.0;
      for (double a : coefficients) acc = acc * lambda + a;  // Horner, descending powers
      return acc;
    }
    case TestKind::information_entropy: {
      const double l = std::max(lambda, eigenvalue_floor);
      return -l * std::log(l);
    }
    case TestKind::likelihood_ratio: {
      const double l = std::max(lambda, eigenvalue_floor);
      return l - std::log(l) - 1.0;
    }
    case TestKind::wasserstein: {
      const double l = std::max(lambda, 0.0);  // sqrt domain guard for numerical -0 eigenvalues
      return l - 2.0 * std::sqrt(l) + 1.0;
    }
  }
  return 0.0;
}

double les_value(const spectra::EigenSpectrum& spectrum, const TestFunction& phi) {
  if (spectrum.size() == 0) throw EmptySpectrum();
  double acc = 0.0;
  for (const auto& ev : spectrum.eigenvalues) acc += phi(ev.real());
  return acc;
}

double msr(const spectra::EigenSpectrum& spectrum) {
  if (spectrum.size() == 0) throw EmptySpectrum();
  double acc = 0.0;
  for (const auto& ev : spectrum.eigenvalues) acc += std::abs(ev);
  return acc / static_cast<double>(spectrum.size());
}

LesSeries normalize_series(const LesSeries& series) {
  const auto& pts = series.points;
  if (pts.size() < 2) throw DegenerateSeries();
  auto [lo_it, hi_it] = std::minmax_element(
      pts.begin(), pts.end(), [](const LesPoint& a, const LesPoint& b) { return a.value < b.value; });
  const double lo = lo_it->value;
  const double hi = hi_it->value;
  if (hi - lo <= 0.0) throw DegenerateSeries();
  LesSeries out;
  out.test_function = series.test_function;
  out.normalized = true;
  out.points.reserve(pts.size());
  for (const auto& p : pts) out.points.push_back({p.tick, (p.value - lo) / (hi - lo)});
  return out;
}

}  // namespace gridwatch::les
