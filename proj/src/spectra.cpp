#include "gridwatch/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridwatch/errors.hpp"
#include "gridwatch/rng.hpp"
#include "gridwatch/stats.hpp"

namespace gridwatch::spectra {

RawWindow RawWindow::make(Eigen::MatrixXd values, long start_tick, long end_tick,
                          std::vector<RowLabel> row_labels) {
  const long p = values.rows();
  const long t = values.cols();
  if (p < 1 || t < 2) throw ShapeMismatch("window needs p >= 1 and t >= 2");
  if (p > t) throw InvalidRatio(static_cast<double>(p) / static_cast<double>(t));
  if (end_tick - start_tick + 1 != t)
    throw ShapeMismatch("tick range does not match column count");
  if (!row_labels.empty() && static_cast<long>(row_labels.size()) != p)
    throw ShapeMismatch("row label count does not match p");
  return RawWindow{std::move(values), start_tick, end_tick, std::move(row_labels)};
}

std::vector<double> EigenSpectrum::real_eigenvalues() const {
  std::vector<double> out(eigenvalues.size());
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) out[i] = eigenvalues[i].real();
  return out;
}

StandardizedWindow standardize(const RawWindow& window) {
  const long p = window.p();
  const long t = window.t();
  Eigen::MatrixXd out(p, t);
  for (long i = 0; i < p; ++i) {
    const double mu = window.values.row(i).mean();
    const double sd = std::sqrt((window.values.row(i).array() - mu).square().sum() / static_cast<double>(t));
    if (sd <= 1e-12) throw ZeroVarianceRow(static_cast<int>(i));
    out.row(i) = (window.values.row(i).array() - mu) / sd;
  }
  return StandardizedWindow{std::move(out)};
}

CovarianceMatrix covariance(const StandardizedWindow& x) {
  Eigen::MatrixXd sigma = (x.values * x.values.transpose()) / static_cast<double>(x.t());
  // Force exact symmetry; the product is symmetric only up to rounding.
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return CovarianceMatrix{std::move(sigma)};
}

EigenSpectrum eigen(const CovarianceMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.values);
  if (solver.info() != Eigen::Success)
    throw ConvergenceFailure("SelfAdjointEigenSolver on " + std::to_string(m.p()) + "x" +
                             std::to_string(m.p()) + " matrix");
  const long p = m.p();
  EigenSpectrum spec;
  spec.source_kind = SourceKind::covariance;
  spec.eigenvalues.resize(p);
  spec.eigenvectors.resize(p, p);
  // Eigen returns ascending order; the contract is descending.
  for (long k = 0; k < p; ++k) {
    spec.eigenvalues[k] = std::complex<double>(solver.eigenvalues()(p - 1 - k), 0.0);
    spec.eigenvectors.col(k) = solver.eigenvectors().col(p - 1 - k);
  }
  return spec;
}

MpReference mp_reference(double c, double sigma2) {
  if (!(c > 0.0 && c <= 1.0)) throw InvalidRatio(c);
  if (!(sigma2 > 0.0)) throw InvalidRatio(sigma2);
  MpReference mp;
  mp.c = c;
  mp.sigma2 = sigma2;
  const double s = std::sqrt(c);
  mp.a = sigma2 * (1.0 - s) * (1.0 - s);
  mp.b = sigma2 * (1.0 + s) * (1.0 + s);
  return mp;
}

double MpReference::pdf(double x) const {
  if (x <= a || x >= b || x <= 0.0) return 0.0;
  return std::sqrt((b - x) * (x - a)) / (2.0 * 3.141592653589793238462643383279502884 * c * sigma2 * x);
}

RingReference ring_reference(double c, int L) {
  if (!(c > 0.0 && c <= 1.0)) throw InvalidRatio(c);
  if (L < 1) throw ShapeMismatch("ring product length L must be >= 1");
  RingReference r;
  r.c = c;
  r.L = L;
  r.inner_radius = std::pow(1.0 - c, static_cast<double>(L) / 2.0);
  return r;
}

double RingReference::pdf(double modulus) const {
  if (modulus < inner_radius || modulus > 1.0) return 0.0;
  return std::pow(modulus, 2.0 / L - 2.0) / (3.141592653589793238462643383279502884 * c * L);
}

Eigen::MatrixXd haar_orthogonal(long p, std::uint64_t seed) {
  rng::Stream stream(seed);
  Eigen::MatrixXd g(p, p);
  for (long j = 0; j < p; ++j)
    for (long i = 0; i < p; ++i) g(i, j) = stream.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Sign-correct with diag(R) so Q is Haar rather than QR-convention biased.
  for (long j = 0; j < p; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Eigen::MatrixXd singular_value_equivalent(const StandardizedWindow& x, std::uint64_t seed) {
  if (x.p() > x.t()) throw InvalidRatio(static_cast<double>(x.p()) / static_cast<double>(x.t()));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x.values, Eigen::ComputeThinU);
  const Eigen::MatrixXd& w = svd.matrixU();  // p x p since p <= t
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::MatrixXd u = haar_orthogonal(x.p(), seed);
  return w * s.asDiagonal() * w.transpose() * u;
}

EigenSpectrum ring_product(const std::vector<StandardizedWindow>& windows, int L, std::uint64_t seed) {
  if (static_cast<int>(windows.size()) != L)
    throw ShapeMismatch("ring_product needs exactly L windows, got " + std::to_string(windows.size()));
  if (L < 1) throw ShapeMismatch("ring product length L must be >= 1");
  const long p = windows.front().p();
  const long t = windows.front().t();
  for (const auto& w : windows)
    if (w.p() != p || w.t() != t) throw ShapeMismatch("ring_product windows must share p and t");

  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(p, p);
  for (int k = 0; k < L; ++k)
    z = (z * singular_value_equivalent(windows[static_cast<std::size_t>(k)],
                                       rng::derive(seed, static_cast<std::uint64_t>(k))))
            .eval();

  // Rescale each row to population variance 1/p. The variance is taken about
  // the row mean but no centering is applied; centering is a rank-one
  // perturbation that visibly drags eigenvalues inside the annulus.
  for (long i = 0; i < p; ++i) {
    const double mu = z.row(i).mean();
    const double sd = std::sqrt((z.row(i).array() - mu).square().sum() / static_cast<double>(p));
    if (sd <= 1e-300) throw ConvergenceFailure("degenerate ring product row");
    z.row(i) /= (std::sqrt(static_cast<double>(p)) * sd);
  }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(z, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("EigenSolver on ring product");
  EigenSpectrum spec;
  spec.source_kind = SourceKind::ring_product;
  spec.eigenvalues.resize(p);
  for (long i = 0; i < p; ++i) spec.eigenvalues[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return spec;
}

EsdHistogram esd_histogram(const EigenSpectrum& spectrum, int bins) {
  if (spectrum.size() == 0) throw EmptySpectrum();
  if (bins < 5) throw ConfigError("esd_histogram needs at least 5 bins");
  std::vector<double> xs(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    xs[i] = spectrum.source_kind == SourceKind::ring_product ? std::abs(spectrum.eigenvalues[i])
                                                             : spectrum.eigenvalues[i].real();
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi - lo < 1e-12) {  // all-equal spectra still get a valid single-spike histogram
    lo -= 0.5;
    hi += 0.5;
  }
  EsdHistogram h;
  h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  const double w = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.bin_edges[static_cast<std::size_t>(i)] = lo + w * i;
  h.bin_edges.back() = hi;
  for (double v : xs) {
    auto idx = static_cast<long>((v - lo) / w);
    idx = std::clamp<long>(idx, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(idx)];
  }
  h.normalized_density.resize(static_cast<std::size_t>(bins));
  const double total = static_cast<double>(xs.size()) * w;
  for (int i = 0; i < bins; ++i) h.normalized_density[static_cast<std::size_t>(i)] = h.counts[static_cast<std::size_t>(i)] / total;
  return h;
}

namespace {

// Integrated MP density over [lo, hi] by composite Simpson on 200 panels;
// the integrand is smooth inside the support so this is ample for 1e-6 bins.
double mp_bin_mass(double lo, double hi, double a, double b, double c, double sigma2) {
  const double x0 = std::max(lo, a);
  const double x1 = std::min(hi, b);
  if (x1 <= x0) return 0.0;
  const int n = 200;
  const double h = (x1 - x0) / n;
  auto f = [&](double x) {
    if (x <= a || x >= b || x <= 0.0) return 0.0;
    return std::sqrt((b - x) * (x - a)) / (2.0 * 3.141592653589793238462643383279502884 * c * sigma2 * x);
  };
  double s = f(x0) + f(x1);
  for (int i = 1; i < n; ++i) s += f(x0 + h * i) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

double mp_l1_distance(std::vector<double> eigenvalues, double c, double sigma2, int bins) {
  if (eigenvalues.empty()) throw EmptySpectrum();
  if (!(c > 0.0)) throw InvalidRatio(c);
  std::sort(eigenvalues.begin(), eigenvalues.end());
  double mass_scale = 1.0;
  if (c > 1.0) {
    // p > t: exactly p - t structural zeros; keep the top t and compare with
    // the continuous MP part rescaled from mass 1/c to 1.
    const auto keep = static_cast<std::size_t>(std::lround(static_cast<double>(eigenvalues.size()) / c));
    if (keep == 0) throw EmptySpectrum();
    eigenvalues.erase(eigenvalues.begin(), eigenvalues.end() - static_cast<long>(keep));
    mass_scale = c;
  }
  const double s = std::sqrt(c);
  const double a = sigma2 * (1.0 - s) * (1.0 - s);
  const double b = sigma2 * (1.0 + s) * (1.0 + s);
  double lo = eigenvalues.front(), hi = eigenvalues.back();
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double w = (hi - lo) / bins;
  const double n = static_cast<double>(eigenvalues.size());
  double l1 = 0.0;
  double covered = 0.0;
  std::size_t cursor = 0;
  for (int i = 0; i < bins; ++i) {
    const double e0 = lo + w * i;
    const double e1 = (i == bins - 1) ? hi : lo + w * (i + 1);
    std::size_t count = 0;
    while (cursor + count < eigenvalues.size() &&
           (eigenvalues[cursor + count] < e1 || (i == bins - 1 && eigenvalues[cursor + count] <= hi)))
      ++count;
    cursor += count;
    const double phat = static_cast<double>(count) / n;
    const double q = mass_scale * mp_bin_mass(e0, e1, a, b, c, sigma2);
    l1 += std::abs(phat - q);
    covered += q;
  }
  l1 += std::max(0.0, 1.0 - covered);  // reference mass the histogram range misses
  return 0.5 * l1;
}

double ring_annulus_fraction(const EigenSpectrum& ring_spectrum, double inner_radius, double tol) {
  if (ring_spectrum.size() == 0) throw EmptySpectrum();
  std::size_t inside = 0;
  for (const auto& ev : ring_spectrum.eigenvalues) {
    const double m = std::abs(ev);
    if (m >= inner_radius - tol && m <= 1.0 + tol) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(ring_spectrum.size());
}

}  // namespace gridwatch::spectra
