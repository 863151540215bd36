#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "gridwatch/errors.hpp"
#include "gridwatch/rng.hpp"
#include "gridwatch/spectra.hpp"
#include "test_support.hpp"

using namespace gridwatch;
using testsupport::gaussian_matrix;
using testsupport::std_gaussian;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Composite Simpson quadrature, independent of any library integrator.
template <typename F>
double simpson(F f, double lo, double hi, int panels) {
  const double h = (hi - lo) / panels;
  double s = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) s += f(lo + h * i) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

spectra::EigenSpectrum hand_spectrum(std::vector<std::complex<double>> values,
                                     spectra::SourceKind kind) {
  spectra::EigenSpectrum s;
  s.eigenvalues = std::move(values);
  s.source_kind = kind;
  return s;
}

}  // namespace

TEST_CASE("RawWindow::make validates shape, ratio, and tick range") {
  Eigen::MatrixXd ok(2, 4);
  ok.setZero();
  CHECK_THROWS_AS(spectra::RawWindow::make(Eigen::MatrixXd(3, 2), 1, 2), InvalidRatio);
  CHECK_THROWS_AS(spectra::RawWindow::make(Eigen::MatrixXd(1, 1), 1, 1), ShapeMismatch);
  CHECK_THROWS_AS(spectra::RawWindow::make(ok, 1, 3), ShapeMismatch);
  CHECK_THROWS_AS(spectra::RawWindow::make(ok, 1, 4, {{0, "ua"}}), ShapeMismatch);
  const auto w = spectra::RawWindow::make(ok, 5, 8);
  CHECK(w.p() == 2);
  CHECK(w.t() == 4);
  CHECK(w.start_tick == 5);
  CHECK(w.end_tick == 8);
}

TEST_CASE("standardize zeroes row means and fixes unit sigma") {
  Eigen::MatrixXd m(2, 4);
  m << 1, 2, 3, 4, 10, 10, 30, 30;
  const auto s = spectra::standardize(spectra::RawWindow::make(m, 1, 4));
  for (long i = 0; i < 2; ++i) {
    CHECK(std::abs(s.values.row(i).mean()) < 1e-14);
    const double var = s.values.row(i).array().square().mean();
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  }
  // hand affine image of row 0: population sigma of {1,2,3,4} is sqrt(1.25)
  CHECK(s.values(0, 0) == doctest::Approx(-1.5 / std::sqrt(1.25)).epsilon(1e-12));

  Eigen::MatrixXd flat(2, 3);
  flat << 1, 1, 1, 0, 1, 2;
  CHECK_THROWS_AS(spectra::standardize(spectra::RawWindow::make(flat, 1, 3)), ZeroVarianceRow);
  try {
    spectra::standardize(spectra::RawWindow::make(flat, 1, 3));
  } catch (const ZeroVarianceRow& e) {
    CHECK(e.row_index == 0);
  }
}

TEST_CASE("covariance is (1/t) X X^T with trace p on standardized input") {
  Eigen::MatrixXd m(1, 2);
  m << 1, -1;
  const auto cov = spectra::covariance(spectra::StandardizedWindow{m});
  CHECK(cov.values(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  const auto s = std_gaussian(8, 40, 3);
  const auto sigma = spectra::covariance(s);
  CHECK(sigma.values.trace() == doctest::Approx(8.0).epsilon(1e-12));
  CHECK((sigma.values - sigma.values.transpose()).norm() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("eigen recovers a planted spectrum and pairs eigenvectors") {
  const std::vector<double> planted = {9.0, 5.0, 2.0, 1.0, 0.5, 0.1};
  const long p = static_cast<long>(planted.size());
  const Eigen::MatrixXd q = spectra::haar_orthogonal(p, 99);
  Eigen::VectorXd lam(p);
  for (long i = 0; i < p; ++i) lam(i) = planted[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd a = q * lam.asDiagonal() * q.transpose();

  const auto spec = spectra::eigen(spectra::CovarianceMatrix{a});
  REQUIRE(spec.size() == planted.size());
  for (std::size_t k = 0; k < planted.size(); ++k) {
    CHECK(spec.eigenvalues[k].real() == doctest::Approx(planted[k]).epsilon(1e-10));
    CHECK(spec.eigenvalues[k].imag() == 0.0);
    const Eigen::VectorXd v = spec.eigenvectors.col(static_cast<long>(k));
    CHECK((a * v - planted[k] * v).norm() < 1e-9);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (std::size_t k = 1; k < spec.size(); ++k) {
    CHECK(spec.eigenvalues[k - 1].real() >= spec.eigenvalues[k].real());
  }
}

TEST_CASE("eigen matches the 2x2 closed form") {
  Eigen::MatrixXd a(2, 2);
  a << 3.0, 1.25, 1.25, 1.0;
  const double tr = a(0, 0) + a(1, 1);
  const double disc = std::sqrt((a(0, 0) - a(1, 1)) * (a(0, 0) - a(1, 1)) + 4 * a(0, 1) * a(0, 1));
  const auto spec = spectra::eigen(spectra::CovarianceMatrix{a});
  CHECK(spec.eigenvalues[0].real() == doctest::Approx(0.5 * (tr + disc)).epsilon(1e-14));
  CHECK(spec.eigenvalues[1].real() == doctest::Approx(0.5 * (tr - disc)).epsilon(1e-14));
}

TEST_CASE("mp_reference edges and density moments") {
  CHECK_THROWS_AS(spectra::mp_reference(0.0, 1.0), InvalidRatio);
  CHECK_THROWS_AS(spectra::mp_reference(1.2, 1.0), InvalidRatio);
  CHECK_THROWS_AS(spectra::mp_reference(0.5, 0.0), InvalidRatio);

  const auto mp = spectra::mp_reference(0.25, 1.0);
  CHECK(mp.a == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(mp.b == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(mp.pdf(0.2) == 0.0);
  CHECK(mp.pdf(2.3) == 0.0);

  auto f = [&](double x) { return mp.pdf(x); };
  auto xf = [&](double x) { return x * mp.pdf(x); };
  auto x2f = [&](double x) { return x * x * mp.pdf(x); };
  CHECK(simpson(f, mp.a, mp.b, 4000) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(simpson(xf, mp.a, mp.b, 4000) == doctest::Approx(1.0).epsilon(1e-5));       // mean sigma^2
  CHECK(simpson(x2f, mp.a, mp.b, 4000) == doctest::Approx(1.25).epsilon(1e-4));    // sigma^4 (1+c)

  const auto scaled = spectra::mp_reference(0.25, 2.0);
  CHECK(scaled.a == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(scaled.b == doctest::Approx(4.5).epsilon(1e-15));
}

TEST_CASE("ring_reference radius and planar density mass") {
  CHECK_THROWS_AS(spectra::ring_reference(1.5, 1), InvalidRatio);
  CHECK_THROWS_AS(spectra::ring_reference(0.5, 0), ShapeMismatch);
  for (int L : {1, 2, 3}) {
    const auto ring = spectra::ring_reference(0.4, L);
    CHECK(ring.inner_radius == doctest::Approx(std::pow(0.6, L / 2.0)).epsilon(1e-15));
    auto mass = [&](double r) { return ring.pdf(r) * 2.0 * kPi * r; };
    CHECK(simpson(mass, ring.inner_radius, 1.0, 2000) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("haar_orthogonal is orthogonal, unimodular, deterministic") {
  const Eigen::MatrixXd q = spectra::haar_orthogonal(8, 7);
  CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(8, 8)).norm() < 1e-12);
  CHECK(std::abs(std::abs(q.determinant()) - 1.0) < 1e-12);
  CHECK((q - spectra::haar_orthogonal(8, 7)).norm() == 0.0);
  CHECK((q - spectra::haar_orthogonal(8, 8)).norm() > 1e-3);
}

TEST_CASE("singular_value_equivalent shares singular values and gram matrix") {
  const auto x = std_gaussian(6, 24, 11);
  const Eigen::MatrixXd au = spectra::singular_value_equivalent(x, 5);
  Eigen::BDCSVD<Eigen::MatrixXd> sx(x.values);
  Eigen::BDCSVD<Eigen::MatrixXd> sa(au);
  REQUIRE(sx.singularValues().size() == sa.singularValues().size());
  for (long i = 0; i < sx.singularValues().size(); ++i) {
    CHECK(sa.singularValues()(i) == doctest::Approx(sx.singularValues()(i)).epsilon(1e-9));
  }
  CHECK((au * au.transpose() - x.values * x.values.transpose()).norm() < 1e-8);
}

TEST_CASE("ring_product matches a closed-form 2x2 oracle") {
  const auto x = std_gaussian(2, 8, 21);
  const std::uint64_t seed = 77;

  // Oracle: sqrt(X X^T) via the SPD 2x2 closed form, then the same Haar
  // factor, row rescale, and analytic complex eigenvalues.
  const Eigen::Matrix2d a = x.values * x.values.transpose();
  const double s = std::sqrt(a.determinant());
  const double tau = std::sqrt(a.trace() + 2.0 * s);
  const Eigen::Matrix2d sqrt_a = (a + s * Eigen::Matrix2d::Identity()) / tau;
  const Eigen::MatrixXd u = spectra::haar_orthogonal(2, rng::derive(seed, 0));
  Eigen::Matrix2d z = sqrt_a * u;
  for (int i = 0; i < 2; ++i) {
    const double mu = z.row(i).mean();
    const double sd = std::sqrt((z.row(i).array() - mu).square().sum() / 2.0);
    z.row(i) /= std::sqrt(2.0) * sd;
  }
  const std::complex<double> trc(z.trace(), 0.0);
  const std::complex<double> disc = std::sqrt(trc * trc - 4.0 * z.determinant());
  std::vector<std::complex<double>> expected = {(trc + disc) / 2.0, (trc - disc) / 2.0};

  auto got = spectra::ring_product({x}, 1, seed).eigenvalues;
  auto by_real = [](const std::complex<double>& l, const std::complex<double>& r) {
    return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
  };
  std::sort(expected.begin(), expected.end(), by_real);
  std::sort(got.begin(), got.end(), by_real);
  REQUIRE(got.size() == 2);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(got[static_cast<std::size_t>(i)] - expected[static_cast<std::size_t>(i)]) < 1e-9);
}

TEST_CASE("ring_product validates window count and shapes") {
  const auto x = std_gaussian(3, 9, 1);
  const auto y = std_gaussian(4, 9, 2);
  CHECK_THROWS_AS(spectra::ring_product({x, x}, 1, 3), ShapeMismatch);
  CHECK_THROWS_AS(spectra::ring_product({x, y}, 2, 3), ShapeMismatch);
  CHECK(spectra::ring_product({x, x}, 2, 3).size() == 3);
}

TEST_CASE("ring_product moduli concentrate in the annulus at scale") {
  const auto x = std_gaussian(120, 300, 4);
  const auto ring = spectra::ring_product({x}, 1, rng::derive(4, rng::salt_ring_tick));
  const auto ref = spectra::ring_reference(0.4, 1);
  CHECK(spectra::ring_annulus_fraction(ring, ref.inner_radius) > 0.9);
}

TEST_CASE("esd_histogram bins counts and normalizes density") {
  const auto spec =
      hand_spectrum({{3.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}, spectra::SourceKind::covariance);
  const auto h = spectra::esd_histogram(spec, 5);
  REQUIRE(h.bin_edges.size() == 6);
  CHECK(h.bin_edges.front() == doctest::Approx(1.0));
  CHECK(h.bin_edges.back() == doctest::Approx(3.0));
  const std::vector<long> expected_counts = {2, 0, 1, 0, 1};
  for (std::size_t i = 0; i < 5; ++i) CHECK(h.counts[i] == expected_counts[i]);
  double mass = 0.0;
  for (std::size_t i = 0; i < 5; ++i) mass += h.normalized_density[i] * (h.bin_edges[i + 1] - h.bin_edges[i]);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(spectra::esd_histogram(spec, 4), ConfigError);
  CHECK_THROWS_AS(spectra::esd_histogram(hand_spectrum({}, spectra::SourceKind::covariance), 5),
                  EmptySpectrum);

  const auto flat = spectra::esd_histogram(hand_spectrum({{2.0, 0.0}, {2.0, 0.0}}, spectra::SourceKind::covariance), 5);
  CHECK(flat.bin_edges.front() == doctest::Approx(1.5));
  CHECK(flat.bin_edges.back() == doctest::Approx(2.5));

  // ring spectra are binned by modulus
  const auto ring_hist =
      spectra::esd_histogram(hand_spectrum({{0.0, 3.0}, {4.0, 0.0}}, spectra::SourceKind::ring_product), 5);
  CHECK(ring_hist.bin_edges.front() == doctest::Approx(3.0));
  CHECK(ring_hist.bin_edges.back() == doctest::Approx(4.0));
}

TEST_CASE("mp_l1_distance recognizes its own reference and rejects junk") {
  // Sample p eigenvalues exactly from the MP law by inverting the CDF on a
  // fine quadrature grid, then check the metric reports a small distance.
  const double c = 0.4;
  const auto mp = spectra::mp_reference(c, 1.0);
  const int grid = 20000;
  std::vector<double> cdf(static_cast<std::size_t>(grid) + 1, 0.0);
  const double h = (mp.b - mp.a) / grid;
  for (int i = 1; i <= grid; ++i) {
    const double x0 = mp.a + h * (i - 1);
    const double x1 = mp.a + h * i;
    cdf[static_cast<std::size_t>(i)] =
        cdf[static_cast<std::size_t>(i - 1)] + 0.5 * h * (mp.pdf(x0) + mp.pdf(x1));
  }
  const double total = cdf.back();
  const int p = 2000;
  std::vector<double> lambda(p);
  for (int i = 0; i < p; ++i) {
    const double target = total * (i + 0.5) / p;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    const auto idx = static_cast<std::size_t>(it - cdf.begin());
    lambda[static_cast<std::size_t>(i)] = mp.a + h * static_cast<double>(idx);
  }
  CHECK(spectra::mp_l1_distance(lambda, c, 1.0, 50) < 0.03);

  // every eigenvalue far outside the support: total variation saturates
  std::vector<double> junk(100, 25.0);
  CHECK(spectra::mp_l1_distance(junk, c, 1.0, 50) > 0.95);
  CHECK(spectra::mp_l1_distance(junk, c, 1.0, 50) <= 1.0 + 1e-12);

  CHECK_THROWS_AS(spectra::mp_l1_distance({}, c, 1.0, 50), EmptySpectrum);
  CHECK_THROWS_AS(spectra::mp_l1_distance({1.0}, -0.3, 1.0, 50), InvalidRatio);
}

TEST_CASE("mp_l1_distance handles c > 1 by dropping structural zeros") {
  // p = 2t: half the spectrum is structural zeros. Use a gaussian window's
  // lifted-shape analog: p eigenvalues where p - t vanish.
  const auto x = std_gaussian(40, 80, 6);
  const Eigen::MatrixXd wide = (x.values.transpose() * x.values) / 80.0;  // 80x80, rank <= 40
  const auto spec = spectra::eigen(spectra::CovarianceMatrix{wide});
  const double d = spectra::mp_l1_distance(spec.real_eigenvalues(), 2.0, 0.5, 40);
  CHECK(d >= 0.0);
  CHECK(d <= 1.0);
}

TEST_CASE("ring_annulus_fraction applies the tolerance band") {
  const auto spec = hand_spectrum(
      {{0.59, 0.0}, {0.0, 1.01}, {1.03, 0.0}, {0.2, 0.0}}, spectra::SourceKind::ring_product);
  CHECK(spectra::ring_annulus_fraction(spec, 0.6, 0.02) == doctest::Approx(0.5));
  CHECK(spectra::ring_annulus_fraction(spec, 0.6, 0.05) == doctest::Approx(0.75));
}
