#include <cmath>
#include <complex>

#include "doctest.h"
#include "gridwatch/errors.hpp"
#include "gridwatch/les.hpp"
#include "gridwatch/spectra.hpp"

using namespace gridwatch;

namespace {

spectra::EigenSpectrum cov_spectrum(std::vector<double> values) {
  spectra::EigenSpectrum s;
  for (double v : values) s.eigenvalues.emplace_back(v, 0.0);
  s.source_kind = spectra::SourceKind::covariance;
  return s;
}

}  // namespace

TEST_CASE("TestFunction::parse accepts short and long names") {
  CHECK(les::TestFunction::parse("cp").kind == les::TestKind::chebyshev_poly);
  CHECK(les::TestFunction::parse("chebyshev_poly").kind == les::TestKind::chebyshev_poly);
  CHECK(les::TestFunction::parse("ie").kind == les::TestKind::information_entropy);
  CHECK(les::TestFunction::parse("information_entropy").kind == les::TestKind::information_entropy);
  CHECK(les::TestFunction::parse("lrf").kind == les::TestKind::likelihood_ratio);
  CHECK(les::TestFunction::parse("wd").kind == les::TestKind::wasserstein);
  CHECK_THROWS_AS(les::TestFunction::parse("bogus"), ConfigError);

  const auto cp = les::TestFunction::parse("cp");
  REQUIRE(cp.coefficients.size() == 3);
  CHECK(cp.coefficients[0] == 1.0);
  CHECK(cp.coefficients[1] == 0.0);
  CHECK(cp.coefficients[2] == 0.0);
  CHECK(cp.name() == "cp");
  CHECK(les::TestFunction::parse("wd").name() == "wd");
}

TEST_CASE("chebyshev_poly evaluates descending-power coefficients") {
  const auto cp = les::TestFunction::parse("cp", {2.0, 1.0, 3.0});
  CHECK(cp(2.0) == doctest::Approx(13.0).epsilon(1e-15));  // 2*4 + 1*2 + 3
  CHECK(cp(0.0) == doctest::Approx(3.0).epsilon(1e-15));

  const auto one = les::TestFunction::parse("cp", {0.0, 0.0, 0.0, 1.0});
  CHECK(one(17.3) == doctest::Approx(1.0).epsilon(1e-15));

  const auto square = les::TestFunction::parse("cp");
  CHECK(square(3.0) == doctest::Approx(9.0).epsilon(1e-15));
}

TEST_CASE("information entropy, likelihood ratio, wasserstein hand values") {
  const auto ie = les::TestFunction::parse("ie");
  const double einv = std::exp(-1.0);
  CHECK(ie(einv) == doctest::Approx(einv).epsilon(1e-14));
  CHECK(ie(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  // lambda = 0 hits the clamp rather than a NaN from log(0)
  CHECK(std::isfinite(ie(0.0)));
  CHECK(ie(0.0) == doctest::Approx(-les::eigenvalue_floor * std::log(les::eigenvalue_floor)));

  const auto lrf = les::TestFunction::parse("lrf");
  CHECK(lrf(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(lrf(2.0) == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-14));
  CHECK(std::isfinite(lrf(0.0)));

  const auto wd = les::TestFunction::parse("wd");
  CHECK(wd(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(wd(4.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(wd(-0.25) == doctest::Approx(1.0).epsilon(1e-15));  // negative zeros clamp to 0
}

TEST_CASE("les_value sums phi over a covariance spectrum") {
  const auto spec = cov_spectrum({4.0, 1.0});
  CHECK(les::les_value(spec, les::TestFunction::parse("cp")) == doctest::Approx(17.0).epsilon(1e-14));
  CHECK(les::les_value(spec, les::TestFunction::parse("cp", {0.0, 1.0})) ==
        doctest::Approx(2.0).epsilon(1e-14));  // constant-1 counts eigenvalues
  CHECK_THROWS_AS(les::les_value(cov_spectrum({}), les::TestFunction::parse("ie")), EmptySpectrum);
}

TEST_CASE("msr averages eigenvalue moduli for both source kinds") {
  CHECK(les::msr(cov_spectrum({4.0, 1.0})) == doctest::Approx(2.5).epsilon(1e-15));

  spectra::EigenSpectrum ring;
  ring.source_kind = spectra::SourceKind::ring_product;
  ring.eigenvalues = {{0.0, 3.0}, {4.0, 0.0}};
  CHECK(les::msr(ring) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK_THROWS_AS(les::msr(cov_spectrum({})), EmptySpectrum);
}

TEST_CASE("normalize_series maps onto [0,1] and flags the output") {
  les::LesSeries s;
  s.test_function = les::TestFunction::parse("ie");
  s.points = {{10, 2.0}, {11, 4.0}, {12, 6.0}};
  const auto n = les::normalize_series(s);
  CHECK(n.normalized);
  CHECK(n.test_function.name() == "ie");
  REQUIRE(n.points.size() == 3);
  CHECK(n.points[0].value == doctest::Approx(0.0));
  CHECK(n.points[1].value == doctest::Approx(0.5));
  CHECK(n.points[2].value == doctest::Approx(1.0));
  CHECK(n.points[0].tick == 10);
  CHECK(n.points[2].tick == 12);

  les::LesSeries flat;
  flat.points = {{1, 3.0}, {2, 3.0}};
  CHECK_THROWS_AS(les::normalize_series(flat), DegenerateSeries);

  les::LesSeries single;
  single.points = {{1, 3.0}};
  CHECK_THROWS_AS(les::normalize_series(single), DegenerateSeries);
}
