#include <cmath>
#include <vector>

#include "doctest.h"
#include "gridwatch/augment.hpp"
#include "gridwatch/errors.hpp"
#include "gridwatch/rng.hpp"
#include "gridwatch/spectra.hpp"
#include "test_support.hpp"

using namespace gridwatch;
using testsupport::std_gaussian;

namespace {

// Center a length-n block and scale it to Euclidean norm sqrt(n).
Eigen::VectorXd unit_block(Eigen::VectorXd b) {
  b.array() -= b.mean();
  const double nrm = b.norm();
  if (nrm > 1e-12) b *= std::sqrt(static_cast<double>(b.size())) / nrm;
  return b;
}

}  // namespace

TEST_CASE("AugmentConfig validation and lifted dimension") {
  augment::AugmentConfig cfg;
  cfg.n = 15;
  cfg.k = 2;
  CHECK(cfg.lifted_dim() == 225);
  CHECK_NOTHROW(cfg.validate(30));
  CHECK_THROWS_AS(cfg.validate(31), ShapeMismatch);

  cfg.n = 1;
  CHECK_THROWS_AS(cfg.validate(2), ShapeMismatch);
  cfg.n = 15;
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(15), ShapeMismatch);

  cfg.n = 100;
  cfg.k = 3;
  CHECK(cfg.lifted_dim() > augment::lifted_dim_guard);
  CHECK_THROWS_AS(cfg.validate(300), ShapeMismatch);
}

TEST_CASE("tensor_columns hand value: later blocks vary fastest") {
  Eigen::MatrixXd m(4, 2);
  m.col(0) << 1, -1, -1, 1;
  m.col(1) << 1, -1, 1, -1;
  augment::AugmentConfig cfg;
  cfg.n = 2;
  cfg.k = 2;
  const auto xt = augment::tensor_columns(spectra::StandardizedWindow{m}, cfg);
  REQUIRE(xt.rows() == 4);
  REQUIRE(xt.cols() == 2);
  // column 0: (1,-1) (x) (-1,1) with the first block indexing the slow axis
  Eigen::VectorXd expected(4);
  expected << -1, 1, 1, -1;
  CHECK((xt.col(0) - expected).norm() < 1e-14);
  expected << 1, -1, -1, 1;
  CHECK((xt.col(1) - expected).norm() < 1e-14);
}

TEST_CASE("tensor_columns matches an explicit nested-loop Kronecker oracle") {
  const auto x = std_gaussian(9, 12, 23);
  augment::AugmentConfig cfg;
  cfg.n = 3;
  cfg.k = 3;
  const auto xt = augment::tensor_columns(x, cfg);
  REQUIRE(xt.rows() == 27);
  REQUIRE(xt.cols() == 12);

  for (long j = 0; j < 12; ++j) {
    const Eigen::VectorXd b0 = unit_block(x.values.block(0, j, 3, 1));
    const Eigen::VectorXd b1 = unit_block(x.values.block(3, j, 3, 1));
    const Eigen::VectorXd b2 = unit_block(x.values.block(6, j, 3, 1));
    for (long a = 0; a < 3; ++a)
      for (long b = 0; b < 3; ++b)
        for (long c = 0; c < 3; ++c)
          CHECK(xt((a * 3 + b) * 3 + c, j) ==
                doctest::Approx(b0(a) * b1(b) * b2(c)).epsilon(1e-12));
  }
}

TEST_CASE("tensor_columns normalizes each lifted column to norm n^(k/2)") {
  const auto x = std_gaussian(8, 10, 31);
  augment::AugmentConfig cfg;
  cfg.n = 4;
  cfg.k = 2;
  const auto xt = augment::tensor_columns(x, cfg);
  for (long j = 0; j < xt.cols(); ++j) {
    CHECK(xt.col(j).norm() == doctest::Approx(4.0).epsilon(1e-12));  // n^(k/2) = 4
  }
}

TEST_CASE("a constant block collapses its lifted column to zero") {
  Eigen::MatrixXd m(4, 1);
  m << 2.0, 2.0, 1.0, -1.0;  // first block constant, second informative
  augment::AugmentConfig cfg;
  cfg.n = 2;
  cfg.k = 2;
  const auto xt = augment::tensor_columns(spectra::StandardizedWindow{m}, cfg);
  CHECK(xt.col(0).norm() == doctest::Approx(0.0));
}

TEST_CASE("augmented_covariance trace equals the lifted dimension") {
  const auto x = std_gaussian(12, 64, 41);
  augment::AugmentConfig cfg;
  cfg.n = 6;
  cfg.k = 2;
  const auto xt = augment::tensor_columns(x, cfg);
  const auto m = augment::augmented_covariance(xt, {});
  CHECK(m.p() == 36);
  CHECK(m.values.trace() == doctest::Approx(36.0).epsilon(1e-10));
  CHECK((m.values - m.values.transpose()).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("augmented_covariance applies tick weights tau") {
  Eigen::MatrixXd xt(2, 3);
  xt << 1, 0, 2, 0, 1, 2;
  const auto unweighted = augment::augmented_covariance(xt, {});
  const auto ones = augment::augmented_covariance(xt, {1.0, 1.0, 1.0});
  CHECK((unweighted.values - ones.values).norm() == doctest::Approx(0.0));

  const auto doubled = augment::augmented_covariance(xt, {2.0, 2.0, 2.0});
  CHECK((doubled.values - 2.0 * unweighted.values).norm() == doctest::Approx(0.0).epsilon(1e-14));

  // hand value: M = (1/3) xt diag(tau) xt^T with tau = (1, 0, 0)
  const auto first_only = augment::augmented_covariance(xt, {1.0, 0.0, 0.0});
  CHECK(first_only.values(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(first_only.values(0, 1) == doctest::Approx(0.0));
  CHECK(first_only.values(1, 1) == doctest::Approx(0.0));

  CHECK_THROWS_AS(augment::augmented_covariance(xt, {1.0, 1.0}), ShapeMismatch);
}

TEST_CASE("augmentation tightens the MP fit for pure noise") {
  const auto x = std_gaussian(30, 200, 7);
  const auto raw_spec = spectra::eigen(spectra::covariance(x));
  const double raw_l1 = spectra::mp_l1_distance(raw_spec.real_eigenvalues(), 30.0 / 200.0, 1.0);

  augment::AugmentConfig cfg;
  cfg.n = 15;
  cfg.k = 2;
  const auto xt = augment::tensor_columns(x, cfg);
  const auto aug_spec = spectra::eigen(augment::augmented_covariance(xt, {}));
  const double aug_l1 = spectra::mp_l1_distance(aug_spec.real_eigenvalues(), 225.0 / 200.0, 1.0);

  CHECK(aug_l1 < raw_l1);
}
