#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gridwatch/rng.hpp"
#include "gridwatch/stats.hpp"

using namespace gridwatch;

TEST_CASE("splitmix64 matches the published reference sequence") {
  std::uint64_t state = 0;
  CHECK(rng::splitmix64(state) == 0xe220a8397b1dcdafULL);
  CHECK(rng::splitmix64(state) == 0x6e789e6aa1b965f4ULL);
  CHECK(rng::splitmix64(state) == 0x06c45d188009454fULL);
}

TEST_CASE("derive is deterministic and salt-sensitive") {
  CHECK(rng::derive(42, 7) == rng::derive(42, 7));
  std::set<std::uint64_t> children;
  for (std::uint64_t salt = 0; salt < 100; ++salt) children.insert(rng::derive(42, salt));
  CHECK(children.size() == 100);
  CHECK(rng::derive(1, 7) != rng::derive(2, 7));
}

TEST_CASE("Stream reproduces itself and stays in range") {
  rng::Stream a(123), b(123);
  for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
  rng::Stream u(5);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform01();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("Stream gaussians have unit moments") {
  rng::Stream s(2024);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = s.gaussian();
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("mean and population stddev") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  CHECK(stats::mean(x) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(stats::pop_stddev(x.data(), x.size()) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
}

TEST_CASE("median handles odd and even lengths") {
  CHECK(stats::median({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
  CHECK(stats::median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
  CHECK(stats::median({7.0}) == doctest::Approx(7.0));
}

TEST_CASE("mad is the median absolute deviation") {
  // median 3, deviations {2,1,0,1,97} -> median deviation 1
  CHECK(stats::mad({1.0, 2.0, 3.0, 4.0, 100.0}) == doctest::Approx(1.0));
  CHECK(stats::mad({5.0, 5.0, 5.0}) == doctest::Approx(0.0));
}

TEST_CASE("normal_quantile agrees with the exact CDF") {
  CHECK(std::abs(stats::normal_quantile(0.5)) < 1e-15);
  CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  for (double p : {0.6, 0.9, 0.99, 0.999, 1e-5, 0.02}) {
    const double q = stats::normal_quantile(p);
    const double cdf = 0.5 * std::erfc(-q / std::sqrt(2.0));
    CHECK(std::abs(cdf - p) < 1e-14);
    CHECK(stats::normal_quantile(1.0 - p) == doctest::Approx(-q).epsilon(1e-10));
  }
  CHECK_THROWS_AS(stats::normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(stats::normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("two_sided_z at 95% confidence is 1.96") {
  const double z = stats::two_sided_z(0.95);
  CHECK(std::abs(z - 1.96) < 0.005);
  CHECK(z == doctest::Approx(1.959963984540054).epsilon(1e-12));
}
