#pragma once

#include <cstddef>
#include <vector>

namespace gridwatch::stats {

double mean(const double* x, std::size_t n);
/// Population (divide-by-n) standard deviation; the whole pipeline uses the
/// population convention so the covariance normalization stays consistent.
double pop_stddev(const double* x, std::size_t n);
double pop_stddev(const double* x, std::size_t n, double mu);

inline double mean(const std::vector<double>& x) { return mean(x.data(), x.size()); }
inline double pop_stddev(const std::vector<double>& x) { return pop_stddev(x.data(), x.size()); }

/// Median of a copy (input untouched). Even-length inputs average the two
/// central order statistics.
double median(std::vector<double> x);

/// Median absolute deviation about the median (unscaled).
double mad(const std::vector<double>& x);

/// Inverse standard-normal CDF. Acklam's rational approximation polished with
/// one Halley step; |error| < 1e-9 over (0,1).
double normal_quantile(double p);

/// Two-sided z coefficient: confidence 0.95 -> 1.959964.
double two_sided_z(double confidence_level);

}  // namespace gridwatch::stats
