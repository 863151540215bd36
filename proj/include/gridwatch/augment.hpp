#pragma once

#include <vector>

#include "gridwatch/spectra.hpp"

namespace gridwatch::augment {

/// Tensor-product dimension lift: each column is split into k contiguous
/// length-n blocks whose Kronecker product forms an n^k-dimensional column.
struct AugmentConfig {
  int n = 0;
  int k = 2;
  std::vector<double> tau;  // weights; empty means all 1

  /// Throws ShapeMismatch unless n * k == p and n^k stays under the guard.
  void validate(long p) const;
  long lifted_dim() const;
};

inline constexpr long lifted_dim_guard = 100000;

/// Column j of the result is block_1 (x) ... (x) block_k of column j of x.
/// Each block is centered (in-window) and rescaled to Euclidean norm sqrt(n)
/// so block entries carry unit empirical second moment and the lifted
/// covariance matches the sigma^2 = 1 MP reference. A block that is constant
/// after centering stays zero (neutral column direction).
Eigen::MatrixXd tensor_columns(const spectra::StandardizedWindow& x, const AugmentConfig& cfg);

/// M = (1/t) sum_alpha tau_alpha xt_alpha xt_alpha^T.
spectra::CovarianceMatrix augmented_covariance(const Eigen::MatrixXd& xt, const std::vector<double>& tau);

}  // namespace gridwatch::augment
