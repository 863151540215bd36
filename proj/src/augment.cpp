#include "gridwatch/augment.hpp"

#include <cmath>

#include "gridwatch/errors.hpp"

namespace gridwatch::augment {

void AugmentConfig::validate(long p) const {
  if (n < 2 || k < 1) throw ShapeMismatch("augment needs n >= 2 and k >= 1");
  if (static_cast<long>(n) * k != p)
    throw ShapeMismatch("augment blocks n*k = " + std::to_string(static_cast<long>(n) * k) +
                        " do not tile p = " + std::to_string(p) + " rows");
  if (lifted_dim() > lifted_dim_guard)
    throw ShapeMismatch("n^k = " + std::to_string(lifted_dim()) + " exceeds the dimension guard");
}

long AugmentConfig::lifted_dim() const {
  double d = 1.0;
  for (int e = 0; e < k; ++e) d *= n;
  if (d > 1e18) return lifted_dim_guard + 1;
  return static_cast<long>(d);
}

Eigen::MatrixXd tensor_columns(const spectra::StandardizedWindow& x, const AugmentConfig& cfg) {
  cfg.validate(x.p());
  const long t = x.t();
  const long n = cfg.n;
  const long dim = cfg.lifted_dim();
  Eigen::MatrixXd out(dim, t);
  Eigen::VectorXd block(n), acc, next;
  for (long j = 0; j < t; ++j) {
    acc = Eigen::VectorXd::Ones(1);
    for (int b = 0; b < cfg.k; ++b) {
      block = x.values.block(static_cast<long>(b) * n, j, n, 1);
      block.array() -= block.mean();
      const double nrm = block.norm();
      if (nrm > 1e-12) block *= std::sqrt(static_cast<double>(n)) / nrm;
      next.resize(acc.size() * n);
      for (long r = 0; r < acc.size(); ++r) next.segment(r * n, n) = acc(r) * block;
      acc.swap(next);
    }
    out.col(j) = acc;
  }
  return out;
}

spectra::CovarianceMatrix augmented_covariance(const Eigen::MatrixXd& xt, const std::vector<double>& tau) {
  const long t = xt.cols();
  if (!tau.empty() && static_cast<long>(tau.size()) != t)
    throw ShapeMismatch("tau length " + std::to_string(tau.size()) + " != t = " + std::to_string(t));
  Eigen::MatrixXd m;
  if (tau.empty()) {
    m = (xt * xt.transpose()) / static_cast<double>(t);
  } else {
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(tau.data(), t);
    m = (xt * w.asDiagonal() * xt.transpose()) / static_cast<double>(t);
  }
  m = 0.5 * (m + m.transpose()).eval();
  return spectra::CovarianceMatrix{std::move(m)};
}

}  // namespace gridwatch::augment
