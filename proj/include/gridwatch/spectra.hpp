#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace gridwatch::spectra {

struct RowLabel {
  int device = 0;
  std::string variable;
};

/// One p x t slice of the source matrix. Construction enforces p <= t: both
/// reference laws assume the ratio c = p/t lies in (0, 1].
struct RawWindow {
  Eigen::MatrixXd values;
  long start_tick = 0;
  long end_tick = 0;
  std::vector<RowLabel> row_labels;

  static RawWindow make(Eigen::MatrixXd values, long start_tick, long end_tick,
                        std::vector<RowLabel> row_labels = {});
  long p() const { return values.rows(); }
  long t() const { return values.cols(); }
};

/// Row-wise standardized window: every row has mean 0 and population standard
/// deviation 1.
struct StandardizedWindow {
  Eigen::MatrixXd values;
  long p() const { return values.rows(); }
  long t() const { return values.cols(); }
};

struct CovarianceMatrix {
  Eigen::MatrixXd values;
  long p() const { return values.rows(); }
};

enum class SourceKind { covariance, ring_product };

struct EigenSpectrum {
  std::vector<std::complex<double>> eigenvalues;  // sorted descending by real part for covariance
  Eigen::MatrixXd eigenvectors;                   // column k pairs with eigenvalues[k]; empty for ring
  SourceKind source_kind = SourceKind::covariance;

  std::size_t size() const { return eigenvalues.size(); }
  /// Real parts, in stored order. Covariance spectra are real by construction.
  std::vector<double> real_eigenvalues() const;
};

/// Marchenko-Pastur limit: support [a, b] with a = sigma^2 (1-sqrt(c))^2,
/// b = sigma^2 (1+sqrt(c))^2, for c in (0, 1].
struct MpReference {
  double c = 0.0;
  double sigma2 = 1.0;
  double a = 0.0;
  double b = 0.0;

  double pdf(double x) const;
};

/// Ring law for products of L singular-value-equivalent factors: eigenvalues
/// of the rescaled product fill the annulus [(1-c)^(L/2), 1].
struct RingReference {
  double c = 0.0;
  int L = 1;
  double inner_radius = 0.0;

  /// Planar density at modulus |x|: |x|^(2/L-2) / (pi c L) inside the annulus.
  double pdf(double modulus) const;
};

struct EsdHistogram {
  std::vector<double> bin_edges;         // size bins+1, contiguous
  std::vector<long> counts;              // size bins
  std::vector<double> normalized_density;  // integrates to 1
};

/// Row-wise standardization (subtract row mean, divide by population sigma).
/// Throws ZeroVarianceRow for rows with sigma <= 1e-12.
StandardizedWindow standardize(const RawWindow& window);

/// Sigma = (1/t) X X^T. Trace equals p for standardized input.
CovarianceMatrix covariance(const StandardizedWindow& x);

/// Symmetric eigendecomposition, eigenvalues sorted descending with paired
/// eigenvector columns. Throws ConvergenceFailure if the solver fails.
EigenSpectrum eigen(const CovarianceMatrix& m);

/// Throws InvalidRatio outside (0, 1].
MpReference mp_reference(double c, double sigma2);

/// Throws InvalidRatio outside (0, 1]; L >= 1.
RingReference ring_reference(double c, int L);

/// Haar-distributed p x p orthogonal matrix: QR of a seeded Gaussian matrix
/// with the R-diagonal sign correction.
Eigen::MatrixXd haar_orthogonal(long p, std::uint64_t seed);

/// A_u = sqrt(X X^T) U with Haar U; shares X's singular values.
Eigen::MatrixXd singular_value_equivalent(const StandardizedWindow& x, std::uint64_t seed);

/// Z = prod of L singular-value equivalents, rows rescaled to variance 1/p;
/// complex eigenvalues of the rescaled product. Factor k uses substream
/// derive(seed, k). Throws ShapeMismatch unless exactly L same-shape windows.
EigenSpectrum ring_product(const std::vector<StandardizedWindow>& windows, int L, std::uint64_t seed);

/// Histogram over eigenvalues (covariance source) or moduli (ring source),
/// bins >= 5, range [min, max]. Throws EmptySpectrum.
EsdHistogram esd_histogram(const EigenSpectrum& spectrum, int bins);

/// L1 distance between the binned empirical spectral distribution and the MP
/// reference, total-variation normalized: (1/2) (sum_bins |phat - q| + mass of
/// the reference outside the histogram range). For c > 1 the p - t structural
/// zero eigenvalues are dropped and the continuous MP part (mass 1/c) is
/// rescaled by c so both sides remain probability masses.
double mp_l1_distance(std::vector<double> eigenvalues, double c, double sigma2, int bins = 50);

/// Fraction of moduli inside [inner - tol, 1 + tol].
double ring_annulus_fraction(const EigenSpectrum& ring_spectrum, double inner_radius, double tol = 0.02);

/// Upper MP edge for any c > 0 (also used by the augmented path where c may
/// exceed 1 and MpReference is not constructible).
inline double mp_upper_edge(double c, double sigma2) {
  const double s = std::sqrt(c);
  return sigma2 * (1.0 + s) * (1.0 + s);
}

}  // namespace gridwatch::spectra
