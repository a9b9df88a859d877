#pragma once

// Dense kernels shared by the sampler: positive-definiteness tests, the
// admissible range of one correlation entry, precision assembly from
// (S, A, R) factors, and the multivariate normal log-density in precision form.

#include <Eigen/Dense>

#include <optional>

namespace bggm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Cholesky pivots must exceed this for a matrix to count as positive definite.
inline constexpr double kPivotTolerance = 1e-10;
/// Admissible intervals are pulled in by this much at each end before sampling.
inline constexpr double kIntervalShrink = 1e-8;

/// Open interval (lower, upper).
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool empty() const { return !(lower < upper); }
  double width() const { return empty() ? 0.0 : upper - lower; }
  bool contains(double x) const { return lower < x && x < upper; }
  Interval shrunk(double eps) const { return {lower + eps, upper - eps}; }
};

/// log det(m) if the Cholesky factorization succeeds with every pivot above
/// kPivotTolerance, nullopt otherwise. Only the lower triangle is read.
std::optional<double> cholesky_log_det(const Matrix& m);

/// Throws ValidationError on non-finite or non-square input.
bool is_positive_definite(const Matrix& m);

/// Maximal open interval of values x for entry (i, j) (and its mirror) that
/// keeps the correlation matrix `c` positive definite, intersected with (-1, 1).
///
/// det(c) is a concave quadratic in x. Its coefficients come from determinants
/// at x = -1, 0, 1; the interval is the span between the two roots. A bisection
/// against the Cholesky test covers numerically degenerate quadratics.
///
/// Throws PreconditionError if `c` is not PD, ValidationError if i == j or an
/// index is out of range.
Interval admissible_interval(const Matrix& c, Index i, Index j);

/// Elementwise product.
Matrix hadamard(const Matrix& a, const Matrix& b);

/// Omega = S (A .* R) S with S = diag(s).
struct PrecisionFactors {
  Vector s;
  Matrix a;
  Matrix r;

  /// Validates shapes, s > 0, A binary with unit diagonal, R a correlation-role
  /// matrix, and A .* R positive definite. Throws on violation.
  static PrecisionFactors make(Vector s, Matrix a, Matrix r);
};

struct Precision {
  Matrix omega;
  double log_det = 0.0;
};

/// Throws PreconditionError if A .* R is not PD.
Precision assemble_precision(const PrecisionFactors& f);

/// rho_ij = -omega_ij / sqrt(omega_ii omega_jj), unit diagonal.
Matrix partial_correlations(const Matrix& omega);

/// log N(y | mu, omega^{-1}) given log det(omega).
double mvn_logpdf(const Vector& y, const Vector& mu, const Matrix& omega, double log_det);

}  // namespace bggm
