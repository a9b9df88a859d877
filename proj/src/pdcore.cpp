#include "bggm/pdcore.hpp"

#include "bggm/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace bggm {

namespace {

void require_square_finite(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ValidationError(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw ValidationError(std::string(what) + ": matrix has non-finite entries");
  }
}

double det_with_entry(Matrix& c, Index i, Index j, double x) {
  c(i, j) = x;
  c(j, i) = x;
  return c.partialPivLu().determinant();
}

bool pd_with_entry(Matrix& c, Index i, Index j, double x) {
  c(i, j) = x;
  c(j, i) = x;
  return cholesky_log_det(c).has_value();
}

// Walks from a PD point toward a non-PD one and returns the last PD location.
double bisect_boundary(Matrix& c, Index i, Index j, double inside, double outside) {
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    if (pd_with_entry(c, i, j, mid)) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return inside;
}

}  // namespace

std::optional<double> cholesky_log_det(const Matrix& m) {
  const Index p = m.rows();
  Matrix l = Matrix::Zero(p, p);
  double log_det = 0.0;
  for (Index j = 0; j < p; ++j) {
    double d = m(j, j);
    for (Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > kPivotTolerance)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    log_det += std::log(d);
    for (Index i = j + 1; i < p; ++i) {
      double v = m(i, j);
      for (Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return log_det;
}

bool is_positive_definite(const Matrix& m) {
  require_square_finite(m, "is_positive_definite");
  return cholesky_log_det(m).has_value();
}

Interval admissible_interval(const Matrix& c, Index i, Index j) {
  require_square_finite(c, "admissible_interval");
  const Index p = c.rows();
  if (i < 0 || j < 0 || i >= p || j >= p) throw ValidationError("admissible_interval: index out of range");
  if (i == j) throw ValidationError("admissible_interval: diagonal entry has no interval");
  if (!cholesky_log_det(c)) throw PreconditionError("admissible_interval: matrix is not positive definite");

  const double current = c(i, j);
  Matrix work = c;
  const double f_minus = det_with_entry(work, i, j, -1.0);
  const double f_zero = det_with_entry(work, i, j, 0.0);
  const double f_plus = det_with_entry(work, i, j, 1.0);

  const double lead = 0.5 * (f_plus + f_minus) - f_zero;
  const double slope = 0.5 * (f_plus - f_minus);
  const double disc = slope * slope - 4.0 * lead * f_zero;

  Interval out{-1.0, 1.0};
  bool solved = false;
  if (std::abs(lead) >= 1e-12 && lead < 0.0 && disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double q = -0.5 * (slope + (slope >= 0.0 ? root : -root));
    double r1 = q / lead;
    double r2 = (q != 0.0) ? f_zero / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    out.lower = std::max(-1.0, r1);
    out.upper = std::min(1.0, r2);
    solved = out.lower <= current && current <= out.upper;
  }
  if (!solved) {
    out.lower = bisect_boundary(work, i, j, current, -1.0);
    out.upper = bisect_boundary(work, i, j, current, 1.0);
  }
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ValidationError("hadamard: shape mismatch");
  return a.cwiseProduct(b);
}

PrecisionFactors PrecisionFactors::make(Vector s, Matrix a, Matrix r) {
  const Index p = s.size();
  if (p == 0 || a.rows() != p || a.cols() != p || r.rows() != p || r.cols() != p) {
    throw ValidationError("PrecisionFactors: dimension mismatch");
  }
  if (!s.allFinite() || !a.allFinite() || !r.allFinite()) throw ValidationError("PrecisionFactors: non-finite entry");
  for (Index i = 0; i < p; ++i) {
    if (!(s[i] > 0.0)) throw ValidationError("PrecisionFactors: s must be positive");
    if (a(i, i) != 1.0 || r(i, i) != 1.0) throw ValidationError("PrecisionFactors: A and R need unit diagonal");
    for (Index j = i + 1; j < p; ++j) {
      if (a(i, j) != a(j, i) || r(i, j) != r(j, i)) throw ValidationError("PrecisionFactors: asymmetric factor");
      if (a(i, j) != 0.0 && a(i, j) != 1.0) throw ValidationError("PrecisionFactors: A must be binary");
      if (r(i, j) < -1.0 || r(i, j) > 1.0) throw ValidationError("PrecisionFactors: R entry outside [-1, 1]");
    }
  }
  if (!cholesky_log_det(hadamard(a, r))) throw PreconditionError("PrecisionFactors: A .* R is not positive definite");
  return PrecisionFactors{std::move(s), std::move(a), std::move(r)};
}

Precision assemble_precision(const PrecisionFactors& f) {
  const Matrix c = hadamard(f.a, f.r);
  const auto log_det_c = cholesky_log_det(c);
  if (!log_det_c) throw PreconditionError("assemble_precision: A .* R is not positive definite");
  Precision out;
  out.omega = f.s.asDiagonal() * c * f.s.asDiagonal();
  out.log_det = 2.0 * f.s.array().log().sum() + *log_det_c;
  return out;
}

Matrix partial_correlations(const Matrix& omega) {
  require_square_finite(omega, "partial_correlations");
  if (!cholesky_log_det(omega)) throw PreconditionError("partial_correlations: matrix is not positive definite");
  const Vector inv_sd = omega.diagonal().cwiseSqrt().cwiseInverse();
  Matrix rho = -(inv_sd.asDiagonal() * omega * inv_sd.asDiagonal());
  rho.diagonal().setOnes();
  return rho;
}

double mvn_logpdf(const Vector& y, const Vector& mu, const Matrix& omega, double log_det) {
  const Index p = y.size();
  if (mu.size() != p || omega.rows() != p || omega.cols() != p) {
    throw ValidationError("mvn_logpdf: dimension mismatch");
  }
  const Vector d = y - mu;
  const double quad = d.dot(omega * d);
  return -0.5 * static_cast<double>(p) * std::log(2.0 * std::numbers::pi) + 0.5 * log_det - 0.5 * quad;
}

}  // namespace bggm
