#pragma once

#include <Eigen/Dense>

#include "bvarnu/rng.hpp"

namespace bvarnu {

/// Symmetric positive-definite matrix with its lower Cholesky factor.
///
/// Construction validates symmetry (relative tolerance 1e-10), stores the
/// symmetrized value, and factorizes; a failed factorization throws
/// NotPositiveDefinite. Instances are immutable.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Eigen::MatrixXd& value);

  static SpdMatrix identity(int dim);
  static SpdMatrix scaled_identity(int dim, double scale);

  int dim() const { return static_cast<int>(value_.rows()); }
  const Eigen::MatrixXd& matrix() const { return value_; }
  const Eigen::MatrixXd& chol_lower() const { return lower_; }
  double operator()(int i, int j) const { return value_(i, j); }

  double log_det() const;
  SpdMatrix inverse() const;

  /// Returns true when `value` would construct successfully.
  static bool is_spd(const Eigen::MatrixXd& value);

 private:
  Eigen::MatrixXd value_;
  Eigen::MatrixXd lower_;
};

/// mean + L z, with L = chol(cov). Deterministic given z.
Eigen::VectorXd mvn_from_standard(const Eigen::VectorXd& mean, const SpdMatrix& cov,
                                  const Eigen::VectorXd& z);

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const SpdMatrix& cov, RngStream& rng);

/// Wishart(nu, scale) draw by Bartlett decomposition: X = L A A' L', with
/// L = chol(scale), A lower triangular, A_ii^2 ~ chi2(nu - i), A_ij ~ N(0,1)
/// below the diagonal. Requires integer nu >= dim.
SpdMatrix sample_wishart(int nu, const SpdMatrix& scale, RngStream& rng);

/// Log density of Wishart(nu, scale) at x:
///   (nu-m-1)/2 ln|X| - tr(V^{-1} X)/2 - nu m/2 ln 2 - nu/2 ln|V| - ln Gamma_m(nu/2).
double wishart_log_density(const SpdMatrix& x, int nu, const SpdMatrix& scale);

}  // namespace bvarnu
