#include "bvarnu/randmat.hpp"

#include <cmath>
#include <string>

#include "bvarnu/errors.hpp"
#include "bvarnu/special.hpp"

namespace bvarnu {
namespace {

constexpr double kSymmetryTolerance = 1e-10;

bool symmetric_enough(const Eigen::MatrixXd& value) {
  const double scale = std::max(1.0, value.cwiseAbs().maxCoeff());
  return ((value - value.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTolerance * scale);
}

}  // namespace

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& value) {
  if (value.rows() == 0 || value.rows() != value.cols()) {
    throw DomainError("SpdMatrix: matrix must be square and non-empty");
  }
  if (!value.allFinite()) throw DomainError("SpdMatrix: non-finite entries");
  if (!symmetric_enough(value)) throw NotPositiveDefinite("SpdMatrix: matrix is not symmetric");
  value_ = 0.5 * (value + value.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(value_);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("SpdMatrix: Cholesky factorization failed (dim " +
                              std::to_string(value.rows()) + ")");
  }
  lower_ = llt.matrixL();
  if ((lower_.diagonal().array() <= 0.0).any() || !lower_.allFinite()) {
    throw NotPositiveDefinite("SpdMatrix: Cholesky factor has a non-positive pivot");
  }
}

SpdMatrix SpdMatrix::identity(int dim) {
  return SpdMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SpdMatrix SpdMatrix::scaled_identity(int dim, double scale) {
  return SpdMatrix(scale * Eigen::MatrixXd::Identity(dim, dim));
}

double SpdMatrix::log_det() const {
  return 2.0 * lower_.diagonal().array().log().sum();
}

SpdMatrix SpdMatrix::inverse() const {
  const Eigen::MatrixXd linv =
      lower_.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(dim(), dim()));
  return SpdMatrix(linv.transpose() * linv);
}

bool SpdMatrix::is_spd(const Eigen::MatrixXd& value) {
  try {
    SpdMatrix check(value);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

Eigen::VectorXd mvn_from_standard(const Eigen::VectorXd& mean, const SpdMatrix& cov,
                                  const Eigen::VectorXd& z) {
  if (mean.size() != cov.dim() || z.size() != cov.dim()) {
    throw DomainError("sample_mvn: mean, covariance and z dimensions differ");
  }
  return mean + cov.chol_lower().triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const SpdMatrix& cov, RngStream& rng) {
  Eigen::VectorXd z(cov.dim());
  for (int i = 0; i < cov.dim(); ++i) z(i) = rng.normal();
  return mvn_from_standard(mean, cov, z);
}

SpdMatrix sample_wishart(int nu, const SpdMatrix& scale, RngStream& rng) {
  const int m = scale.dim();
  if (nu < m) {
    throw DomainError("sample_wishart: degrees of freedom " + std::to_string(nu) +
                      " below dimension " + std::to_string(m));
  }
  Eigen::MatrixXd bartlett = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    bartlett(i, i) = std::sqrt(rng.chi_square(static_cast<double>(nu - i)));
    for (int j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
  }
  const Eigen::MatrixXd factor = scale.chol_lower().triangularView<Eigen::Lower>() * bartlett;
  const Eigen::MatrixXd draw = factor * factor.transpose();
  return SpdMatrix(0.5 * (draw + draw.transpose()));
}

double wishart_log_density(const SpdMatrix& x, int nu, const SpdMatrix& scale) {
  const int m = x.dim();
  if (scale.dim() != m) throw DomainError("wishart_log_density: dimension mismatch");
  if (nu < m) throw DomainError("wishart_log_density: nu must be >= dimension");
  // tr(V^{-1} X) = ||L_V^{-1} L_X||_F^2
  const Eigen::MatrixXd half =
      scale.chol_lower().triangularView<Eigen::Lower>().solve(x.chol_lower());
  const double trace = half.squaredNorm();
  return 0.5 * (nu - m - 1) * x.log_det() - 0.5 * trace - 0.5 * nu * m * special::kLog2 -
         0.5 * nu * scale.log_det() - special::multivariate_log_gamma(m, 0.5 * nu);
}

}  // namespace bvarnu
