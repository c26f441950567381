#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bvarnu/randmat.hpp"
#include "bvarnu/rng.hpp"

namespace bvarnu {

/// T x m observations, one row per time point.
struct VarDataset {
  Eigen::MatrixXd observations;
  std::vector<std::string> variable_names;
  std::string frequency;
  std::vector<std::string> row_labels;  // optional, e.g. dates; empty or T entries

  VarDataset() = default;
  VarDataset(Eigen::MatrixXd obs, std::vector<std::string> names = {},
             std::string freq = {});

  int T() const { return static_cast<int>(observations.rows()); }
  int m() const { return static_cast<int>(observations.cols()); }

  /// Rows [first, first + count) with names and labels carried over.
  VarDataset slice(int first, int count) const;

  /// Throws DomainError on non-finite entries or mismatched name/label counts.
  void validate() const;
};

/// Stacked regression form Y = X A + E of a VAR(p).
struct LagDesign {
  int p = 0;
  bool intercept = false;
  Eigen::MatrixXd Y;  // (T-p) x m
  Eigen::MatrixXd X;  // (T-p) x k, row t = (1?, y'_{t-1}, ..., y'_{t-p})

  int m() const { return static_cast<int>(Y.cols()); }
  int k() const { return static_cast<int>(X.cols()); }
  int t_eff() const { return static_cast<int>(Y.rows()); }
};

inline int regressor_count(int m, int p, bool intercept) { return m * p + (intercept ? 1 : 0); }

/// A is k x m; block j (rows offset+j*m .. offset+(j+1)*m) holds A_{j+1}'.
struct VarParameters {
  Eigen::MatrixXd A;
  SpdMatrix Sigma;
};

LagDesign build_lag_design(const VarDataset& data, int p, bool intercept = false);

/// Regressor row for forecasting from the `p` most recent observations,
/// ordered most recent first.
Eigen::RowVectorXd lag_row(const std::vector<Eigen::VectorXd>& recent, bool intercept);

/// Column-stacking vec: entry (i, j) goes to position j * rows + i.
Eigen::VectorXd vectorize(const Eigen::MatrixXd& a);
Eigen::MatrixXd devectorize(const Eigen::VectorXd& alpha, int rows, int cols);

Eigen::MatrixXd residuals(const LagDesign& design, const Eigen::MatrixXd& A);
Eigen::MatrixXd residuals(const LagDesign& design, const VarParameters& params);

/// Pack A_1..A_p (each m x m, y_t = sum_j A_j y_{t-j}) into the k x m form.
Eigen::MatrixXd stack_coefficients(const std::vector<Eigen::MatrixXd>& lags, bool intercept,
                                   const Eigen::VectorXd& constant = {});

/// Companion-matrix spectral radius of the lag polynomial.
double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& lags);

/// Scale of the inverse-Wishart error-covariance generator.
enum class InverseWishartScale {
  /// Sigma^{-1} ~ W(nu_true, I): the precision is drawn from the same
  /// Wishart family (S = I) that the estimated model places on it.
  kPriorMatched,
  /// Sigma ~ IW(nu_true, (nu_true - m - 1) I) so that E[Sigma] = I; falls
  /// back to I when nu_true <= m + 1, where the mean does not exist.
  kUnitMean,
};

struct InverseWishartSource {
  int nu_true;
  InverseWishartScale scale = InverseWishartScale::kPriorMatched;
};

using SigmaSource = std::variant<SpdMatrix, InverseWishartSource>;

struct SimulationSpec {
  int m = 0;
  int T = 0;
  std::vector<Eigen::MatrixXd> lags;  // A_1..A_p
  SigmaSource sigma = InverseWishartSource{0};
  int warmup = 100;
};

struct SimulatedVar {
  VarDataset data;
  VarParameters truth;
  int p = 0;
};

/// Draw Sigma (if requested) then y_t = sum_j A_j y_{t-j} + e_t from zero
/// initial conditions, discarding `warmup` steps and keeping T.
SimulatedVar simulate_var(const SimulationSpec& spec, RngStream& rng);

/// Inverse-Wishart scale matrix used by the generator for a given policy.
SpdMatrix inverse_wishart_scale(int m, int nu_true, InverseWishartScale policy);

}  // namespace bvarnu
