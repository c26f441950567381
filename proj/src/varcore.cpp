#include "bvarnu/varcore.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "bvarnu/errors.hpp"

namespace bvarnu {

VarDataset::VarDataset(Eigen::MatrixXd obs, std::vector<std::string> names, std::string freq)
    : observations(std::move(obs)), variable_names(std::move(names)), frequency(std::move(freq)) {
  if (variable_names.empty()) {
    for (int j = 0; j < m(); ++j) variable_names.push_back("y" + std::to_string(j + 1));
  }
  validate();
}

void VarDataset::validate() const {
  if (!observations.allFinite()) throw DomainError("VarDataset: non-finite observations");
  if (static_cast<int>(variable_names.size()) != m()) {
    throw DomainError("VarDataset: expected " + std::to_string(m()) + " variable names, got " +
                      std::to_string(variable_names.size()));
  }
  if (!row_labels.empty() && static_cast<int>(row_labels.size()) != T()) {
    throw DomainError("VarDataset: row label count does not match T");
  }
}

VarDataset VarDataset::slice(int first, int count) const {
  if (first < 0 || count < 0 || first + count > T()) {
    throw DomainError("VarDataset::slice: range out of bounds");
  }
  VarDataset out;
  out.observations = observations.middleRows(first, count);
  out.variable_names = variable_names;
  out.frequency = frequency;
  if (!row_labels.empty()) {
    out.row_labels.assign(row_labels.begin() + first, row_labels.begin() + first + count);
  }
  return out;
}

LagDesign build_lag_design(const VarDataset& data, int p, bool intercept) {
  if (p < 1) throw DomainError("build_lag_design: lag order must be >= 1");
  const int T = data.T();
  const int m = data.m();
  if (T < p + 2) {
    throw DomainError("build_lag_design: need T >= p + 2 observations (T=" + std::to_string(T) +
                      ", p=" + std::to_string(p) + ")");
  }
  const int rows = T - p;
  const int offset = intercept ? 1 : 0;
  LagDesign design;
  design.p = p;
  design.intercept = intercept;
  design.Y = data.observations.bottomRows(rows);
  design.X.resize(rows, regressor_count(m, p, intercept));
  if (intercept) design.X.col(0).setOnes();
  for (int j = 1; j <= p; ++j) {
    design.X.middleCols(offset + (j - 1) * m, m) = data.observations.middleRows(p - j, rows);
  }
  return design;
}

Eigen::RowVectorXd lag_row(const std::vector<Eigen::VectorXd>& recent, bool intercept) {
  if (recent.empty()) throw DomainError("lag_row: need at least one lag");
  const int m = static_cast<int>(recent.front().size());
  const int p = static_cast<int>(recent.size());
  const int offset = intercept ? 1 : 0;
  Eigen::RowVectorXd row(regressor_count(m, p, intercept));
  if (intercept) row(0) = 1.0;
  for (int j = 0; j < p; ++j) {
    if (recent[j].size() != m) throw DomainError("lag_row: lag vectors differ in length");
    row.segment(offset + j * m, m) = recent[j].transpose();
  }
  return row;
}

Eigen::VectorXd vectorize(const Eigen::MatrixXd& a) {
  return Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
}

Eigen::MatrixXd devectorize(const Eigen::VectorXd& alpha, int rows, int cols) {
  if (alpha.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw DomainError("devectorize: length does not match rows * cols");
  }
  return Eigen::Map<const Eigen::MatrixXd>(alpha.data(), rows, cols);
}

Eigen::MatrixXd residuals(const LagDesign& design, const Eigen::MatrixXd& A) {
  if (A.rows() != design.k() || A.cols() != design.m()) {
    throw DomainError("residuals: coefficient matrix is " + std::to_string(A.rows()) + "x" +
                      std::to_string(A.cols()) + ", design needs " + std::to_string(design.k()) +
                      "x" + std::to_string(design.m()));
  }
  return design.Y - design.X * A;
}

Eigen::MatrixXd residuals(const LagDesign& design, const VarParameters& params) {
  return residuals(design, params.A);
}

Eigen::MatrixXd stack_coefficients(const std::vector<Eigen::MatrixXd>& lags, bool intercept,
                                   const Eigen::VectorXd& constant) {
  if (lags.empty()) throw DomainError("stack_coefficients: need at least one lag matrix");
  const int m = static_cast<int>(lags.front().rows());
  const int p = static_cast<int>(lags.size());
  const int offset = intercept ? 1 : 0;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(regressor_count(m, p, intercept), m);
  if (intercept && constant.size() > 0) {
    if (constant.size() != m) throw DomainError("stack_coefficients: constant has wrong length");
    A.row(0) = constant.transpose();
  }
  for (int j = 0; j < p; ++j) {
    if (lags[j].rows() != m || lags[j].cols() != m) {
      throw DomainError("stack_coefficients: lag matrices must all be m x m");
    }
    A.middleRows(offset + j * m, m) = lags[j].transpose();
  }
  return A;
}

double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& lags) {
  if (lags.empty()) return 0.0;
  const int m = static_cast<int>(lags.front().rows());
  const int p = static_cast<int>(lags.size());
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m * p, m * p);
  for (int j = 0; j < p; ++j) companion.block(0, j * m, m, m) = lags[j];
  if (p > 1) companion.bottomLeftCorner(m * (p - 1), m * (p - 1)).setIdentity();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

SpdMatrix inverse_wishart_scale(int m, int nu_true, InverseWishartScale policy) {
  if (policy == InverseWishartScale::kUnitMean && nu_true > m + 1) {
    return SpdMatrix::scaled_identity(m, static_cast<double>(nu_true - m - 1));
  }
  return SpdMatrix::identity(m);
}

SimulatedVar simulate_var(const SimulationSpec& spec, RngStream& rng) {
  const int m = spec.m;
  if (m < 1 || spec.T < 1) throw ConfigError("simulate_var: m and T must be positive");
  if (spec.lags.empty()) throw ConfigError("simulate_var: need at least one lag matrix");
  for (const auto& lag : spec.lags) {
    if (lag.rows() != m || lag.cols() != m) {
      throw ConfigError("simulate_var: coefficient matrices must be m x m");
    }
  }
  const double radius = companion_spectral_radius(spec.lags);
  if (!(radius < 1.0)) {
    throw ConfigError("simulate_var: explosive configuration, companion spectral radius " +
                      std::to_string(radius) + " >= 1");
  }
  if (spec.warmup < 0) throw ConfigError("simulate_var: warm-up must be non-negative");

  const SpdMatrix sigma = std::visit(
      [&](const auto& source) -> SpdMatrix {
        using Source = std::decay_t<decltype(source)>;
        if constexpr (std::is_same_v<Source, SpdMatrix>) {
          if (source.dim() != m) throw ConfigError("simulate_var: Sigma has wrong dimension");
          return source;
        } else {
          if (source.nu_true < m) {
            throw ConfigError("simulate_var: nu_true must be >= m");
          }
          const SpdMatrix psi = inverse_wishart_scale(m, source.nu_true, source.scale);
          return sample_wishart(source.nu_true, psi.inverse(), rng).inverse();
        }
      },
      spec.sigma);

  const int p = static_cast<int>(spec.lags.size());
  const int total = spec.warmup + spec.T;
  Eigen::MatrixXd path = Eigen::MatrixXd::Zero(total + p, m);  // p zero rows of history
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(m);
  for (int t = p; t < total + p; ++t) {
    Eigen::VectorXd y = sample_mvn(zero, sigma, rng);
    for (int j = 1; j <= p; ++j) y += spec.lags[j - 1] * path.row(t - j).transpose();
    path.row(t) = y.transpose();
  }
  SimulatedVar out{VarDataset(path.bottomRows(spec.T)),
                   VarParameters{stack_coefficients(spec.lags, false), sigma}, p};
  return out;
}

}  // namespace bvarnu
