#include "doctest.h"

#include <cmath>

#include "bvarnu/errors.hpp"
#include "bvarnu/varcore.hpp"

using namespace bvarnu;

namespace {

Eigen::MatrixXd random_matrix(int r, int c, RngStream& rng) {
  Eigen::MatrixXd out(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out(i, j) = rng.normal();
  return out;
}

}  // namespace

TEST_CASE("one-lag design") {
  Eigen::MatrixXd y(4, 1);
  y << 1, 2, 3, 4;
  const LagDesign d = build_lag_design(VarDataset(y), 1, false);
  CHECK(d.t_eff() == 3);
  CHECK(d.k() == 1);
  CHECK(d.Y(0, 0) == 2);
  CHECK(d.Y(2, 0) == 4);
  CHECK(d.X(0, 0) == 1);
  CHECK(d.X(2, 0) == 3);
}

TEST_CASE("two-lag design orders lag one first") {
  Eigen::MatrixXd y(4, 2);
  y << 1, 10, 2, 20, 3, 30, 4, 40;
  const LagDesign d = build_lag_design(VarDataset(y), 2, false);
  REQUIRE(d.t_eff() == 2);
  REQUIRE(d.k() == 4);
  // first row predicts y_3 from (y_2', y_1')
  CHECK(d.Y(0, 0) == 3);
  CHECK(d.Y(0, 1) == 30);
  CHECK(d.X(0, 0) == 2);
  CHECK(d.X(0, 1) == 20);
  CHECK(d.X(0, 2) == 1);
  CHECK(d.X(0, 3) == 10);
  CHECK_THROWS_AS(build_lag_design(VarDataset(y.topRows(3)), 2, false), DomainError);
}

TEST_CASE("intercept adds a leading column of ones") {
  RngStream rng(5);
  const Eigen::MatrixXd y = random_matrix(10, 3, rng);
  const LagDesign d = build_lag_design(VarDataset(y), 2, true);
  CHECK(d.k() == 3 * 2 + 1);
  CHECK(d.X.col(0).isOnes());
  CHECK(d.X(0, 1) == y(1, 0));
  CHECK(regressor_count(3, 2, true) == 7);
}

TEST_CASE("vectorize is column-major and round trips") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 3, 2, 4;
  const Eigen::VectorXd v = vectorize(a);
  CHECK(v(0) == 1);
  CHECK(v(1) == 2);
  CHECK(v(2) == 3);
  CHECK(v(3) == 4);
  CHECK(devectorize(v, 2, 2) == a);
  CHECK_THROWS_AS(devectorize(v, 3, 2), DomainError);
}

TEST_CASE("vec(XA) = (I kron X) vec(A)") {
  RngStream rng(6);
  const Eigen::MatrixXd X = random_matrix(3, 2, rng);
  const Eigen::MatrixXd A = random_matrix(2, 2, rng);
  Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(6, 4);
  for (int b = 0; b < 2; ++b) kron.block(3 * b, 2 * b, 3, 2) = X;
  CHECK((vectorize(X * A) - kron * vectorize(A)).norm() < 1e-14);
}

TEST_CASE("residuals") {
  RngStream rng(7);
  const Eigen::MatrixXd y = random_matrix(12, 2, rng);
  const LagDesign d = build_lag_design(VarDataset(y), 1, false);
  CHECK(residuals(d, Eigen::MatrixXd::Zero(2, 2)) == d.Y);
  const Eigen::MatrixXd A = random_matrix(2, 2, rng);
  const Eigen::MatrixXd e = residuals(d, A);
  double naive = 0.0;
  for (int t = 0; t < d.t_eff(); ++t) {
    for (int j = 0; j < 2; ++j) {
      double fitted = 0.0;
      for (int i = 0; i < 2; ++i) fitted += d.X(t, i) * A(i, j);
      naive += (d.Y(t, j) - fitted) * (d.Y(t, j) - fitted);
    }
  }
  CHECK(std::fabs(e.squaredNorm() - naive) < 1e-12);

  // data generated exactly by A leave no residual
  Eigen::MatrixXd exact(6, 2);
  exact.row(0) << 1.0, -1.0;
  for (int t = 1; t < 6; ++t) exact.row(t) = exact.row(t - 1) * A;
  const LagDesign de = build_lag_design(VarDataset(exact), 1, false);
  CHECK(residuals(de, A).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(residuals(d, Eigen::MatrixXd::Zero(3, 2)), DomainError);
}

TEST_CASE("stack_coefficients and lag_row reproduce the VAR map") {
  Eigen::MatrixXd a1(2, 2), a2(2, 2);
  a1 << 0.5, 0.1, -0.2, 0.3;
  a2 << 0.05, 0.0, 0.0, -0.1;
  const Eigen::Vector2d c(1.0, 2.0);
  const Eigen::MatrixXd A = stack_coefficients({a1, a2}, true, c);
  const Eigen::Vector2d y1(0.3, -0.7), y2(1.1, 0.4);
  const Eigen::RowVectorXd x = lag_row({y1, y2}, true);
  const Eigen::VectorXd via_design = (x * A).transpose();
  const Eigen::VectorXd direct = c + a1 * y1 + a2 * y2;
  CHECK((via_design - direct).norm() < 1e-15);
}

TEST_CASE("companion spectral radius") {
  CHECK(companion_spectral_radius({0.5 * Eigen::MatrixXd::Identity(3, 3)}) ==
        doctest::Approx(0.5));
  // AR(2) with roots 0.9 and 0.5: y = 1.4 y1 - 0.45 y2
  Eigen::MatrixXd a1(1, 1), a2(1, 1);
  a1 << 1.4;
  a2 << -0.45;
  CHECK(companion_spectral_radius({a1, a2}) == doctest::Approx(0.9));
}

TEST_CASE("simulate_var stationary AR(1) variance") {
  RngStream rng(8);
  SimulationSpec spec;
  spec.m = 3;
  spec.T = 20000;
  spec.lags = {0.5 * Eigen::MatrixXd::Identity(3, 3)};
  spec.sigma = SpdMatrix::identity(3);
  const SimulatedVar sim = simulate_var(spec, rng);
  CHECK(sim.data.T() == 20000);
  CHECK(sim.data.m() == 3);
  const Eigen::MatrixXd y = sim.data.observations;
  const Eigen::RowVectorXd mean = y.colwise().mean();
  const Eigen::MatrixXd centered = y.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / (y.rows() - 1.0);
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(cov(i, i) - 1.0 / 0.75) < 0.06);
  CHECK(sim.truth.A.isApprox(0.5 * Eigen::MatrixXd::Identity(3, 3)));
}

TEST_CASE("simulate_var white noise has no lag-one correlation") {
  RngStream rng(9);
  SimulationSpec spec;
  spec.m = 2;
  spec.T = 400;
  spec.lags = {Eigen::MatrixXd::Zero(2, 2)};
  spec.sigma = SpdMatrix::identity(2);
  const Eigen::MatrixXd y = simulate_var(spec, rng).data.observations;
  for (int j = 0; j < 2; ++j) {
    const Eigen::VectorXd col = y.col(j).array() - y.col(j).mean();
    const double r1 = col.head(399).dot(col.tail(399)) / col.squaredNorm();
    CHECK(std::fabs(r1) < 4.0 / std::sqrt(400.0));
  }
}

TEST_CASE("simulate_var inverse-Wishart source is reproducible") {
  SimulationSpec spec;
  spec.m = 5;
  spec.T = 30;
  spec.lags = {0.5 * Eigen::MatrixXd::Identity(5, 5)};
  spec.sigma = InverseWishartSource{15};
  RngStream a(10), b(10);
  const SimulatedVar s1 = simulate_var(spec, a);
  const SimulatedVar s2 = simulate_var(spec, b);
  CHECK(s1.data.observations == s2.data.observations);
  CHECK(s1.truth.Sigma.matrix() == s2.truth.Sigma.matrix());
  CHECK(SpdMatrix::is_spd(s1.truth.Sigma.matrix()));
}

TEST_CASE("inverse-Wishart generator scale") {
  CHECK(inverse_wishart_scale(5, 15, InverseWishartScale::kPriorMatched).matrix().isIdentity());
  CHECK(inverse_wishart_scale(5, 15, InverseWishartScale::kUnitMean).matrix().isApprox(
      9.0 * Eigen::MatrixXd::Identity(5, 5)));
  CHECK(inverse_wishart_scale(5, 5, InverseWishartScale::kUnitMean).matrix().isIdentity());

  // E[Sigma] = Psi / (nu - m - 1) under the unit-mean policy
  RngStream rng(11);
  SimulationSpec spec;
  spec.m = 3;
  spec.T = 3;
  spec.warmup = 0;
  spec.lags = {Eigen::MatrixXd::Zero(3, 3)};
  spec.sigma = InverseWishartSource{12, InverseWishartScale::kUnitMean};
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(3, 3);
  const int n = 40000;
  for (int i = 0; i < n; ++i) sum += simulate_var(spec, rng).truth.Sigma.matrix();
  CHECK((sum / n - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("simulate_var rejects explosive dynamics") {
  RngStream rng(12);
  SimulationSpec spec;
  spec.m = 2;
  spec.T = 30;
  spec.lags = {1.1 * Eigen::MatrixXd::Identity(2, 2)};
  spec.sigma = SpdMatrix::identity(2);
  CHECK_THROWS_AS(simulate_var(spec, rng), ConfigError);
}

TEST_CASE("dataset validation and slicing") {
  Eigen::MatrixXd y(5, 2);
  y << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
  VarDataset d(y, {"a", "b"});
  d.row_labels = {"t1", "t2", "t3", "t4", "t5"};
  const VarDataset s = d.slice(1, 3);
  CHECK(s.T() == 3);
  CHECK(s.observations(0, 0) == 3);
  CHECK(s.row_labels.front() == "t2");
  CHECK(s.variable_names == d.variable_names);
  CHECK_THROWS_AS(d.slice(4, 3), DomainError);
  y(2, 1) = std::nan("");
  CHECK_THROWS_AS(VarDataset(y).validate(), DomainError);
}
