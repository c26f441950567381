#include "doctest.h"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "bvarnu/errors.hpp"
#include "bvarnu/special.hpp"

using namespace bvarnu::special;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

double oracle_lgamma(double x) { return static_cast<double>(boost::math::lgamma(Big(x))); }
double oracle_digamma(double x) { return static_cast<double>(boost::math::digamma(Big(x))); }

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(1.0, std::fabs(want));
}

}  // namespace

TEST_CASE("log_gamma reference values") {
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(log_gamma(2.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::fabs(log_gamma(0.5) - 0.5723649429247001) < 1e-13);
  CHECK(std::fabs(log_gamma(5.0) - std::log(24.0)) < 1e-13);
}

TEST_CASE("log_gamma against a 50-digit oracle") {
  double worst = 0.0;
  for (double x = 1e-3; x < 600.0; x *= 1.013) worst = std::max(worst, rel_err(log_gamma(x), oracle_lgamma(x)));
  for (int n = 1; n <= 400; ++n) {
    const double x = 0.5 * n;
    worst = std::max(worst, rel_err(log_gamma(x), oracle_lgamma(x)));
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("log_gamma near its zeros at 1 and 2") {
  for (double x : {0.999, 0.9999999, 1.0000001, 1.001, 1.999, 2.0000001, 2.001}) {
    const double want = oracle_lgamma(x);
    CHECK(std::fabs(log_gamma(x) - want) < 1e-15 + 1e-12 * std::fabs(want));
  }
}

TEST_CASE("digamma reference values") {
  CHECK(std::fabs(digamma(1.0) + kEulerGamma) < 1e-14);
  CHECK(std::fabs(digamma(0.5) - (-kEulerGamma - 2.0 * kLog2)) < 1e-14);
  double want = -kEulerGamma;
  for (int k = 1; k < 10; ++k) want += 1.0 / k;
  CHECK(std::fabs(digamma(10.0) - want) < 1e-14);
  CHECK(std::fabs(digamma(10.0) - 2.2517525890667211) < 1e-13);
}

TEST_CASE("digamma against a 50-digit oracle") {
  double worst = 0.0;
  for (double x = 1e-3; x < 600.0; x *= 1.013) {
    const double want = oracle_digamma(x);
    worst = std::max(worst, std::fabs(digamma(x) - want) / std::max(1.0, std::fabs(want)));
  }
  CHECK(worst < 1e-13);
  // positive root of psi
  const double root = 1.4616321449683623;
  CHECK(std::fabs(digamma(root)) < 1e-14);
}

TEST_CASE("recurrences") {
  for (double x : {0.3, 1.7, 4.2, 9.9, 10.1, 33.3}) {
    CHECK(std::fabs(log_gamma(x + 1.0) - log_gamma(x) - std::log(x)) < 1e-12);
    CHECK(std::fabs(digamma(x + 1.0) - digamma(x) - 1.0 / x) < 1e-13);
  }
}

TEST_CASE("multivariate log gamma") {
  CHECK(multivariate_log_gamma(1, 1.0) == doctest::Approx(0.0));
  CHECK(std::fabs(multivariate_log_gamma(2, 2.0) - 0.45158270528945486) < 1e-13);
  CHECK(std::fabs(multivariate_log_gamma(2, 1.5) - 0.45158270528945486) < 1e-13);
  for (int m = 1; m <= 12; ++m) {
    for (double x : {0.5 * m, 0.5 * m + 0.25, 7.0, 40.5}) {
      if (x <= 0.5 * (m - 1)) continue;
      double want = 0.25 * m * (m - 1) * kLogPi;
      for (int j = 1; j <= m; ++j) want += oracle_lgamma(x + 0.5 * (1 - j));
      CHECK(std::fabs(multivariate_log_gamma(m, x) - want) < 1e-12 * std::max(1.0, std::fabs(want)));
    }
  }
}

TEST_CASE("multivariate digamma") {
  CHECK(std::fabs(multivariate_digamma(1, 1.0) + kEulerGamma) < 1e-14);
  // psi(1.5) + psi(1) = 2 - 2 gamma - 2 ln 2
  CHECK(std::fabs(multivariate_digamma(2, 1.5) - (2.0 - 2.0 * kEulerGamma - 2.0 * kLog2)) < 1e-13);
  CHECK(std::fabs(multivariate_digamma(2, 1.5) - (-0.54072569092295634)) < 1e-13);
  // psi(2) + psi(1.5) + psi(1)
  CHECK(std::fabs(multivariate_digamma(3, 2.0) - (-0.11794135582448920)) < 1e-13);
}

TEST_CASE("domain errors") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  for (double x : {0.0, -1.0, -0.5, nan, inf}) {
    CHECK_THROWS_AS(log_gamma(x), bvarnu::DomainError);
    CHECK_THROWS_AS(digamma(x), bvarnu::DomainError);
  }
  CHECK_THROWS_AS(multivariate_log_gamma(3, 1.0), bvarnu::DomainError);
  CHECK_THROWS_AS(multivariate_digamma(2, 0.5), bvarnu::DomainError);
  CHECK_THROWS_AS(multivariate_log_gamma(0, 3.0), bvarnu::DomainError);
  CHECK_NOTHROW(multivariate_log_gamma(3, 1.01));
}
