#include "bvarnu/special.hpp"

#include <array>
#include <cmath>
#include <string>

#include "bvarnu/errors.hpp"

namespace bvarnu::special {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

// Bernoulli numbers B_2, B_4, ..., B_16.
constexpr std::array<double, 8> kBernoulli = {
    1.0 / 6.0,    -1.0 / 30.0,   1.0 / 42.0,       -1.0 / 30.0,
    5.0 / 66.0,   -691.0 / 2730.0, 7.0 / 6.0,      -3617.0 / 510.0};

constexpr int kZetaTerms = 48;

// zeta(k) - 1 for k = 2..kZetaTerms+1, by direct summation to N plus an
// Euler-Maclaurin tail.
std::array<double, kZetaTerms> build_zeta_minus_one() {
  std::array<double, kZetaTerms> out{};
  constexpr int kN = 12;
  const double n = kN;
  for (int idx = 0; idx < kZetaTerms; ++idx) {
    const double k = idx + 2;
    double sum = 0.0;
    for (int j = kN - 1; j >= 2; --j) sum += std::pow(static_cast<double>(j), -k);
    double tail = std::pow(n, 1.0 - k) / (k - 1.0) + 0.5 * std::pow(n, -k);
    // B_{2j}/(2j)! * k(k+1)...(k+2j-2) * N^{-k-2j+1}
    double rising = k;
    double factorial = 2.0;
    for (int j = 1; j <= 6; ++j) {
      tail += kBernoulli[j - 1] / factorial * rising * std::pow(n, -k - 2.0 * j + 1.0);
      rising *= (k + 2.0 * j - 1.0) * (k + 2.0 * j);
      factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    }
    out[idx] = sum + tail;
  }
  return out;
}

const std::array<double, kZetaTerms>& zeta_minus_one() {
  static const std::array<double, kZetaTerms> table = build_zeta_minus_one();
  return table;
}

// ln Gamma(2 + z) for |z| <= 1/2, from the Taylor series
//   ln Gamma(2+z) = (1-gamma) z + sum_{k>=2} (-1)^k (zeta(k)-1)/k z^k,
// which has no cancellation at the zero z = 0.
double log_gamma_two_plus(double z) {
  const auto& zeta = zeta_minus_one();
  double sum = 0.0;
  double power = z * z;
  for (int idx = 0; idx < kZetaTerms; ++idx) {
    const int k = idx + 2;
    const double term = zeta[idx] / k * power;
    sum += (k % 2 == 0) ? term : -term;
    power *= z;
    if (std::fabs(power) < 1e-300) break;
  }
  return (1.0 - kEulerGamma) * z + sum;
}

double log_gamma_stirling(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv;
  for (int k = 1; k <= 8; ++k) {
    series += kBernoulli[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * power;
    power *= inv2;
  }
  return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + series;
}

void require_positive(double x, const char* what) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError(std::string(what) + ": argument must be finite and positive, got " +
                      std::to_string(x));
  }
}

void require_multivariate_domain(int m, double x, const char* what) {
  if (m < 1) throw DomainError(std::string(what) + ": dimension must be >= 1");
  if (!std::isfinite(x) || x <= 0.5 * (m - 1)) {
    throw DomainError(std::string(what) + ": need x > (m-1)/2, got m=" + std::to_string(m) +
                      " x=" + std::to_string(x));
  }
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
  if (x < 1.5) {
    const double z = x - 1.0;
    return log_gamma_two_plus(z) - std::log1p(z);
  }
  if (x < 2.5) return log_gamma_two_plus(x - 2.0);
  if (x >= 10.0) return log_gamma_stirling(x);
  double shifted = x;
  double log_product = 0.0;
  while (shifted < 10.0) {
    log_product += std::log(shifted);
    shifted += 1.0;
  }
  return log_gamma_stirling(shifted) - log_product;
}

double digamma(double x) {
  require_positive(x, "digamma");
  double shift = 0.0;
  while (x < 10.0) {
    shift += 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  double series = 0.0;
  double power = inv2;
  for (int k = 1; k <= 8; ++k) {
    series += kBernoulli[k - 1] / (2.0 * k) * power;
    power *= inv2;
  }
  return std::log(x) - 0.5 / x - series - shift;
}

double multivariate_log_gamma(int m, double x) {
  require_multivariate_domain(m, x, "multivariate_log_gamma");
  double out = 0.25 * m * (m - 1) * kLogPi;
  for (int j = 1; j <= m; ++j) out += log_gamma(x + 0.5 * (1 - j));
  return out;
}

double multivariate_digamma(int m, double x) {
  require_multivariate_domain(m, x, "multivariate_digamma");
  double out = 0.0;
  for (int i = 1; i <= m; ++i) out += digamma(x + 0.5 * (1 - i));
  return out;
}

}  // namespace bvarnu::special
