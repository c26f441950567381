#pragma once

// Log-gamma and digamma, scalar and multivariate. Everything here is
// computed natively so that results do not depend on the platform libm.

namespace bvarnu::special {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kLogPi = 1.14472988584940017414;
inline constexpr double kLog2 = 0.69314718055994530942;

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// psi(x) = Gamma'(x) / Gamma(x) for x > 0.
double digamma(double x);

/// ln Gamma_m(x) = m(m-1)/4 ln(pi) + sum_{j=1..m} ln Gamma(x + (1-j)/2).
/// Requires m >= 1 and x > (m-1)/2.
double multivariate_log_gamma(int m, double x);

/// psi_m(x) = sum_{i=1..m} psi(x + (1-i)/2). Same domain as above.
double multivariate_digamma(int m, double x);

}  // namespace bvarnu::special
