#pragma once

// Loss-based prior on the Wishart degrees of freedom.
//
// The prior mass of nu is exp(D(nu)) - 1, where D(nu) is the Kullback-Leibler
// divergence from W_nu to its nearest neighbour W_{nu+1}. The conditional
// posterior given one precision matrix multiplies this by the Wishart
// likelihood with scale S0^{-1}. All quantities are kept on the log scale.

#include <vector>

#include "json.hpp"

#include "bvarnu/randmat.hpp"

namespace bvarnu::lossprior {

/// KL(W_nu || W_{nu+c}) for two Wisharts sharing the same scale matrix:
///   ln Gamma_m((nu+c)/2) - ln Gamma_m(nu/2) - (c/2) psi_m(nu/2).
/// Requires nu >= m >= 1 and nu + c > m - 1.
double kl_wishart(int m, int nu, int c);

/// D(nu) = ln Gamma((nu+1)/2) - ln Gamma((nu+1-m)/2) - psi_m(nu/2)/2,
/// which equals kl_wishart(m, nu, 1). Strictly positive.
double nearest_divergence(int m, int nu);

/// ln pi(nu) = ln(expm1(D(nu))), unnormalized. Requires nu >= m.
double log_prior_nu(int m, int nu);

/// Read-only cache of ln pi(nu) on [m, nu_max]; lookups outside the cached
/// range are computed on demand. Safe to share between threads.
class PriorWeightTable {
 public:
  PriorWeightTable(int m, int nu_max);

  int m() const { return m_; }
  int nu_max() const { return m_ + static_cast<int>(log_weights_.size()) - 1; }
  double log_weight(int nu) const;

 private:
  int m_;
  std::vector<double> log_weights_;
};

/// Unnormalized ln p(nu | Sigma^{-1}) = ln pi(nu) + ln W(Sigma^{-1} | nu, S0^{-1}).
double log_conditional_posterior_nu(int nu, const SpdMatrix& precision, const SpdMatrix& s0);

/// The same target with the sufficient statistics of (precision, S0)
/// precomputed, for repeated evaluation inside a Metropolis-Hastings chain.
class NuConditional {
 public:
  NuConditional(const SpdMatrix& precision, const SpdMatrix& s0,
                const PriorWeightTable* table = nullptr);

  int m() const { return m_; }
  double log_likelihood(int nu) const;
  double log_prior(int nu) const;
  double log_density(int nu) const { return log_prior(nu) + log_likelihood(nu); }

 private:
  int m_;
  double log_det_precision_;
  double trace_s0_precision_;
  double log_det_s0_;
  const PriorWeightTable* table_;
};

struct IntRange {
  int lo;
  int hi;  // inclusive
  bool empty() const { return hi < lo; }
};

struct Theorem1Cell {
  int m;
  int nu;
  int argmin_c;
  double kl_plus_one;   // nan when c = +1 is not admissible/requested
  double kl_minus_one;  // nan when c = -1 is not admissible/requested
  double margin;        // kl(-1) - kl(+1); nan if either side is missing
};

struct Theorem1Report {
  IntRange m_range;
  IntRange nu_offset_range;
  IntRange c_range;
  std::vector<Theorem1Cell> cells;
  int exceptions = 0;       // cells whose argmin is not c = 1
  double worst_margin = 0;  // min over cells of kl(-1) - kl(+1)
  bool pass = false;
};

/// Brute-force check that argmin over c != 0 of KL(W_nu || W_{nu+c}) is c = 1
/// on the grid m in m_range, nu = m + k with k in nu_offset_range. Values of
/// c outside the density support for a given (m, nu) are skipped.
Theorem1Report verify_theorem1(IntRange m_range, IntRange nu_offset_range, IntRange c_range);

struct ProperDiagnostic {
  int m;
  int nu_max;
  std::vector<int> nu;              // m .. nu_max
  std::vector<double> log_ratio;    // ln R_nu for each entry of nu
  bool ratio_strictly_decreasing = false;
  double log_normalizer = 0;        // ln sum_{nu=m}^{nu_max} p(nu | .)
  double tail_mass = 0;             // mass beyond nu_max, normalized
  std::vector<double> posterior;    // normalized p(nu | .) on m .. nu_max
};

/// Ratio-test sequence of the Wishart likelihood in nu,
///   ln R_nu = ln|P|/2 + ln Gamma((nu+1-m)/2) - m/2 ln 2 + ln|S0|/2 - ln Gamma((nu+1)/2),
/// plus the enumerated posterior and its tail mass beyond nu_max. Requires
/// nu_max > m + 10.
ProperDiagnostic properness_diagnostic(int m, const SpdMatrix& precision, const SpdMatrix& s0,
                                       int nu_max);

/// Normalized conditional posterior of nu on [m, nu_max] by enumeration.
std::vector<double> enumerate_posterior(const NuConditional& target, int nu_max);

nlohmann::json to_json(const Theorem1Report& report);
nlohmann::json to_json(const ProperDiagnostic& report);

}  // namespace bvarnu::lossprior
