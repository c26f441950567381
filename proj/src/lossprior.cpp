#include "bvarnu/lossprior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bvarnu/errors.hpp"
#include "bvarnu/special.hpp"

namespace bvarnu::lossprior {
namespace {

using special::digamma;
using special::log_gamma;
using special::multivariate_digamma;
using special::multivariate_log_gamma;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_support(int m, int nu, const char* what) {
  if (m < 1) throw DomainError(std::string(what) + ": dimension must be >= 1");
  if (nu < m) {
    throw DomainError(std::string(what) + ": nu=" + std::to_string(nu) + " below m=" +
                      std::to_string(m));
  }
}

double log_sum_exp(const std::vector<double>& values) {
  const double top = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

bool admissible(int m, int nu, int c) { return nu + c > m - 1; }

}  // namespace

double kl_wishart(int m, int nu, int c) {
  require_support(m, nu, "kl_wishart");
  if (!admissible(m, nu, c)) {
    throw DomainError("kl_wishart: nu + c must exceed m - 1 (nu=" + std::to_string(nu) +
                      ", c=" + std::to_string(c) + ", m=" + std::to_string(m) + ")");
  }
  if (c == 0) return 0.0;
  const double half_nu = 0.5 * nu;
  const double psi = multivariate_digamma(m, half_nu);
  double log_ratio;
  if (c == 1) {
    log_ratio = log_gamma(0.5 * (nu + 1)) - log_gamma(0.5 * (nu + 1 - m));
  } else if (c == -1) {
    log_ratio = -(log_gamma(half_nu) - log_gamma(0.5 * (nu - m)));
  } else {
    log_ratio = multivariate_log_gamma(m, 0.5 * (nu + c)) - multivariate_log_gamma(m, half_nu);
  }
  return log_ratio - 0.5 * c * psi;
}

double nearest_divergence(int m, int nu) {
  require_support(m, nu, "nearest_divergence");
  return log_gamma(0.5 * (nu + 1)) - log_gamma(0.5 * (nu + 1 - m)) -
         0.5 * multivariate_digamma(m, 0.5 * nu);
}

double log_prior_nu(int m, int nu) {
  require_support(m, nu, "log_prior_nu");
  const double d = nearest_divergence(m, nu);
  if (!(d > 0.0)) {
    throw NumericalError("log_prior_nu: non-positive divergence at nu=" + std::to_string(nu));
  }
  return std::log(std::expm1(d));
}

PriorWeightTable::PriorWeightTable(int m, int nu_max) : m_(m) {
  require_support(m, nu_max, "PriorWeightTable");
  log_weights_.reserve(static_cast<std::size_t>(nu_max - m + 1));
  for (int nu = m; nu <= nu_max; ++nu) log_weights_.push_back(log_prior_nu(m, nu));
}

double PriorWeightTable::log_weight(int nu) const {
  if (nu >= m_ && nu <= nu_max()) return log_weights_[static_cast<std::size_t>(nu - m_)];
  return log_prior_nu(m_, nu);
}

NuConditional::NuConditional(const SpdMatrix& precision, const SpdMatrix& s0,
                             const PriorWeightTable* table)
    : m_(precision.dim()), table_(table) {
  if (s0.dim() != m_) throw DomainError("NuConditional: precision and S0 dimensions differ");
  if (table_ != nullptr && table_->m() != m_) {
    throw DomainError("NuConditional: prior table built for a different dimension");
  }
  log_det_precision_ = precision.log_det();
  trace_s0_precision_ = (s0.matrix().cwiseProduct(precision.matrix())).sum();
  log_det_s0_ = s0.log_det();
}

double NuConditional::log_likelihood(int nu) const {
  require_support(m_, nu, "NuConditional");
  // W(P | nu, S0^{-1}); |S0^{-1}|^{-nu/2} = |S0|^{nu/2}.
  return 0.5 * (nu - m_ - 1) * log_det_precision_ - 0.5 * trace_s0_precision_ -
         0.5 * nu * m_ * special::kLog2 + 0.5 * nu * log_det_s0_ -
         multivariate_log_gamma(m_, 0.5 * nu);
}

double NuConditional::log_prior(int nu) const {
  return table_ != nullptr ? table_->log_weight(nu) : log_prior_nu(m_, nu);
}

double log_conditional_posterior_nu(int nu, const SpdMatrix& precision, const SpdMatrix& s0) {
  if (precision.dim() != s0.dim()) {
    throw DomainError("log_conditional_posterior_nu: dimension mismatch");
  }
  require_support(precision.dim(), nu, "log_conditional_posterior_nu");
  return log_prior_nu(precision.dim(), nu) + wishart_log_density(precision, nu, s0.inverse());
}

Theorem1Report verify_theorem1(IntRange m_range, IntRange nu_offset_range, IntRange c_range) {
  if (m_range.empty() || nu_offset_range.empty() || c_range.empty()) {
    throw DomainError("verify_theorem1: empty range");
  }
  if (m_range.lo < 2) throw DomainError("verify_theorem1: requires m >= 2");
  if (nu_offset_range.lo < 1) throw DomainError("verify_theorem1: requires nu > m");

  Theorem1Report report{m_range, nu_offset_range, c_range, {}, 0,
                        std::numeric_limits<double>::infinity(), false};
  for (int m = m_range.lo; m <= m_range.hi; ++m) {
    for (int k = nu_offset_range.lo; k <= nu_offset_range.hi; ++k) {
      const int nu = m + k;
      Theorem1Cell cell{m, nu, 0, kNaN, kNaN, kNaN};
      double best = std::numeric_limits<double>::infinity();
      for (int c = c_range.lo; c <= c_range.hi; ++c) {
        if (c == 0 || !admissible(m, nu, c)) continue;
        const double kl = kl_wishart(m, nu, c);
        if (kl < best) {
          best = kl;
          cell.argmin_c = c;
        }
        if (c == 1) cell.kl_plus_one = kl;
        if (c == -1) cell.kl_minus_one = kl;
      }
      if (cell.argmin_c == 0) {
        throw DomainError("verify_theorem1: no admissible c for m=" + std::to_string(m) +
                          ", nu=" + std::to_string(nu));
      }
      if (!std::isnan(cell.kl_plus_one) && !std::isnan(cell.kl_minus_one)) {
        cell.margin = cell.kl_minus_one - cell.kl_plus_one;
        report.worst_margin = std::min(report.worst_margin, cell.margin);
      }
      if (cell.argmin_c != 1) ++report.exceptions;
      report.cells.push_back(cell);
    }
  }
  if (std::isinf(report.worst_margin)) report.worst_margin = kNaN;
  report.pass = report.exceptions == 0;
  return report;
}

std::vector<double> enumerate_posterior(const NuConditional& target, int nu_max) {
  const int m = target.m();
  require_support(m, nu_max, "enumerate_posterior");
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(nu_max - m + 1));
  for (int nu = m; nu <= nu_max; ++nu) logs.push_back(target.log_density(nu));
  const double norm = log_sum_exp(logs);
  for (double& v : logs) v = std::exp(v - norm);
  return logs;
}

ProperDiagnostic properness_diagnostic(int m, const SpdMatrix& precision, const SpdMatrix& s0,
                                       int nu_max) {
  if (precision.dim() != m || s0.dim() != m) {
    throw DomainError("properness_diagnostic: dimension mismatch");
  }
  if (nu_max <= m + 10) throw DomainError("properness_diagnostic: nu_max must exceed m + 10");

  ProperDiagnostic out;
  out.m = m;
  out.nu_max = nu_max;
  const double constant =
      0.5 * precision.log_det() - 0.5 * m * special::kLog2 + 0.5 * s0.log_det();
  bool decreasing = true;
  for (int nu = m; nu <= nu_max; ++nu) {
    const double lr = constant + log_gamma(0.5 * (nu + 1 - m)) - log_gamma(0.5 * (nu + 1));
    if (!out.log_ratio.empty() && !(lr < out.log_ratio.back())) decreasing = false;
    out.nu.push_back(nu);
    out.log_ratio.push_back(lr);
  }
  out.ratio_strictly_decreasing = decreasing;

  const NuConditional target(precision, s0);
  std::vector<double> head;
  head.reserve(out.nu.size());
  for (int nu = m; nu <= nu_max; ++nu) head.push_back(target.log_density(nu));
  out.log_normalizer = log_sum_exp(head);
  out.posterior.reserve(head.size());
  for (double v : head) out.posterior.push_back(std::exp(v - out.log_normalizer));

  // Tail: enumerate past nu_max until terms are negligible relative to the
  // head and the term ratio is below one, then bound the rest geometrically.
  std::vector<double> tail;
  double previous = head.back();
  const int hard_cap = nu_max + 1000000;
  for (int nu = nu_max + 1; nu <= hard_cap; ++nu) {
    const double term = target.log_density(nu);
    tail.push_back(term);
    const double log_r = term - previous;
    previous = term;
    if (log_r < 0.0 && term < out.log_normalizer - 800.0) {
      const double r = std::exp(log_r);
      tail.push_back(term + std::log(r / (1.0 - r)));
      break;
    }
  }
  const double log_tail = log_sum_exp(tail);
  out.tail_mass = 1.0 / (1.0 + std::exp(out.log_normalizer - log_tail));
  return out;
}

nlohmann::json to_json(const Theorem1Report& report) {
  nlohmann::json cells = nlohmann::json::array();
  auto number_or_null = [](double v) -> nlohmann::json {
    return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
  };
  for (const auto& cell : report.cells) {
    cells.push_back({{"m", cell.m},
                     {"nu", cell.nu},
                     {"argmin_c", cell.argmin_c},
                     {"kl_plus_one", number_or_null(cell.kl_plus_one)},
                     {"kl_minus_one", number_or_null(cell.kl_minus_one)},
                     {"margin", number_or_null(cell.margin)}});
  }
  return {{"grid",
           {{"m", {report.m_range.lo, report.m_range.hi}},
            {"nu_offset", {report.nu_offset_range.lo, report.nu_offset_range.hi}},
            {"c", {report.c_range.lo, report.c_range.hi}}}},
          {"cells", cells},
          {"exceptions", report.exceptions},
          {"worst_margin", number_or_null(report.worst_margin)},
          {"status", report.pass ? "PASS" : "FAIL"}};
}

nlohmann::json to_json(const ProperDiagnostic& report) {
  return {{"m", report.m},
          {"nu_max", report.nu_max},
          {"nu", report.nu},
          {"log_ratio", report.log_ratio},
          {"ratio_strictly_decreasing", report.ratio_strictly_decreasing},
          {"log_normalizer", report.log_normalizer},
          {"tail_mass", report.tail_mass},
          {"posterior", report.posterior},
          {"status", report.ratio_strictly_decreasing ? "PASS" : "FAIL"}};
}

}  // namespace bvarnu::lossprior
