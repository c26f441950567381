#include "bvarnu/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "bvarnu/errors.hpp"

namespace bvarnu {
namespace {

constexpr int kJitterRetries = 3;
constexpr int kPriorTableSpan = 2000;

// Process-wide read-only prior tables, one per dimension.
std::shared_ptr<const lossprior::PriorWeightTable> shared_prior_table(int m) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const lossprior::PriorWeightTable>> tables;
  std::lock_guard lock(mutex);
  auto& slot = tables[m];
  if (!slot) slot = std::make_shared<const lossprior::PriorWeightTable>(m, m + kPriorTableSpan);
  return slot;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

bool is_loss_based(const NuScheme& scheme) {
  return std::holds_alternative<LossBasedNu>(scheme);
}

std::string describe(const NuScheme& scheme) {
  if (const auto* fixed = std::get_if<FixedNu>(&scheme)) {
    return "fixed:" + std::to_string(fixed->nu);
  }
  return "loss";
}

NormalWishartPrior::NormalWishartPrior(Eigen::VectorXd alpha0, const SpdMatrix& V0, SpdMatrix S0,
                                       NuScheme scheme)
    : alpha0_(std::move(alpha0)),
      coef_precision_(V0.inverse().matrix()),
      S0_(std::move(S0)),
      scheme_(scheme) {
  validate();
}

NormalWishartPrior::NormalWishartPrior(Eigen::VectorXd alpha0, Eigen::MatrixXd coef_precision,
                                       SpdMatrix S0, NuScheme scheme)
    : alpha0_(std::move(alpha0)),
      coef_precision_(std::move(coef_precision)),
      S0_(std::move(S0)),
      scheme_(scheme) {
  validate();
}

NormalWishartPrior NormalWishartPrior::diffuse(int km, SpdMatrix S0, NuScheme scheme) {
  return NormalWishartPrior(Eigen::VectorXd::Zero(km), Eigen::MatrixXd::Zero(km, km),
                            std::move(S0), scheme);
}

NormalWishartPrior NormalWishartPrior::standard(int m, int k, NuScheme scheme, double v0_scale) {
  return NormalWishartPrior(Eigen::VectorXd::Zero(k * m), SpdMatrix::scaled_identity(k * m, v0_scale),
                            SpdMatrix::identity(m), scheme);
}

void NormalWishartPrior::validate() const {
  if (coef_precision_.rows() != alpha0_.size() || coef_precision_.cols() != alpha0_.size()) {
    throw ConfigError("NormalWishartPrior: V0 must be (k*m) x (k*m) to match alpha0");
  }
  if (alpha0_.size() % m() != 0) {
    throw ConfigError("NormalWishartPrior: alpha0 length must be a multiple of m");
  }
  if (const auto* fixed = std::get_if<FixedNu>(&scheme_)) {
    if (fixed->nu < m()) {
      throw ConfigError("NormalWishartPrior: fixed nu=" + std::to_string(fixed->nu) +
                        " must be >= m=" + std::to_string(m()));
    }
  }
}

int NormalWishartPrior::initial_nu() const {
  if (const auto* fixed = std::get_if<FixedNu>(&scheme_)) return fixed->nu;
  return m() + 1;
}

void SamplerConfig::validate() const {
  if (burn_in < 0) throw ConfigError("SamplerConfig: burn-in must be >= 0");
  if (iterations <= burn_in) throw ConfigError("SamplerConfig: iterations must exceed burn-in");
  if (thin < 1) throw ConfigError("SamplerConfig: thin must be >= 1");
  if (mh_step < 1) throw ConfigError("SamplerConfig: mh_step must be >= 1");
}

AlphaConditional alpha_conditional(const LagDesign& design, const SpdMatrix& sigma_inv,
                                   const NormalWishartPrior& prior) {
  const int m = design.m();
  const int k = design.k();
  if (sigma_inv.dim() != m || prior.km() != k * m) {
    throw DomainError("draw_alpha: prior/design/precision dimensions disagree");
  }
  const Eigen::MatrixXd xtx = design.X.transpose() * design.X;
  AlphaConditional out;
  out.precision = prior.coef_precision() + kron(sigma_inv.matrix(), xtx);
  const Eigen::MatrixXd xty_sinv = design.X.transpose() * design.Y * sigma_inv.matrix();
  const Eigen::VectorXd rhs = prior.coef_precision() * prior.alpha0() + vectorize(xty_sinv);

  const int n = static_cast<int>(out.precision.rows());
  const double base_jitter = 1e-10 * out.precision.trace();
  Eigen::MatrixXd work = out.precision;
  for (int attempt = 0; attempt <= kJitterRetries; ++attempt) {
    if (attempt > 0) {
      work = out.precision;
      work.diagonal().array() += base_jitter * std::pow(10.0, attempt - 1);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0) {
      out.precision_chol = llt.matrixL();
      out.mean = llt.solve(rhs);
      if (out.mean.allFinite()) return out;
    }
  }
  throw NumericalError("draw_alpha: posterior precision of dimension " + std::to_string(n) +
                       " is singular after " + std::to_string(kJitterRetries) +
                       " jitter retries (trace " + std::to_string(out.precision.trace()) + ")");
}

Eigen::VectorXd draw_alpha(const LagDesign& design, const SpdMatrix& sigma_inv,
                           const NormalWishartPrior& prior, RngStream& rng) {
  const AlphaConditional cond = alpha_conditional(design, sigma_inv, prior);
  Eigen::VectorXd z(cond.mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  // precision = L L'  =>  L'^{-1} z ~ N(0, precision^{-1})
  return cond.mean +
         cond.precision_chol.transpose().triangularView<Eigen::Upper>().solve(z);
}

SigmaConditional sigma_conditional(const LagDesign& design, const Eigen::VectorXd& alpha,
                                   const NormalWishartPrior& prior, int nu_current) {
  if (nu_current < design.m()) throw DomainError("draw_sigma_inv: nu below m");
  const Eigen::MatrixXd resid = residuals(design, devectorize(alpha, design.k(), design.m()));
  const Eigen::MatrixXd s_bar = prior.S0().matrix() + resid.transpose() * resid;
  try {
    return SigmaConditional{nu_current + design.t_eff(), SpdMatrix(s_bar)};
  } catch (const NotPositiveDefinite& e) {
    throw NumericalError(std::string("draw_sigma_inv: posterior scale S_bar is not SPD: ") +
                         e.what());
  }
}

SpdMatrix draw_sigma_inv(const LagDesign& design, const Eigen::VectorXd& alpha,
                         const NormalWishartPrior& prior, int nu_current, RngStream& rng) {
  const SigmaConditional cond = sigma_conditional(design, alpha, prior, nu_current);
  return sample_wishart(cond.df, cond.s_bar.inverse(), rng);
}

NuStep draw_nu(int nu_current, const lossprior::NuConditional& target, int mh_step,
               RngStream& rng) {
  if (nu_current < target.m()) throw DomainError("draw_nu: current nu below m");
  if (mh_step < 1) throw DomainError("draw_nu: mh_step must be >= 1");
  const auto idx = static_cast<int>(rng.uniform_index(2 * static_cast<std::uint64_t>(mh_step)));
  const int offset = idx < mh_step ? idx - mh_step : idx - mh_step + 1;
  const int proposal = nu_current + offset;
  if (proposal < target.m()) return {nu_current, false};
  const double delta = target.log_density(proposal) - target.log_density(nu_current);
  if (delta >= 0.0 || std::log(rng.uniform()) < delta) return {proposal, true};
  return {nu_current, false};
}

NuStep draw_nu(int nu_current, const SpdMatrix& sigma_inv, const NormalWishartPrior& prior,
               int mh_step, RngStream& rng) {
  const auto table = shared_prior_table(sigma_inv.dim());
  const lossprior::NuConditional target(sigma_inv, prior.S0(), table.get());
  return draw_nu(nu_current, target, mh_step, rng);
}

SamplerError::SamplerError(int sweep, const std::string& what)
    : std::runtime_error("sweep " + std::to_string(sweep) + ": " + what), sweep_(sweep) {}

PosteriorDraws run_gibbs(const LagDesign& design, const NormalWishartPrior& prior,
                         SamplerConfig config) {
  config.validate();
  const int m = design.m();
  if (prior.m() != m || prior.km() != design.k() * m) {
    throw ConfigError("run_gibbs: prior dimensions do not match the lag design");
  }
  const bool loss_based = is_loss_based(prior.nu_scheme());
  const auto table = loss_based ? shared_prior_table(m) : nullptr;

  PosteriorDraws out;
  out.layout = DrawLayout{m, design.p, design.intercept};
  const auto retained = static_cast<std::size_t>(config.retained());
  out.alpha_draws.reserve(retained);
  out.sigma_draws.reserve(retained);
  if (loss_based) out.nu_draws.reserve(retained);

  RngStream& rng = config.rng;
  SpdMatrix sigma_inv = SpdMatrix::identity(m);
  int nu = prior.initial_nu();
  long accepted = 0;

  for (int sweep = 0; sweep < config.iterations; ++sweep) {
    try {
      const Eigen::VectorXd alpha = draw_alpha(design, sigma_inv, prior, rng);
      sigma_inv = draw_sigma_inv(design, alpha, prior, nu, rng);
      if (loss_based) {
        const lossprior::NuConditional target(sigma_inv, prior.S0(), table.get());
        const NuStep step = draw_nu(nu, target, config.mh_step, rng);
        nu = step.nu;
        accepted += step.accepted ? 1 : 0;
      }
      if (sweep >= config.burn_in && (sweep - config.burn_in) % config.thin == 0 &&
          out.alpha_draws.size() < retained) {
        out.alpha_draws.push_back(alpha);
        out.sigma_draws.push_back(sigma_inv.inverse());
        if (loss_based) out.nu_draws.push_back(nu);
      }
    } catch (const std::exception& e) {
      throw SamplerError(sweep, e.what());
    }
  }
  out.mh_acceptance_rate =
      loss_based ? static_cast<double>(accepted) / static_cast<double>(config.iterations) : 0.0;
  return out;
}

NuSummary summarize_nu(const std::vector<int>& nu_draws, double level) {
  if (nu_draws.empty()) throw DomainError("summarize_nu: no draws");
  if (!(level > 0.0 && level <= 1.0)) throw DomainError("summarize_nu: level must be in (0, 1]");
  std::map<int, long> counts;
  double sum = 0.0;
  for (int nu : nu_draws) {
    ++counts[nu];
    sum += nu;
  }
  std::vector<std::pair<int, long>> ordered(counts.begin(), counts.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const auto n = static_cast<long>(nu_draws.size());
  const auto needed = static_cast<long>(std::ceil(level * static_cast<double>(n) - 1e-9));
  NuSummary out{sum / static_cast<double>(n), 0, 0, {}};
  long cumulative = 0;
  for (const auto& [nu, count] : ordered) {
    out.hpd_set.push_back(nu);
    cumulative += count;
    if (cumulative >= needed) break;
  }
  std::sort(out.hpd_set.begin(), out.hpd_set.end());
  out.hpd_low = out.hpd_set.front();
  out.hpd_high = out.hpd_set.back();
  return out;
}

PosteriorSummary summarize(const PosteriorDraws& draws) {
  if (draws.alpha_draws.empty() || draws.sigma_draws.empty()) {
    throw DomainError("summarize: no posterior draws");
  }
  PosteriorSummary out;
  out.draws = draws.size();
  out.alpha_mean = Eigen::VectorXd::Zero(draws.alpha_draws.front().size());
  for (const auto& a : draws.alpha_draws) out.alpha_mean += a;
  out.alpha_mean /= static_cast<double>(draws.alpha_draws.size());
  const int m = draws.sigma_draws.front().dim();
  out.sigma_mean = Eigen::MatrixXd::Zero(m, m);
  for (const auto& s : draws.sigma_draws) out.sigma_mean += s.matrix();
  out.sigma_mean /= static_cast<double>(draws.sigma_draws.size());
  if (!draws.nu_draws.empty()) out.nu = summarize_nu(draws.nu_draws);
  out.mh_acceptance_rate = draws.mh_acceptance_rate;
  return out;
}

}  // namespace bvarnu
