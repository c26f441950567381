#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bvarnu/lossprior.hpp"
#include "bvarnu/randmat.hpp"
#include "bvarnu/rng.hpp"
#include "bvarnu/varcore.hpp"

namespace bvarnu {

struct FixedNu {
  int nu;
};
struct LossBasedNu {};
using NuScheme = std::variant<FixedNu, LossBasedNu>;

bool is_loss_based(const NuScheme& scheme);
std::string describe(const NuScheme& scheme);

/// Normal prior on alpha = vec(A), Wishart prior on Sigma^{-1}:
///   alpha ~ N(alpha0, V0),  Sigma^{-1} ~ W(nu, S0^{-1}).
///
/// The coefficient prior is held as its precision V0^{-1} so that the
/// diffuse limit (V0^{-1} = 0) is representable.
class NormalWishartPrior {
 public:
  NormalWishartPrior(Eigen::VectorXd alpha0, const SpdMatrix& V0, SpdMatrix S0, NuScheme scheme);

  /// Flat prior on alpha (V0^{-1} = 0).
  static NormalWishartPrior diffuse(int km, SpdMatrix S0, NuScheme scheme);

  /// alpha0 = 0, V0 = v0_scale * I, S0 = I.
  static NormalWishartPrior standard(int m, int k, NuScheme scheme, double v0_scale = 10.0);

  const Eigen::VectorXd& alpha0() const { return alpha0_; }
  const Eigen::MatrixXd& coef_precision() const { return coef_precision_; }
  const SpdMatrix& S0() const { return S0_; }
  const NuScheme& nu_scheme() const { return scheme_; }
  int m() const { return S0_.dim(); }
  int km() const { return static_cast<int>(alpha0_.size()); }

  /// Initial nu: the fixed value, or m + 1 under the loss-based scheme.
  int initial_nu() const;

 private:
  NormalWishartPrior(Eigen::VectorXd alpha0, Eigen::MatrixXd coef_precision, SpdMatrix S0,
                     NuScheme scheme);
  void validate() const;

  Eigen::VectorXd alpha0_;
  Eigen::MatrixXd coef_precision_;
  SpdMatrix S0_;
  NuScheme scheme_;
};

struct SamplerConfig {
  int iterations = 6000;
  int burn_in = 1000;
  int thin = 1;
  int mh_step = 3;
  RngStream rng{};

  int retained() const { return (iterations - burn_in) / thin; }
  void validate() const;
};

/// Layout needed to map alpha back to a forecasting equation.
struct DrawLayout {
  int m = 0;
  int p = 0;
  bool intercept = false;
  int k() const { return regressor_count(m, p, intercept); }
};

struct PosteriorDraws {
  DrawLayout layout;
  std::vector<Eigen::VectorXd> alpha_draws;
  std::vector<SpdMatrix> sigma_draws;
  std::vector<int> nu_draws;  // empty under a fixed scheme
  double mh_acceptance_rate = 0.0;

  std::size_t size() const { return alpha_draws.size(); }
};

/// Conditional posterior of alpha given Sigma^{-1}:
///   precision = V0^{-1} + Sigma^{-1} (x) X'X,  mean = precision^{-1}(V0^{-1} alpha0 + vec(X'Y Sigma^{-1})).
struct AlphaConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd precision;
  Eigen::MatrixXd precision_chol;  // lower factor of precision (after any jitter)
};

AlphaConditional alpha_conditional(const LagDesign& design, const SpdMatrix& sigma_inv,
                                   const NormalWishartPrior& prior);

Eigen::VectorXd draw_alpha(const LagDesign& design, const SpdMatrix& sigma_inv,
                           const NormalWishartPrior& prior, RngStream& rng);

/// Posterior Wishart parameters for Sigma^{-1} given alpha: df nu + T_eff,
/// scale S_bar^{-1}, S_bar = S0 + E'E.
struct SigmaConditional {
  int df;
  SpdMatrix s_bar;
};

SigmaConditional sigma_conditional(const LagDesign& design, const Eigen::VectorXd& alpha,
                                   const NormalWishartPrior& prior, int nu_current);

SpdMatrix draw_sigma_inv(const LagDesign& design, const Eigen::VectorXd& alpha,
                         const NormalWishartPrior& prior, int nu_current, RngStream& rng);

struct NuStep {
  int nu;
  bool accepted;
};

/// One random-walk Metropolis-Hastings update of nu. Proposals are uniform on
/// {nu - step, ..., nu - 1, nu + 1, ..., nu + step}; proposals below m are
/// rejected outright.
NuStep draw_nu(int nu_current, const lossprior::NuConditional& target, int mh_step,
               RngStream& rng);

NuStep draw_nu(int nu_current, const SpdMatrix& sigma_inv, const NormalWishartPrior& prior,
               int mh_step, RngStream& rng);

/// Failure inside a Gibbs run; carries the sweep index.
class SamplerError : public std::runtime_error {
 public:
  SamplerError(int sweep, const std::string& what);
  int sweep() const { return sweep_; }

 private:
  int sweep_;
};

/// Gibbs sampler: alpha | Sigma^{-1}, then Sigma^{-1} | alpha, then nu | Sigma^{-1}
/// under the loss-based scheme. Starts from Sigma = I.
PosteriorDraws run_gibbs(const LagDesign& design, const NormalWishartPrior& prior,
                         SamplerConfig config);

struct NuSummary {
  double mean;
  int hpd_low;
  int hpd_high;
  std::vector<int> hpd_set;
};

struct PosteriorSummary {
  Eigen::VectorXd alpha_mean;
  Eigen::MatrixXd sigma_mean;
  std::optional<NuSummary> nu;
  double mh_acceptance_rate = 0.0;
  std::size_t draws = 0;
};

/// Smallest set of nu values, taken by descending frequency, whose empirical
/// mass reaches `level`. Ties in frequency prefer the smaller nu.
NuSummary summarize_nu(const std::vector<int>& nu_draws, double level = 0.95);

PosteriorSummary summarize(const PosteriorDraws& draws);

}  // namespace bvarnu
