// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed
// here and are not tuned per run. Optional arguments select criteria by
// number, e.g. `acceptance 1 4 8`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "appcli.hpp"

#include "bvarnu/csvio.hpp"
#include "bvarnu/forecastkit.hpp"
#include "bvarnu/inference.hpp"
#include "bvarnu/lossprior.hpp"
#include "bvarnu/mcstudy.hpp"
#include "bvarnu/parallel.hpp"
#include "bvarnu/special.hpp"

using namespace bvarnu;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kPriorIdentityTol = 1e-12;
constexpr double kTailMassTol = 1e-12;
constexpr double kTvTol = 0.02;
constexpr double kConjugacyRelTol = 0.02;
constexpr double kMedianRelTol = 0.10;
constexpr double kNuMeanShare = 0.95;
constexpr double kHpdExcludeShare = 0.50;
constexpr double kCrpsExactTol = 1e-9;
constexpr double kCrpsCircularRelTol = 0.01;
constexpr double kMetricTol = 1e-12;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome theorem1() {
  const auto r = lossprior::verify_theorem1({2, 15}, {1, 25}, {-5, 5});
  std::set<int> argmins;
  for (const auto& c : r.cells) argmins.insert(c.argmin_c);
  const bool pass = r.pass && r.exceptions == 0 && argmins == std::set<int>{1} &&
                    r.cells.size() == 14u * 25u;
  return {pass, std::to_string(r.cells.size()) + " cells, " + std::to_string(r.exceptions) +
                    " exceptions, worst KL(-1)-KL(+1) margin " + fmt("%.3e", r.worst_margin)};
}

// ---------------------------------------------------------------- 2

Outcome prior_shape() {
  double worst = 0.0;
  bool positive = true, decreasing = true;
  for (int m : {2, 5, 10, 20}) {
    double previous = 0.0;
    for (int nu = m; nu <= m + 200; ++nu) {
      const double prior = std::exp(lossprior::log_prior_nu(m, nu));
      const double from_kl = std::exp(lossprior::kl_wishart(m, nu, 1)) - 1.0;
      worst = std::max(worst, std::fabs(prior - from_kl));
      if (!(prior > 0.0) || !std::isfinite(prior)) positive = false;
      if (nu > m && !(prior < previous)) decreasing = false;
      previous = prior;
    }
  }
  return {worst <= kPriorIdentityTol && positive && decreasing,
          "max |pi - (exp(KL)-1)| = " + fmt("%.2e", worst) + (positive ? ", positive" : ", NOT positive") +
              (decreasing ? ", strictly decreasing" : ", NOT decreasing")};
}

// ---------------------------------------------------------------- 3

Outcome theorem2() {
  const auto d = lossprior::properness_diagnostic(3, SpdMatrix::scaled_identity(3, 5.0),
                                                  SpdMatrix::identity(3), 3 + 500);
  return {d.ratio_strictly_decreasing && d.tail_mass < kTailMassTol,
          std::string("log R_nu ") + (d.ratio_strictly_decreasing ? "strictly decreasing" : "NOT decreasing") +
              " (" + fmt("%.2f", d.log_ratio.front()) + " -> " + fmt("%.2f", d.log_ratio.back()) +
              "), tail mass beyond m+500 = " + fmt("%.2e", d.tail_mass)};
}

// ---------------------------------------------------------------- 4

Outcome mh_chain() {
  Eigen::MatrixXd p(2, 2);
  p << 6.0, 1.0, 1.0, 3.0;
  const lossprior::NuConditional target(SpdMatrix(p), SpdMatrix::identity(2));
  const int nu_max = 2000;
  const auto exact = lossprior::enumerate_posterior(target, nu_max);
  std::vector<double> counts(exact.size() + 1, 0.0);  // last slot: beyond nu_max
  RngStream rng(4004);
  const int sweeps = 200000;
  int nu = 3;
  long accepted = 0;
  for (int i = 0; i < sweeps; ++i) {
    const NuStep s = draw_nu(nu, target, 3, rng);
    nu = s.nu;
    accepted += s.accepted;
    const auto slot = std::min<std::size_t>(static_cast<std::size_t>(nu - 2), exact.size());
    counts[slot] += 1.0;
  }
  double tv = 0.5 * counts.back() / sweeps;
  for (std::size_t i = 0; i < exact.size(); ++i) tv += 0.5 * std::fabs(counts[i] / sweeps - exact[i]);
  return {tv < kTvTol, "TV = " + fmt("%.4f", tv) + " over " + std::to_string(sweeps) +
                           " sweeps, acceptance " + fmt("%.3f", static_cast<double>(accepted) / sweeps)};
}

// ---------------------------------------------------------------- 5

Outcome conjugacy() {
  // AR(1), m = 1, flat prior on the coefficient, sigma^{-2} ~ W(nu0, 1/s0).
  RngStream data_rng(5005);
  SimulationSpec spec;
  spec.m = 1;
  spec.T = 61;
  spec.lags = {Eigen::MatrixXd::Constant(1, 1, 0.5)};
  spec.sigma = SpdMatrix::identity(1);
  const SimulatedVar sim = simulate_var(spec, data_rng);
  const LagDesign d = build_lag_design(sim.data, 1, false);
  const int nu0 = 3;
  const double s0 = 1.0;
  const auto prior = NormalWishartPrior::diffuse(1, SpdMatrix::scaled_identity(1, s0), FixedNu{nu0});

  const double xx = d.X.squaredNorm();
  const double a_hat = d.X.col(0).dot(d.Y.col(0)) / xx;
  const double sse = (d.Y - a_hat * d.X).squaredNorm();
  const int t = d.t_eff();
  // Marginal posterior of a: Student-t, df nu0 + t - 1, location a_hat,
  // variance (s0 + SSE) / ((nu0 + t - 3) X'X).
  const double exact_mean = a_hat;
  const double exact_var = (s0 + sse) / ((nu0 + t - 3) * xx);

  SamplerConfig cfg;
  cfg.iterations = 11000;
  cfg.burn_in = 1000;
  cfg.rng = RngStream(5006);
  const PosteriorDraws draws = run_gibbs(d, prior, cfg);
  const double n = static_cast<double>(draws.size());
  double mean = 0.0;
  for (const auto& a : draws.alpha_draws) mean += a(0) / n;
  double var = 0.0, rb = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    var += std::pow(draws.alpha_draws[i](0) - mean, 2) / (n - 1.0);
    rb += draws.sigma_draws[i](0, 0) / xx / n;  // E[Var(a | sigma^2)]
  }
  const double mean_err = std::fabs(mean / exact_mean - 1.0);
  const double var_err = std::fabs(var / exact_var - 1.0);
  return {draws.size() == 10000 && mean_err < kConjugacyRelTol && var_err < kConjugacyRelTol,
          "mean " + fmt("%.5f", mean) + " vs " + fmt("%.5f", exact_mean) + " (" + fmt("%.2f%%", 100 * mean_err) +
              "), var " + fmt("%.6f", var) + " vs " + fmt("%.6f", exact_var) + " (" +
              fmt("%.2f%%", 100 * var_err) + "; Rao-Blackwell " + fmt("%.2f%%", 100 * std::fabs(rb / exact_var - 1.0)) +
              "), " + std::to_string(draws.size()) + " draws"};
}

// ---------------------------------------------------------------- 6

Outcome study_direction(int threads) {
  StudyGrid grid;
  grid.m_values = {5};
  grid.T_values = {30};
  grid.nu_true_map = {{5, {5, 15}}};
  grid.replications = 50;
  SamplerConfig cfg;
  cfg.iterations = 2000;
  cfg.burn_in = 500;
  cfg.rng = RngStream(6006);
  StudyOptions opts;
  opts.threads = threads;
  const StudyResult r = run_study(grid, cfg, opts);
  const StudyCell far{5, 30, 15}, near{5, 30, 5};
  const double far_fixed = median_rmad_sigma(r.samples, far, Scheme::kFixed);
  const double far_loss = median_rmad_sigma(r.samples, far, Scheme::kLossBased);
  const double near_fixed = median_rmad_sigma(r.samples, near, Scheme::kFixed);
  const double near_loss = median_rmad_sigma(r.samples, near, Scheme::kLossBased);
  const double near_rel = std::fabs(near_loss - near_fixed) / near_fixed;
  return {far_loss < far_fixed && near_rel <= kMedianRelTol,
          "nu_true=15: median RMAD_Sigma loss " + fmt("%.4f", far_loss) + " vs fixed " + fmt("%.4f", far_fixed) +
              "; nu_true=5: loss " + fmt("%.4f", near_loss) + " vs fixed " + fmt("%.4f", near_fixed) + " (" +
              fmt("%.1f%%", 100 * near_rel) + " apart)"};
}

// ---------------------------------------------------------------- 7

Outcome nu_adaptation(int threads) {
  const int m = 5, window = 60, windows = 40;
  RngStream data_rng(7007);
  SimulationSpec spec;
  spec.m = m;
  spec.T = window + windows;
  spec.lags = {0.5 * Eigen::MatrixXd::Identity(m, m)};
  spec.sigma = InverseWishartSource{20};
  const VarDataset data = simulate_var(spec, data_rng).data;
  const RollingPlan plan = RollingPlan::full(data.T(), window);
  SamplerConfig cfg;
  cfg.rng = RngStream(7008);
  RollingOptions opts;
  opts.threads = threads;
  const auto prior = NormalWishartPrior::standard(m, m, LossBasedNu{});
  const RollingResult r = rolling_forecast(data, 1, false, prior, plan, cfg, opts);
  int above = 0, excluded = 0;
  double lo = 1e9, hi = 0;
  for (const auto& rec : r.records) {
    above += rec.nu->mean > m + 1;
    excluded += rec.nu->hpd_low > m + 1 || rec.nu->hpd_high < m + 1;
    lo = std::min(lo, rec.nu->mean);
    hi = std::max(hi, rec.nu->mean);
  }
  const double n = static_cast<double>(plan.count());
  const double share_above = above / n, share_excl = excluded / n;
  return {r.records.size() == static_cast<std::size_t>(plan.count()) && share_above >= kNuMeanShare &&
              share_excl >= kHpdExcludeShare,
          std::to_string(r.records.size()) + "/" + std::to_string(plan.count()) + " windows; mean nu > m+1 in " +
              fmt("%.0f%%", 100 * share_above) + ", HPD excludes m+1 in " + fmt("%.0f%%", 100 * share_excl) +
              "; window means in [" + fmt("%.1f", lo) + ", " + fmt("%.1f", hi) + "]"};
}

// ---------------------------------------------------------------- 8

double crps_integral(std::vector<double> draws, double y) {
  std::vector<double> points = draws;
  points.push_back(y);
  std::sort(points.begin(), points.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double lo = points[i], hi = points[i + 1];
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi);
    double f = 0.0;
    for (double d : draws) f += d <= mid;
    f /= static_cast<double>(draws.size());
    const double step = y <= mid ? 1.0 : 0.0;
    total += (f - step) * (f - step) * (hi - lo);
  }
  return total;
}

Outcome crps_checks() {
  RngStream rng(8008);
  double worst_exact = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int s = 1 + static_cast<int>(rng.uniform_index(5));
    std::vector<double> d;
    for (int i = 0; i < s; ++i) d.push_back(rng.uniform() < 0.2 ? 0.5 : 3.0 * rng.normal());
    const double y = rng.uniform() < 0.1 ? d.front() : 3.0 * rng.normal();
    const Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(d.data(), s);
    worst_exact = std::max(worst_exact, std::fabs(crps_empirical(v, y) - crps_integral(d, y)));
  }

  // circular pairing against the exact score, S = 2000, averaged over records
  double circ = 0.0, exact = 0.0;
  for (int r = 0; r < 100; ++r) {
    Eigen::VectorXd d(2000);
    for (int i = 0; i < 2000; ++i) d(i) = rng.normal();
    const double y = rng.normal();
    circ += crps(d, y);
    exact += crps_empirical(d, y);
  }
  const double circ_rel = std::fabs(circ / exact - 1.0);

  // sign: random non-degenerate records score > 0, degenerate-correct ones exactly 0
  int negative = 0, zero_nondegenerate = 0, nonzero_degenerate = 0;
  for (int r = 0; r < 10000; ++r) {
    const int s = 100 + static_cast<int>(rng.uniform_index(1901));
    Eigen::VectorXd d(s);
    const double scale = std::exp(rng.normal());
    for (int i = 0; i < s; ++i) d(i) = scale * rng.normal();
    const double y = 2.0 * rng.normal();
    for (double score : {crps(d, y), crps_empirical(d, y)}) {
      if (score < 0.0) ++negative;
      if (score == 0.0) ++zero_nondegenerate;
    }
  }
  for (int r = 0; r < 1000; ++r) {
    const double y = rng.normal();
    const Eigen::VectorXd d = Eigen::VectorXd::Constant(2 + static_cast<int>(rng.uniform_index(50)), y);
    if (crps(d, y) != 0.0 || crps_empirical(d, y) != 0.0) ++nonzero_degenerate;
    if (!(crps(d, y + 0.25) > 0.0)) ++zero_nondegenerate;
  }
  const bool pass = worst_exact < kCrpsExactTol && circ_rel < kCrpsCircularRelTol && negative == 0 &&
                    zero_nondegenerate == 0 && nonzero_degenerate == 0;
  return {pass, "exact vs integral max err " + fmt("%.1e", worst_exact) + "; circular vs exact (S=2000, 100 records) " +
                    fmt("%.3f%%", 100 * circ_rel) + "; negative " + std::to_string(negative) +
                    ", zero at non-degenerate " + std::to_string(zero_nondegenerate) +
                    ", non-zero at degenerate-correct " + std::to_string(nonzero_degenerate)};
}

// ---------------------------------------------------------------- 9

ForecastRecord record(int w, const Eigen::MatrixXd& draws, const Eigen::VectorXd& realized) {
  ForecastRecord r;
  r.window_index = w;
  r.origin_time = w;
  r.predictive_draws = draws;
  r.realized = realized;
  r.point_forecast = draws.colwise().mean().transpose();
  return r;
}

Outcome metrics() {
  bool ok = true;
  double worst = 0.0;
  // RMSE: hand values
  {
    std::vector<ForecastRecord> recs;
    const double errors[] = {0.1, 0.3};
    for (int w = 0; w < 2; ++w) {
      recs.push_back(record(w, Eigen::MatrixXd::Constant(2, 1, errors[w]), Eigen::VectorXd::Zero(1)));
    }
    worst = std::max(worst, std::fabs(rmse(recs, 0) - std::sqrt(0.05)));
    recs[0].predictive_draws.setConstant(1.0);
    recs[0].point_forecast.setConstant(1.0);
    recs[1].predictive_draws.setConstant(-1.0);
    recs[1].point_forecast.setConstant(-1.0);
    worst = std::max(worst, std::fabs(rmse(recs, 0) - 1.0));
  }
  // RMSE and RMAD against naive loops on seeded fixtures
  RngStream rng(9009);
  std::vector<ForecastRecord> fixed, loss;
  for (int w = 0; w < 30; ++w) {
    Eigen::MatrixXd d(64, 3);
    for (int i = 0; i < 64; ++i)
      for (int j = 0; j < 3; ++j) d(i, j) = rng.normal();
    fixed.push_back(record(w, d, Eigen::VectorXd::Zero(3)));
    loss.push_back(record(w, 0.5 * d, Eigen::VectorXd::Zero(3)));
    fixed.back().realized = loss.back().realized = Eigen::VectorXd::Zero(3);
  }
  for (int j = 0; j < 3; ++j) {
    double sum = 0.0;
    for (const auto& r : fixed) {
      double mean = 0.0;
      for (int i = 0; i < 64; ++i) mean += r.predictive_draws(i, j);
      mean /= 64.0;
      sum += (mean - r.realized(j)) * (mean - r.realized(j));
    }
    worst = std::max(worst, std::fabs(rmse(fixed, j) - std::sqrt(sum / 30.0)));
  }
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a(3, 3), b(3, 3);
    double naive = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        a(i, j) = rng.normal();
        b(i, j) = rng.normal();
        naive += std::fabs(a(i, j) - b(i, j));
      }
    }
    worst = std::max(worst, std::fabs(rmad(a, b) - std::sqrt(naive / 9.0)));
  }
  worst = std::max(worst, std::fabs(rmad(Eigen::MatrixXd::Constant(2, 2, 0.1), Eigen::MatrixXd::Zero(2, 2)) -
                                    std::sqrt(0.1)));
  ok = ok && worst < kMetricTol;

  // ratio arithmetic: halving every draw around a zero outcome halves both scores exactly
  const MetricReport same = compare_priors(fixed, fixed);
  const MetricReport half = compare_priors(fixed, loss);
  int ratio_mismatch = 0;
  for (const auto& row : same.rows) ratio_mismatch += row.rmse_ratio != 1.0 || row.crps_ratio != 1.0;
  for (const auto& row : half.rows) {
    ratio_mismatch += row.rmse_ratio != 0.5 || row.crps_ratio != 0.5;
    ratio_mismatch += row.rmse_ratio != row.rmse_loss / row.rmse_fixed;
    ratio_mismatch += row.crps_ratio != row.crps_loss / row.crps_fixed;
  }
  ok = ok && ratio_mismatch == 0 && half.windows == 30;
  return {ok, "max oracle deviation " + fmt("%.1e", worst) + ", ratio mismatches " + std::to_string(ratio_mismatch)};
}

// ---------------------------------------------------------------- 10

std::map<std::string, std::string> bundle_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) out[e.path().filename().string()] = read_text_file(e.path());
  }
  return out;
}

int quiet_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  return cli::run_cli(args, out, err);
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "bvarnu_acceptance_c10";
  fs::remove_all(root);
  fs::create_directories(root);
  bool ok = quiet_cli({"simulate", "--out", (root / "data").string(), "--m", "3", "--T", "70",
                       "--nu-true", "10", "--seed", "10010"}) == 0;
  const std::string data = (root / "data" / "data.csv").string();

  const std::vector<std::string> study{"study", "--preset", "desk", "--replications", "2",
                                       "--iterations", "400", "--burn-in", "100", "--seed", "10011"};
  const std::vector<std::string> forecast{"forecast", "--data", data, "-p", "1", "--window", "50",
                                          "--iterations", "600", "--burn-in", "100", "--seed", "10012"};
  auto run = [&](std::vector<std::string> args, const std::string& name, const std::string& threads) {
    args.insert(args.end(), {"--out", (root / name).string(), "--threads", threads});
    ok = ok && quiet_cli(args) == 0;
    return bundle_files(root / name);
  };
  const auto s1 = run(study, "study_1a", "1");
  const auto s2 = run(study, "study_1b", "1");
  const auto s4 = run(study, "study_4", "4");
  const auto f1 = run(forecast, "forecast_1a", "1");
  const auto f2 = run(forecast, "forecast_1b", "1");
  const auto f4 = run(forecast, "forecast_4", "4");
  const bool reruns = !s1.empty() && s1 == s2 && !f1.empty() && f1 == f2;
  const bool threads = s1.at("rmad.csv") == s4.at("rmad.csv") && f1.at("metrics.csv") == f4.at("metrics.csv") &&
                       f1.at("nu_trajectory.csv") == f4.at("nu_trajectory.csv") &&
                       f1.at("forecasts.csv") == f4.at("forecasts.csv");
  fs::remove_all(root);
  return {ok && reruns && threads,
          std::string("study ") + std::to_string(s1.size()) + " files, forecast " + std::to_string(f1.size()) +
              " files; threads=1 reruns " + (reruns ? "byte-identical" : "DIFFER") + "; threads=4 aggregates " +
              (threads ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = BVARNU_ACCEPTANCE_THREADS > 0 ? BVARNU_ACCEPTANCE_THREADS : default_thread_count();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 Theorem 1 argmin_c KL = 1", theorem1},
      {"C2 prior identity and shape", prior_shape},
      {"C3 Theorem 2 ratio test and tail mass", theorem2},
      {"C4 MH nu chain vs enumeration", mh_chain},
      {"C5 m=1 conjugate posterior", conjugacy},
      {"C6 simulation study direction of effect", [threads] { return study_direction(threads); }},
      {"C7 nu adaptation on rolling windows", [threads] { return nu_adaptation(threads); }},
      {"C8 CRPS estimators", crps_checks},
      {"C9 RMSE, RMAD and ratio arithmetic", metrics},
      {"C10 determinism of study and forecast", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected.empty() && !selected.count(static_cast<int>(i) + 1)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s  %-42s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
