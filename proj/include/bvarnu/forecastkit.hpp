#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "bvarnu/inference.hpp"
#include "bvarnu/varcore.hpp"

namespace bvarnu {

struct ForecastRecord {
  int window_index = 0;
  int origin_time = 0;               // row index of the last in-window observation
  Eigen::MatrixXd predictive_draws;  // S x m draws of y_{origin+1}
  Eigen::VectorXd realized;
  Eigen::VectorXd point_forecast;    // predictive mean
  std::optional<NuSummary> nu;       // loss-based fits only
  double mh_acceptance_rate = 0.0;
};

/// Windows of length `window` ending at origins first_origin .. last_origin
/// (inclusive), advancing by one period.
struct RollingPlan {
  int window = 0;
  int first_origin = 0;
  int last_origin = 0;

  /// Every origin from window - 1 to T - 2: T - window one-step forecasts.
  static RollingPlan full(int T, int window);
  int count() const { return last_origin - first_origin + 1; }
  void validate(int T, int p) const;
};

/// Composition sampling: one predictive draw per retained posterior draw
/// (the first n_draws of them). `recent` holds y_t, y_{t-1}, ..., most recent
/// first, at least p entries.
Eigen::MatrixXd predictive_draws(const PosteriorDraws& draws,
                                 const std::vector<Eigen::VectorXd>& recent, int n_draws,
                                 RngStream& rng);

/// sqrt(mean over records of (point_forecast_i - realized_i)^2).
double rmse(const std::vector<ForecastRecord>& records, int variable);

/// E|Y - y| - 0.5 E|Y - Y'| with the second term over the circular pairing
/// (Y_s, Y_{s+1 mod S}). Requires S >= 2.
double crps(const ForecastRecord& record, int variable);
double crps(const Eigen::VectorXd& draws, double realized);

/// Same score with the full double mean over all S^2 pairs; this is the
/// exact CRPS of the empirical predictive distribution.
double crps_empirical(const Eigen::VectorXd& draws, double realized);

double mean_crps(const std::vector<ForecastRecord>& records, int variable);

struct RollingResult {
  std::vector<ForecastRecord> records;   // ordered by window_index
  std::vector<int> skipped_windows;
  std::vector<std::string> warnings;
};

struct RollingOptions {
  int threads = 1;
  int n_draws = 0;  // 0: use every retained draw
};

/// Refit on each window and forecast one step ahead. Window w uses the
/// sampler stream config.rng.child(w). Sampler failures skip the window and
/// are reported in the result.
RollingResult rolling_forecast(const VarDataset& data, int p, bool intercept,
                               const NormalWishartPrior& prior, const RollingPlan& plan,
                               const SamplerConfig& config, const RollingOptions& options = {});

struct MetricRow {
  std::string variable;
  double rmse_fixed;
  double rmse_loss;
  double rmse_ratio;
  double crps_fixed;
  double crps_loss;
  double crps_ratio;
};

struct MetricReport {
  std::vector<MetricRow> rows;
  int windows = 0;
};

/// Keep only windows present in both lists (skipped windows drop out of both).
void align_records(std::vector<ForecastRecord>& fixed, std::vector<ForecastRecord>& loss);

/// Per-variable RMSE and mean CRPS under both priors, with ratio
/// loss-based / fixed. Window indices must match exactly.
MetricReport compare_priors(const std::vector<ForecastRecord>& records_fixed,
                            const std::vector<ForecastRecord>& records_loss,
                            const std::vector<std::string>& variable_names = {});

std::string metric_report_csv(const MetricReport& report);
nlohmann::json to_json(const MetricReport& report);

/// window,origin_time,origin_label,nu_mean,nu_hpd_low,nu_hpd_high,mh_acceptance;
/// rows only for records that carry a nu summary.
std::string nu_trajectory_csv(const std::vector<ForecastRecord>& records,
                              const std::vector<std::string>& row_labels = {});

}  // namespace bvarnu
