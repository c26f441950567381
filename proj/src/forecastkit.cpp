#include "bvarnu/forecastkit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "bvarnu/csvio.hpp"
#include "bvarnu/errors.hpp"
#include "bvarnu/parallel.hpp"

namespace bvarnu {

RollingPlan RollingPlan::full(int T, int window) {
  return RollingPlan{window, window - 1, T - 2};
}

void RollingPlan::validate(int T, int p) const {
  if (window < p + 2) {
    throw ConfigError("rolling window " + std::to_string(window) + " is shorter than p + 2 = " +
                      std::to_string(p + 2));
  }
  if (first_origin < window - 1 || last_origin > T - 2 || count() < 1) {
    throw ConfigError("rolling plan needs at least one window of " + std::to_string(window) +
                      " observations plus one out-of-sample point (T=" + std::to_string(T) + ")");
  }
}

Eigen::MatrixXd predictive_draws(const PosteriorDraws& draws,
                                 const std::vector<Eigen::VectorXd>& recent, int n_draws,
                                 RngStream& rng) {
  if (draws.size() == 0) throw DomainError("predictive_draws: no posterior draws");
  if (n_draws < 1 || static_cast<std::size_t>(n_draws) > draws.size()) {
    throw DomainError("predictive_draws: requested " + std::to_string(n_draws) +
                      " draws but only " + std::to_string(draws.size()) + " are retained");
  }
  const DrawLayout& layout = draws.layout;
  if (static_cast<int>(recent.size()) < layout.p) {
    throw DomainError("predictive_draws: need " + std::to_string(layout.p) + " recent observations");
  }
  const std::vector<Eigen::VectorXd> lags(recent.begin(), recent.begin() + layout.p);
  const Eigen::RowVectorXd x = lag_row(lags, layout.intercept);
  Eigen::MatrixXd out(n_draws, layout.m);
  for (int s = 0; s < n_draws; ++s) {
    const auto idx = static_cast<std::size_t>(s);
    const Eigen::MatrixXd A = devectorize(draws.alpha_draws[idx], layout.k(), layout.m);
    const Eigen::VectorXd mean = (x * A).transpose();
    out.row(s) = sample_mvn(mean, draws.sigma_draws[idx], rng).transpose();
  }
  return out;
}

double rmse(const std::vector<ForecastRecord>& records, int variable) {
  if (records.empty()) throw DomainError("rmse: no forecast records");
  double sum = 0.0;
  for (const auto& r : records) {
    if (variable < 0 || variable >= r.realized.size()) throw DomainError("rmse: bad variable index");
    const double e = r.point_forecast(variable) - r.realized(variable);
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(records.size()));
}

double crps(const Eigen::VectorXd& draws, double realized) {
  const Eigen::Index S = draws.size();
  if (S < 2) throw DomainError("crps: need at least two predictive draws");
  double first = 0.0;
  double second = 0.0;
  for (Eigen::Index s = 0; s < S; ++s) {
    first += std::fabs(draws(s) - realized);
    second += std::fabs(draws(s) - draws((s + 1) % S));
  }
  return first / static_cast<double>(S) - 0.5 * second / static_cast<double>(S);
}

double crps(const ForecastRecord& record, int variable) {
  if (variable < 0 || variable >= record.predictive_draws.cols()) {
    throw DomainError("crps: bad variable index");
  }
  return crps(Eigen::VectorXd(record.predictive_draws.col(variable)), record.realized(variable));
}

double crps_empirical(const Eigen::VectorXd& draws, double realized) {
  const Eigen::Index S = draws.size();
  if (S < 1) throw DomainError("crps_empirical: need at least one draw");
  // sum_{s,t} |y_s - y_t| = 2 sum_i (2i - S + 1) y_(i) over sorted values.
  std::vector<double> sorted(draws.data(), draws.data() + S);
  std::sort(sorted.begin(), sorted.end());
  double first = 0.0;
  double pair_sum = 0.0;
  // centred on the minimum so that tied draws contribute exact zeros
  const double base = sorted.front();
  for (Eigen::Index i = 0; i < S; ++i) {
    const double v = sorted[static_cast<std::size_t>(i)];
    first += std::fabs(v - realized);
    pair_sum += (2.0 * static_cast<double>(i) - static_cast<double>(S) + 1.0) * (v - base);
  }
  const double n = static_cast<double>(S);
  return first / n - pair_sum / (n * n);
}

double mean_crps(const std::vector<ForecastRecord>& records, int variable) {
  if (records.empty()) throw DomainError("mean_crps: no forecast records");
  double sum = 0.0;
  for (const auto& r : records) sum += crps(r, variable);
  return sum / static_cast<double>(records.size());
}

RollingResult rolling_forecast(const VarDataset& data, int p, bool intercept,
                               const NormalWishartPrior& prior, const RollingPlan& plan,
                               const SamplerConfig& config, const RollingOptions& options) {
  plan.validate(data.T(), p);
  config.validate();
  if (options.n_draws < 0 || options.n_draws > config.retained()) {
    throw ConfigError("rolling_forecast: n_draws exceeds the retained posterior draws");
  }
  const auto count = static_cast<std::size_t>(plan.count());
  std::vector<std::optional<ForecastRecord>> slots(count);
  std::vector<std::string> failures(count);

  parallel_for(count, options.threads, [&](std::size_t w) {
    const int origin = plan.first_origin + static_cast<int>(w);
    const RngStream window_stream = config.rng.child(w);
    try {
      const VarDataset window = data.slice(origin - plan.window + 1, plan.window);
      const LagDesign design = build_lag_design(window, p, intercept);
      SamplerConfig local = config;
      local.rng = window_stream.child(0);
      const PosteriorDraws draws = run_gibbs(design, prior, local);

      std::vector<Eigen::VectorXd> recent;
      for (int j = 0; j < p; ++j) recent.emplace_back(data.observations.row(origin - j).transpose());
      RngStream predictive_stream = window_stream.child(1);
      const int n = options.n_draws > 0 ? options.n_draws : static_cast<int>(draws.size());

      ForecastRecord record;
      record.window_index = static_cast<int>(w);
      record.origin_time = origin;
      record.predictive_draws = predictive_draws(draws, recent, n, predictive_stream);
      record.realized = data.observations.row(origin + 1).transpose();
      record.point_forecast = record.predictive_draws.colwise().mean().transpose();
      if (!draws.nu_draws.empty()) record.nu = summarize_nu(draws.nu_draws);
      record.mh_acceptance_rate = draws.mh_acceptance_rate;
      slots[w] = std::move(record);
    } catch (const NumericalError& e) {
      failures[w] = e.what();
    } catch (const SamplerError& e) {
      failures[w] = e.what();
    }
  });

  RollingResult result;
  for (std::size_t w = 0; w < count; ++w) {
    if (slots[w]) {
      result.records.push_back(std::move(*slots[w]));
    } else {
      result.skipped_windows.push_back(static_cast<int>(w));
      result.warnings.push_back("window " + std::to_string(w) + " skipped: " + failures[w]);
    }
  }
  return result;
}

void align_records(std::vector<ForecastRecord>& fixed, std::vector<ForecastRecord>& loss) {
  std::set<int> in_fixed, in_loss;
  for (const auto& r : fixed) in_fixed.insert(r.window_index);
  for (const auto& r : loss) in_loss.insert(r.window_index);
  std::erase_if(fixed, [&](const ForecastRecord& r) { return !in_loss.count(r.window_index); });
  std::erase_if(loss, [&](const ForecastRecord& r) { return !in_fixed.count(r.window_index); });
}

MetricReport compare_priors(const std::vector<ForecastRecord>& records_fixed,
                            const std::vector<ForecastRecord>& records_loss,
                            const std::vector<std::string>& variable_names) {
  if (records_fixed.empty() || records_loss.empty()) {
    throw DomainError("compare_priors: no forecast records");
  }
  if (records_fixed.size() != records_loss.size()) {
    throw DomainError("compare_priors: window counts differ (" +
                      std::to_string(records_fixed.size()) + " vs " +
                      std::to_string(records_loss.size()) + ")");
  }
  for (std::size_t i = 0; i < records_fixed.size(); ++i) {
    if (records_fixed[i].window_index != records_loss[i].window_index) {
      throw DomainError("compare_priors: window " + std::to_string(records_fixed[i].window_index) +
                        " is not matched by the loss-based records");
    }
  }
  const auto m = static_cast<int>(records_fixed.front().realized.size());
  MetricReport report;
  report.windows = static_cast<int>(records_fixed.size());
  for (int i = 0; i < m; ++i) {
    MetricRow row;
    row.variable = i < static_cast<int>(variable_names.size())
                       ? variable_names[static_cast<std::size_t>(i)]
                       : "y" + std::to_string(i + 1);
    row.rmse_fixed = rmse(records_fixed, i);
    row.rmse_loss = rmse(records_loss, i);
    row.rmse_ratio = row.rmse_loss / row.rmse_fixed;
    row.crps_fixed = mean_crps(records_fixed, i);
    row.crps_loss = mean_crps(records_loss, i);
    row.crps_ratio = row.crps_loss / row.crps_fixed;
    report.rows.push_back(row);
  }
  return report;
}

std::string metric_report_csv(const MetricReport& report) {
  std::string out = "variable,rmse_fixed,rmse_loss,rmse_ratio,crps_fixed,crps_loss,crps_ratio\n";
  for (const auto& r : report.rows) {
    out += r.variable;
    for (double v : {r.rmse_fixed, r.rmse_loss, r.rmse_ratio, r.crps_fixed, r.crps_loss,
                     r.crps_ratio}) {
      out += ',' + format_double(v);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const MetricReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"variable", r.variable},
                    {"rmse", {{"fixed", r.rmse_fixed}, {"loss", r.rmse_loss}, {"ratio", r.rmse_ratio}}},
                    {"crps", {{"fixed", r.crps_fixed}, {"loss", r.crps_loss}, {"ratio", r.crps_ratio}}}});
  }
  return {{"windows", report.windows}, {"variables", rows}};
}

std::string nu_trajectory_csv(const std::vector<ForecastRecord>& records,
                              const std::vector<std::string>& row_labels) {
  std::string out = "window,origin_time,origin_label,nu_mean,nu_hpd_low,nu_hpd_high,mh_acceptance\n";
  for (const auto& r : records) {
    if (!r.nu) continue;
    const std::string label = r.origin_time < static_cast<int>(row_labels.size())
                                  ? row_labels[static_cast<std::size_t>(r.origin_time)]
                                  : std::string();
    out += std::to_string(r.window_index) + ',' + std::to_string(r.origin_time) + ',' + label +
           ',' + format_double(r.nu->mean) + ',' + std::to_string(r.nu->hpd_low) + ',' +
           std::to_string(r.nu->hpd_high) + ',' + format_double(r.mh_acceptance_rate) + '\n';
  }
  return out;
}

}  // namespace bvarnu
