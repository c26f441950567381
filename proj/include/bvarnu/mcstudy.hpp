#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "bvarnu/inference.hpp"
#include "bvarnu/varcore.hpp"

namespace bvarnu {

struct StudyCell {
  int m;
  int T;
  int nu_true;
};

/// Grid of (m, T, nu_true) cells for the fixed-versus-loss-based comparison.
struct StudyGrid {
  std::vector<int> m_values;
  std::vector<int> T_values;
  std::map<int, std::vector<int>> nu_true_map;
  int replications = 0;
  int p = 1;
  double coef_diagonal = 0.5;  // A_1 = coef_diagonal * I
  InverseWishartScale sigma_scale = InverseWishartScale::kPriorMatched;
  double v0_scale = 10.0;      // coefficient prior V0 = v0_scale * I

  /// m in {5, 10, 20}, T in {30, 100}, 250 replications.
  static StudyGrid paper();
  /// m in {5, 10}, T = 30, 50 replications.
  static StudyGrid desk();

  std::vector<StudyCell> cells() const;
  void validate() const;
};

enum class Scheme { kFixed, kLossBased };
std::string_view scheme_name(Scheme s);

struct RmadSample {
  StudyCell cell;
  int replication;
  Scheme scheme;
  double rmad_sigma;
  double rmad_coeffs;
};

/// [ (1/N) sum |theta - theta_hat| ]^{1/2}, N = number of entries.
double rmad(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth);

struct StudyOptions {
  int threads = 1;
  int max_retries = 3;
};

struct StudyResult {
  std::vector<RmadSample> samples;  // cell order, then replication, fixed before loss
  std::vector<std::string> log;     // retried replications
};

/// For every cell and replication: simulate one dataset, fit it under
/// Fixed(m + 1) and under the loss-based prior with the same sampler stream,
/// and score the posterior means of Sigma and A against the truth.
StudyResult run_study(const StudyGrid& grid, const SamplerConfig& config,
                      const StudyOptions& options = {});

/// Single replication of one cell; exposed for tests and tooling.
std::vector<RmadSample> run_replication(const StudyGrid& grid, const StudyCell& cell,
                                        int replication, const SamplerConfig& config,
                                        int attempt = 0);

inline constexpr std::string_view kBoxplotHeader =
    "m,T,nu_true,scheme,replication,rmad_sigma,rmad_coeffs";

std::string boxplot_csv(const std::vector<RmadSample>& samples);
std::vector<RmadSample> parse_boxplot_csv(std::string_view text);
void export_boxplot_data(const std::vector<RmadSample>& samples, const std::filesystem::path& path);

nlohmann::json study_manifest(const StudyGrid& grid, const SamplerConfig& config);

/// Median over replications of rmad_sigma(fixed) - rmad_sigma(loss) for one cell.
double median_sigma_advantage(const std::vector<RmadSample>& samples, const StudyCell& cell);
double median_rmad_sigma(const std::vector<RmadSample>& samples, const StudyCell& cell,
                         Scheme scheme);

}  // namespace bvarnu
