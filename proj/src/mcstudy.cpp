#include "bvarnu/mcstudy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bvarnu/csvio.hpp"
#include "bvarnu/errors.hpp"
#include "bvarnu/parallel.hpp"
#include "bvarnu/version.hpp"

namespace bvarnu {
namespace {

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

bool same_cell(const StudyCell& a, const StudyCell& b) {
  return a.m == b.m && a.T == b.T && a.nu_true == b.nu_true;
}

std::uint64_t cell_key(const StudyCell& cell, int replication) {
  return hash_stream({static_cast<std::uint64_t>(cell.m), static_cast<std::uint64_t>(cell.T),
                      static_cast<std::uint64_t>(cell.nu_true),
                      static_cast<std::uint64_t>(replication)});
}

}  // namespace

StudyGrid StudyGrid::paper() {
  StudyGrid g;
  g.m_values = {5, 10, 20};
  g.T_values = {30, 100};
  g.nu_true_map = {{5, {5, 10, 15}}, {10, {10, 15, 20}}, {20, {20, 24, 26}}};
  g.replications = 250;
  return g;
}

StudyGrid StudyGrid::desk() {
  StudyGrid g = paper();
  g.m_values = {5, 10};
  g.T_values = {30};
  g.replications = 50;
  return g;
}

std::vector<StudyCell> StudyGrid::cells() const {
  std::vector<StudyCell> out;
  for (int m : m_values) {
    const auto it = nu_true_map.find(m);
    if (it == nu_true_map.end()) continue;
    for (int T : T_values) {
      for (int nu : it->second) out.push_back({m, T, nu});
    }
  }
  return out;
}

void StudyGrid::validate() const {
  if (m_values.empty() || T_values.empty()) throw ConfigError("study grid: empty m or T list");
  if (replications < 1) throw ConfigError("study grid: replications must be >= 1");
  if (p < 1) throw ConfigError("study grid: lag order must be >= 1");
  for (int m : m_values) {
    const auto it = nu_true_map.find(m);
    if (it == nu_true_map.end() || it->second.empty()) {
      throw ConfigError("study grid: no nu_true values for m=" + std::to_string(m));
    }
    for (int nu : it->second) {
      if (nu < m) {
        throw ConfigError("study grid: nu_true=" + std::to_string(nu) + " below m=" +
                          std::to_string(m));
      }
    }
  }
  for (int T : T_values) {
    if (T < p + 2) throw ConfigError("study grid: T must be >= p + 2");
  }
  if (!(std::fabs(coef_diagonal) < 1.0)) {
    throw ConfigError("study grid: |coef_diagonal| must be < 1 for a stationary VAR");
  }
}

std::string_view scheme_name(Scheme s) { return s == Scheme::kFixed ? "fixed" : "loss"; }

double rmad(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw DomainError("rmad: shape mismatch");
  }
  if (estimate.size() == 0) throw DomainError("rmad: empty matrices");
  return std::sqrt((estimate - truth).cwiseAbs().mean());
}

std::vector<RmadSample> run_replication(const StudyGrid& grid, const StudyCell& cell,
                                        int replication, const SamplerConfig& config,
                                        int attempt) {
  const RngStream base = config.rng.child(cell_key(cell, replication))
                             .child(static_cast<std::uint64_t>(attempt));
  SimulationSpec spec;
  spec.m = cell.m;
  spec.T = cell.T;
  spec.lags.push_back(grid.coef_diagonal * Eigen::MatrixXd::Identity(cell.m, cell.m));
  for (int j = 1; j < grid.p; ++j) spec.lags.push_back(Eigen::MatrixXd::Zero(cell.m, cell.m));
  spec.sigma = InverseWishartSource{cell.nu_true, grid.sigma_scale};
  RngStream data_stream = base.child(0);
  const SimulatedVar sim = simulate_var(spec, data_stream);
  const LagDesign design = build_lag_design(sim.data, grid.p, false);

  std::vector<RmadSample> out;
  for (Scheme scheme : {Scheme::kFixed, Scheme::kLossBased}) {
    const NuScheme nu_scheme =
        scheme == Scheme::kFixed ? NuScheme{FixedNu{cell.m + 1}} : NuScheme{LossBasedNu{}};
    const auto prior = NormalWishartPrior::standard(cell.m, design.k(), nu_scheme, grid.v0_scale);
    SamplerConfig local = config;
    local.rng = base.child(1);  // identical sampler stream for both schemes
    const PosteriorSummary summary = summarize(run_gibbs(design, prior, local));
    const Eigen::MatrixXd a_mean = devectorize(summary.alpha_mean, design.k(), design.m());
    out.push_back({cell, replication, scheme, rmad(summary.sigma_mean, sim.truth.Sigma.matrix()),
                   rmad(a_mean, sim.truth.A)});
  }
  return out;
}

StudyResult run_study(const StudyGrid& grid, const SamplerConfig& config,
                      const StudyOptions& options) {
  grid.validate();
  config.validate();
  const std::vector<StudyCell> cells = grid.cells();
  const std::size_t reps = static_cast<std::size_t>(grid.replications);
  const std::size_t tasks = cells.size() * reps;
  std::vector<std::vector<RmadSample>> slots(tasks);
  std::vector<std::string> logs(tasks);

  parallel_for(tasks, options.threads, [&](std::size_t task) {
    const StudyCell& cell = cells[task / reps];
    const int rep = static_cast<int>(task % reps);
    std::string log;
    for (int attempt = 0;; ++attempt) {
      try {
        slots[task] = run_replication(grid, cell, rep, config, attempt);
        break;
      } catch (const std::exception& e) {
        log += "m=" + std::to_string(cell.m) + " T=" + std::to_string(cell.T) +
               " nu_true=" + std::to_string(cell.nu_true) + " replication " +
               std::to_string(rep) + " attempt " + std::to_string(attempt) +
               " failed: " + e.what() + "\n";
        if (attempt >= options.max_retries) {
          throw NumericalError("replication failed after retries:\n" + log);
        }
      }
    }
    logs[task] = std::move(log);
  });

  StudyResult result;
  result.samples.reserve(tasks * 2);
  for (std::size_t t = 0; t < tasks; ++t) {
    for (auto& s : slots[t]) result.samples.push_back(s);
    if (!logs[t].empty()) result.log.push_back(logs[t]);
  }
  return result;
}

std::string boxplot_csv(const std::vector<RmadSample>& samples) {
  std::string out(kBoxplotHeader);
  out += '\n';
  for (const auto& s : samples) {
    out += std::to_string(s.cell.m) + ',' + std::to_string(s.cell.T) + ',' +
           std::to_string(s.cell.nu_true) + ',' + std::string(scheme_name(s.scheme)) + ',' +
           std::to_string(s.replication) + ',' + format_double(s.rmad_sigma) + ',' +
           format_double(s.rmad_coeffs) + '\n';
  }
  return out;
}

std::vector<RmadSample> parse_boxplot_csv(std::string_view text) {
  std::vector<RmadSample> out;
  std::size_t start = 0;
  int line_number = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    if (line_number++ == 0) {
      if (line != kBoxplotHeader) throw ParseError("boxplot CSV: unexpected header");
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 7) {
      throw ParseError("boxplot CSV: line " + std::to_string(line_number) + " has " +
                       std::to_string(f.size()) + " fields");
    }
    if (f[3] != "fixed" && f[3] != "loss") throw ParseError("boxplot CSV: unknown scheme " + f[3]);
    RmadSample s{{std::stoi(f[0]), std::stoi(f[1]), std::stoi(f[2])},
                 std::stoi(f[4]),
                 f[3] == "fixed" ? Scheme::kFixed : Scheme::kLossBased,
                 std::stod(f[5]),
                 std::stod(f[6])};
    out.push_back(s);
  }
  return out;
}

void export_boxplot_data(const std::vector<RmadSample>& samples,
                         const std::filesystem::path& path) {
  if (samples.empty()) throw DomainError("export_boxplot_data: no samples");
  try {
    write_text_file(path, boxplot_csv(samples));
  } catch (const std::exception& e) {
    throw std::runtime_error("export_boxplot_data: " + path.string() + ": " + e.what());
  }
}

nlohmann::json study_manifest(const StudyGrid& grid, const SamplerConfig& config) {
  nlohmann::json nu_map = nlohmann::json::object();
  for (const auto& [m, values] : grid.nu_true_map) nu_map[std::to_string(m)] = values;
  return {
      {"software", {{"name", "bvarnu"}, {"version", kVersion}}},
      {"grid",
       {{"m_values", grid.m_values},
        {"T_values", grid.T_values},
        {"nu_true", nu_map},
        {"replications", grid.replications},
        {"p", grid.p},
        {"coef_diagonal", grid.coef_diagonal},
        {"sigma_scale", grid.sigma_scale == InverseWishartScale::kPriorMatched ? "prior-matched"
                                                                                 : "unit-mean"},
        {"v0_scale", grid.v0_scale}}},
      {"sampler",
       {{"iterations", config.iterations},
        {"burn_in", config.burn_in},
        {"thin", config.thin},
        {"mh_step", config.mh_step}}},
      {"seed", config.rng.seed()},
      {"stream_id", config.rng.stream_id()},
      {"fixed_scheme", "nu = m + 1"},
      {"prior", {{"alpha0", "0"}, {"V0", "v0_scale * I"}, {"S0", "I"}}},
      {"rmad_entries", {{"sigma", "m*m"}, {"coeffs", "k*m with k = m*p"}}},
  };
}

double median_rmad_sigma(const std::vector<RmadSample>& samples, const StudyCell& cell,
                         Scheme scheme) {
  std::vector<double> values;
  for (const auto& s : samples) {
    if (same_cell(s.cell, cell) && s.scheme == scheme) values.push_back(s.rmad_sigma);
  }
  return median(values);
}

double median_sigma_advantage(const std::vector<RmadSample>& samples, const StudyCell& cell) {
  std::map<int, double> fixed;
  std::map<int, double> loss;
  for (const auto& s : samples) {
    if (!same_cell(s.cell, cell)) continue;
    (s.scheme == Scheme::kFixed ? fixed : loss)[s.replication] = s.rmad_sigma;
  }
  std::vector<double> diffs;
  for (const auto& [rep, value] : fixed) {
    const auto it = loss.find(rep);
    if (it != loss.end()) diffs.push_back(value - it->second);
  }
  return median(diffs);
}

}  // namespace bvarnu
