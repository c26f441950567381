#include "appcli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bvarnu/csvio.hpp"
#include "bvarnu/errors.hpp"
#include "bvarnu/forecastkit.hpp"
#include "bvarnu/inference.hpp"
#include "bvarnu/lossprior.hpp"
#include "bvarnu/mcstudy.hpp"
#include "bvarnu/parallel.hpp"
#include "bvarnu/varcore.hpp"
#include "bvarnu/version.hpp"

namespace bvarnu::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Resolved configuration in a stable key order. Written back out in the same
// flat `key = value` form that --config reads, so a bundle can be replayed.
class Resolved {
 public:
  void add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, '"' + value + '"');
    values_[key] = value;
  }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, bool value) {
    entries_.emplace_back(key, value ? "true" : "false");
    values_[key] = value;
  }
  template <typename Number>
  void add(const std::string& key, Number value) {
    if constexpr (std::is_floating_point_v<Number>) {
      entries_.emplace_back(key, format_double(value));
    } else {
      entries_.emplace_back(key, std::to_string(value));
    }
    values_[key] = value;
  }

  std::string text(const std::string& command) const {
    std::string out = "# bvarnu " + command + " (resolved configuration)\n";
    for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
    return out;
  }
  const json& values() const { return values_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  json values_ = json::object();
};

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

// Output directory plus the manifest that ends up in it, whether or not the
// command succeeds.
class Bundle {
 public:
  Bundle(const std::string& dir, const std::string& command, const Resolved& resolved)
      : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw ConfigError("cannot create output directory '" + dir + "'");
    }
    manifest_ = {{"command", command},
                 {"software", {{"name", "bvarnu"}, {"version", kVersion}}},
                 {"config", resolved.values()},
                 {"status", "running"}};
    write_text_file(dir_ / "resolved.conf", resolved.text(command));
  }

  fs::path path(const std::string& name) const { return dir_ / name; }
  json& manifest() { return manifest_; }

  void run(const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      manifest_["status"] = "failed";
      manifest_["error"] = e.what();
      write_json(dir_ / "manifest.json", manifest_);
      throw;
    }
    manifest_["status"] = "ok";
    write_json(dir_ / "manifest.json", manifest_);
  }

 private:
  fs::path dir_;
  json manifest_;
};

void add_config_option(CLI::App* app) {
  // consumed by expand_config before parsing; registered for --help
  app->add_option("--config", "Flat key = value file; command-line flags take precedence");
}

struct RunArgs {
  std::uint64_t seed = 1;
  std::string out;
  int threads = default_thread_count();
};

struct SamplerArgs {
  int iterations = 6000;
  int burn_in = 1000;
  int thin = 1;
  int mh_step = 3;
  double v0_scale = 10.0;
};

struct DataArgs {
  std::string path;
  std::string transform = "none";
  std::string date_column;
  std::string frequency;
  bool intercept = false;
};

void add_run_options(CLI::App* app, RunArgs& a) {
  add_config_option(app);
  app->add_option("--seed", a.seed, "Master seed")->capture_default_str();
  app->add_option("--out", a.out, "Output directory")->required();
  app->add_option("--threads", a.threads, "Worker threads")->check(CLI::PositiveNumber);
}

void add_sampler_options(CLI::App* app, SamplerArgs& a) {
  app->add_option("--iterations", a.iterations, "Gibbs sweeps")->capture_default_str();
  app->add_option("--burn-in", a.burn_in, "Discarded leading sweeps")->capture_default_str();
  app->add_option("--thin", a.thin, "Keep every n-th sweep")->capture_default_str();
  app->add_option("--mh-step", a.mh_step, "Half-width of the nu proposal")->capture_default_str();
  app->add_option("--v0-scale", a.v0_scale, "Coefficient prior variance")->capture_default_str();
}

void add_data_options(CLI::App* app, DataArgs& a) {
  app->add_option("--data", a.path, "Input CSV (header row, numeric body)")->required();
  app->add_option("--transform", a.transform,
                  "none|diff|log|logdiff|pct, one for all columns or a comma list")
      ->capture_default_str();
  app->add_option("--date-column", a.date_column, "Label column carried through as row labels");
  app->add_option("--frequency", a.frequency, "Free-form frequency tag");
  app->add_flag("--intercept", a.intercept, "Include a constant in each equation");
}

void echo(Resolved& r, const RunArgs& a) { r.add("seed", a.seed); }

void echo(Resolved& r, const SamplerArgs& a) {
  r.add("iterations", a.iterations);
  r.add("burn-in", a.burn_in);
  r.add("thin", a.thin);
  r.add("mh-step", a.mh_step);
  r.add("v0-scale", a.v0_scale);
}

void echo(Resolved& r, const DataArgs& a) {
  r.add("data", a.path);
  r.add("transform", a.transform);
  if (!a.date_column.empty()) r.add("date-column", a.date_column);
  if (!a.frequency.empty()) r.add("frequency", a.frequency);
  r.add("intercept", a.intercept);
}

SamplerConfig sampler_config(const SamplerArgs& s, const RunArgs& r) {
  SamplerConfig cfg;
  cfg.iterations = s.iterations;
  cfg.burn_in = s.burn_in;
  cfg.thin = s.thin;
  cfg.mh_step = s.mh_step;
  cfg.rng = RngStream(r.seed);
  cfg.validate();
  if (!(s.v0_scale > 0.0)) throw ConfigError("--v0-scale must be positive");
  return cfg;
}

NuScheme parse_nu_scheme(const std::string& text) {
  if (text == "loss") return LossBasedNu{};
  if (text.rfind("fixed:", 0) == 0) {
    try {
      std::size_t used = 0;
      const int nu = std::stoi(text.substr(6), &used);
      if (used == text.size() - 6) return FixedNu{nu};
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("--nu-scheme must be 'loss' or 'fixed:<int>', got '" + text + "'");
}

InverseWishartScale parse_sigma_scale(const std::string& text) {
  if (text == "prior-matched") return InverseWishartScale::kPriorMatched;
  if (text == "unit-mean") return InverseWishartScale::kUnitMean;
  throw ConfigError("--sigma-scale must be 'prior-matched' or 'unit-mean'");
}

VarDataset load_data(const DataArgs& a) {
  CsvOptions opts;
  opts.transform = SeriesTransform::parse(a.transform);
  if (!a.date_column.empty()) opts.date_column = a.date_column;
  opts.frequency = a.frequency;
  return ingest_csv(a.path, opts);
}

json matrix_json(const Eigen::MatrixXd& x) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < x.cols(); ++j) row.push_back(x(i, j));
    rows.push_back(row);
  }
  return rows;
}

json nu_json(const NuSummary& s) {
  return {{"nu_mean", s.mean}, {"nu_hpd_low", s.hpd_low}, {"nu_hpd_high", s.hpd_high},
          {"nu_hpd_set", s.hpd_set}};
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  RunArgs run;
  int m = 3;
  int T = 100;
  int p = 1;
  double coef = 0.5;
  int nu_true = 0;
  std::string sigma_scale = "prior-matched";
  int warmup = 100;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.m < 1) throw ConfigError("--m must be >= 1");
  if (a.p < 1) throw ConfigError("--lags must be >= 1");
  if (a.T < a.p + 2) throw ConfigError("--T must be at least lags + 2");
  if (a.warmup < 0) throw ConfigError("--warmup must be >= 0");
  if (a.nu_true != 0 && a.nu_true < a.m) throw ConfigError("--nu-true must be 0 (Sigma = I) or >= m");
  const InverseWishartScale scale = parse_sigma_scale(a.sigma_scale);

  SimulationSpec spec;
  spec.m = a.m;
  spec.T = a.T;
  spec.warmup = a.warmup;
  spec.lags.push_back(a.coef * Eigen::MatrixXd::Identity(a.m, a.m));
  for (int j = 1; j < a.p; ++j) spec.lags.push_back(Eigen::MatrixXd::Zero(a.m, a.m));
  if (companion_spectral_radius(spec.lags) >= 1.0) {
    throw ConfigError("--coef gives a non-stationary VAR");
  }
  if (a.nu_true > 0) {
    spec.sigma = InverseWishartSource{a.nu_true, scale};
  } else {
    spec.sigma = SpdMatrix::identity(a.m);
  }

  Resolved r;
  echo(r, a.run);
  r.add("m", a.m);
  r.add("T", a.T);
  r.add("lags", a.p);
  r.add("coef", a.coef);
  r.add("nu-true", a.nu_true);
  r.add("sigma-scale", a.sigma_scale);
  r.add("warmup", a.warmup);

  Bundle bundle(a.run.out, "simulate", r);
  bundle.run([&] {
    RngStream rng(a.run.seed);
    const SimulatedVar sim = simulate_var(spec, rng);
    write_text_file(bundle.path("data.csv"), dataset_csv(sim.data));
    json truth = {{"A", matrix_json(sim.truth.A)},
                  {"Sigma", matrix_json(sim.truth.Sigma.matrix())},
                  {"p", sim.p},
                  {"spectral_radius", companion_spectral_radius(spec.lags)}};
    if (a.nu_true > 0) truth["nu_true"] = a.nu_true;
    write_json(bundle.path("truth.json"), truth);
    bundle.manifest()["outputs"] = {"data.csv", "truth.json"};
  });
  out << "simulate: wrote " << a.T << " x " << a.m << " dataset to " << a.run.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  RunArgs run;
  SamplerArgs sampler;
  DataArgs data;
  int p = 1;
  std::string nu_scheme = "loss";
};

std::string draws_header(const std::string& prefix, int rows, int cols, bool lower_only) {
  std::string out = "draw";
  for (int j = 0; j < cols; ++j) {
    for (int i = lower_only ? j : 0; i < rows; ++i) {
      out += "," + prefix + "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
    }
  }
  return out + "\n";
}

int cmd_fit(const FitArgs& a, std::ostream& out) {
  if (a.p < 1) throw ConfigError("--lags must be >= 1");
  const NuScheme scheme = parse_nu_scheme(a.nu_scheme);
  SamplerConfig cfg = sampler_config(a.sampler, a.run);
  const VarDataset data = load_data(a.data);
  if (data.T() < a.p + 2) throw ConfigError("data has too few rows for the requested lag order");
  const LagDesign design = build_lag_design(data, a.p, a.data.intercept);
  const auto prior = NormalWishartPrior::standard(data.m(), design.k(), scheme, a.sampler.v0_scale);

  Resolved r;
  echo(r, a.run);
  echo(r, a.data);
  echo(r, a.sampler);
  r.add("lags", a.p);
  r.add("nu-scheme", describe(scheme));

  std::optional<NuSummary> nu;
  Bundle bundle(a.run.out, "fit", r);
  bundle.run([&] {
    const PosteriorDraws draws = run_gibbs(design, prior, cfg);
    const PosteriorSummary s = summarize(draws);
    nu = s.nu;
    const int k = design.k(), m = design.m();

    json summary = {{"nu_scheme", describe(scheme)},
                    {"draws", s.draws},
                    {"mh_acceptance", s.mh_acceptance_rate},
                    {"variables", data.variable_names},
                    {"alpha_mean", matrix_json(devectorize(s.alpha_mean, k, m))},
                    {"sigma_mean", matrix_json(s.sigma_mean)}};
    if (s.nu) summary.update(nu_json(*s.nu));
    write_json(bundle.path("summary.json"), summary);

    std::string alpha = draws_header("A", k, m, false);
    std::string sigma = draws_header("Sigma", m, m, true);
    for (std::size_t d = 0; d < draws.size(); ++d) {
      alpha += std::to_string(d);
      for (Eigen::Index i = 0; i < draws.alpha_draws[d].size(); ++i) {
        alpha += "," + format_double(draws.alpha_draws[d](i));
      }
      alpha += "\n";
      sigma += std::to_string(d);
      for (int j = 0; j < m; ++j) {
        for (int i = j; i < m; ++i) sigma += "," + format_double(draws.sigma_draws[d](i, j));
      }
      sigma += "\n";
    }
    write_text_file(bundle.path("alpha_draws.csv"), alpha);
    write_text_file(bundle.path("sigma_draws.csv"), sigma);
    json outputs = {"summary.json", "alpha_draws.csv", "sigma_draws.csv"};
    if (!draws.nu_draws.empty()) {
      std::string nus = "draw,nu\n";
      for (std::size_t d = 0; d < draws.nu_draws.size(); ++d) {
        nus += std::to_string(d) + "," + std::to_string(draws.nu_draws[d]) + "\n";
      }
      write_text_file(bundle.path("nu_draws.csv"), nus);
      outputs.push_back("nu_draws.csv");
    }
    bundle.manifest()["outputs"] = outputs;
  });
  out << "fit: " << cfg.retained() << " draws";
  if (nu) out << ", nu mean " << nu->mean << " HPD [" << nu->hpd_low << ", " << nu->hpd_high << "]";
  out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- forecast

struct ForecastArgs {
  RunArgs run;
  SamplerArgs sampler;
  DataArgs data;
  int p = 0;
  int window = 0;
  int fixed_nu = 0;
  int n_draws = 0;
};

int cmd_forecast(const ForecastArgs& a, std::ostream& out) {
  if (a.p < 1) throw ConfigError("--lags must be >= 1");
  SamplerConfig cfg = sampler_config(a.sampler, a.run);
  const VarDataset data = load_data(a.data);
  const RollingPlan plan = RollingPlan::full(data.T(), a.window);
  plan.validate(data.T(), a.p);
  const int m = data.m();
  const int fixed_nu = a.fixed_nu > 0 ? a.fixed_nu : m + 1;
  if (fixed_nu < m) throw ConfigError("--fixed-nu must be >= m");
  if (a.n_draws < 0 || a.n_draws > cfg.retained()) {
    throw ConfigError("--n-draws must be between 0 and the retained draw count");
  }
  const int k = regressor_count(m, a.p, a.data.intercept);
  const auto fixed_prior = NormalWishartPrior::standard(m, k, FixedNu{fixed_nu}, a.sampler.v0_scale);
  const auto loss_prior = NormalWishartPrior::standard(m, k, LossBasedNu{}, a.sampler.v0_scale);

  Resolved r;
  echo(r, a.run);
  echo(r, a.data);
  echo(r, a.sampler);
  r.add("lags", a.p);
  r.add("window", a.window);
  r.add("fixed-nu", fixed_nu);
  r.add("n-draws", a.n_draws);

  int windows = 0;
  Bundle bundle(a.run.out, "forecast", r);
  bundle.run([&] {
    RollingOptions opts;
    opts.threads = a.run.threads;
    opts.n_draws = a.n_draws;
    RollingResult fixed = rolling_forecast(data, a.p, a.data.intercept, fixed_prior, plan, cfg, opts);
    RollingResult loss = rolling_forecast(data, a.p, a.data.intercept, loss_prior, plan, cfg, opts);
    align_records(fixed.records, loss.records);
    if (fixed.records.empty()) throw NumericalError("every rolling window failed");
    const MetricReport report = compare_priors(fixed.records, loss.records, data.variable_names);
    windows = report.windows;

    write_text_file(bundle.path("metrics.csv"), metric_report_csv(report));
    write_json(bundle.path("metrics.json"), to_json(report));
    write_text_file(bundle.path("nu_trajectory.csv"), nu_trajectory_csv(loss.records, data.row_labels));

    std::string fc = "window,origin_time,variable,realized,point_fixed,point_loss,crps_fixed,crps_loss\n";
    for (std::size_t w = 0; w < fixed.records.size(); ++w) {
      const auto& f = fixed.records[w];
      const auto& l = loss.records[w];
      for (int i = 0; i < m; ++i) {
        fc += std::to_string(f.window_index) + "," + std::to_string(f.origin_time) + "," +
              data.variable_names[static_cast<std::size_t>(i)] + "," + format_double(f.realized(i)) +
              "," + format_double(f.point_forecast(i)) + "," + format_double(l.point_forecast(i)) +
              "," + format_double(crps(f, i)) + "," + format_double(crps(l, i)) + "\n";
      }
    }
    write_text_file(bundle.path("forecasts.csv"), fc);

    json warnings = fixed.warnings;
    for (const auto& w : loss.warnings) warnings.push_back(w);
    bundle.manifest()["windows"] = {{"planned", plan.count()},
                                    {"scored", report.windows},
                                    {"skipped_fixed", fixed.skipped_windows},
                                    {"skipped_loss", loss.skipped_windows}};
    bundle.manifest()["warnings"] = warnings;
    bundle.manifest()["outputs"] = {"metrics.csv", "metrics.json", "nu_trajectory.csv", "forecasts.csv"};
  });
  out << "forecast: " << windows << " windows scored, report in " << a.run.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- study

struct StudyArgs {
  RunArgs run;
  SamplerArgs sampler;
  std::string preset = "desk";
  int replications = 0;
  int p = 1;
  double coef = 0.5;
  std::string sigma_scale = "prior-matched";
};

int cmd_study(const StudyArgs& a, std::ostream& out) {
  StudyGrid grid;
  if (a.preset == "desk") {
    grid = StudyGrid::desk();
  } else if (a.preset == "full") {
    grid = StudyGrid::paper();
  } else {
    throw ConfigError("--preset must be 'desk' or 'full'");
  }
  if (a.replications < 0) throw ConfigError("--replications must be >= 0");
  if (a.replications > 0) grid.replications = a.replications;
  grid.p = a.p;
  grid.coef_diagonal = a.coef;
  grid.sigma_scale = parse_sigma_scale(a.sigma_scale);
  grid.v0_scale = a.sampler.v0_scale;
  grid.validate();
  const SamplerConfig cfg = sampler_config(a.sampler, a.run);

  Resolved r;
  echo(r, a.run);
  echo(r, a.sampler);
  r.add("preset", a.preset);
  r.add("replications", grid.replications);
  r.add("lags", a.p);
  r.add("coef", a.coef);
  r.add("sigma-scale", a.sigma_scale);

  std::size_t rows = 0;
  Bundle bundle(a.run.out, "study", r);
  bundle.run([&] {
    StudyOptions opts;
    opts.threads = a.run.threads;
    const StudyResult result = run_study(grid, cfg, opts);
    rows = result.samples.size();
    export_boxplot_data(result.samples, bundle.path("rmad.csv"));

    json cells = json::array();
    for (const auto& cell : grid.cells()) {
      cells.push_back({{"m", cell.m},
                       {"T", cell.T},
                       {"nu_true", cell.nu_true},
                       {"median_rmad_sigma_fixed", median_rmad_sigma(result.samples, cell, Scheme::kFixed)},
                       {"median_rmad_sigma_loss", median_rmad_sigma(result.samples, cell, Scheme::kLossBased)},
                       {"median_sigma_advantage", median_sigma_advantage(result.samples, cell)}});
    }
    json& manifest = bundle.manifest();
    manifest["study"] = study_manifest(grid, cfg);
    manifest["cells"] = cells;
    manifest["retries"] = result.log;
    manifest["outputs"] = {"rmad.csv"};
  });
  out << "study: " << rows << " rows written to " << a.run.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string out;
  int m_max = 15;
  int offset_max = 25;
  int c_max = 5;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  if (a.m_max < 2 || a.offset_max < 1 || a.c_max < 1) {
    throw ConfigError("verify: --m-max >= 2, --offset-max >= 1 and --c-max >= 1 required");
  }
  Resolved r;
  r.add("m-max", a.m_max);
  r.add("offset-max", a.offset_max);
  r.add("c-max", a.c_max);
  bool pass = false;
  Bundle bundle(a.out, "verify", r);
  bundle.run([&] {
    const auto t1 = lossprior::verify_theorem1({2, a.m_max}, {1, a.offset_max}, {-a.c_max, a.c_max});
    write_json(bundle.path("theorem1.json"), lossprior::to_json(t1));
    const auto proper = lossprior::properness_diagnostic(3, SpdMatrix::scaled_identity(3, 5.0),
                                                         SpdMatrix::identity(3), 3 + 500);
    write_json(bundle.path("properness.json"), lossprior::to_json(proper));
    pass = t1.pass && proper.ratio_strictly_decreasing;
    bundle.manifest()["theorem1"] = {{"exceptions", t1.exceptions}, {"pass", t1.pass}};
    bundle.manifest()["properness"] = {{"ratio_strictly_decreasing", proper.ratio_strictly_decreasing},
                                       {"tail_mass", proper.tail_mass}};
    bundle.manifest()["outputs"] = {"theorem1.json", "properness.json"};
  });
  out << "verify: " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitOk : kExitRuntime;
}


// Splices `key = value` lines from a --config file into the argument list
// directly after the subcommand, so flags given on the command line (later
// in the list, take-last policy) override the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::string text;
    try {
      text = read_text_file(path);
    } catch (const std::exception&) {
      throw ConfigError("cannot read config file '" + path + "'");
    }
    std::istringstream lines(text);
    std::string line;
    int number = 0;
    while (std::getline(lines, line)) {
      ++number;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(path + ":" + std::to_string(number) + ": expected key = value");
      }
      auto strip = [](std::string v) {
        const auto b = v.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        v = v.substr(b, v.find_last_not_of(" \t\r") - b + 1);
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
        return v;
      };
      const std::string key = strip(line.substr(0, eq));
      const std::string value = strip(line.substr(eq + 1));
      if (key.empty()) throw ConfigError(path + ":" + std::to_string(number) + ": empty key");
      if (value == "true") {
        from_file.push_back("--" + key);
      } else if (value != "false") {
        from_file.push_back("--" + key);
        from_file.push_back(value);
      }
    }
  }
  if (from_file.empty()) return rest;
  std::vector<std::string> out;
  bool spliced = false;
  for (const auto& a : rest) {
    out.push_back(a);
    if (!spliced && !a.empty() && a.front() != '-') {
      out.insert(out.end(), from_file.begin(), from_file.end());
      spliced = true;
    }
  }
  if (!spliced) throw ConfigError("--config given without a subcommand");
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(args);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }

  CLI::App app{"Bayesian VAR with a loss-based prior on the Wishart degrees of freedom", "bvarnu"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  FitArgs fit;
  ForecastArgs fc;
  StudyArgs study;
  VerifyArgs verify;

  auto* s = app.add_subcommand("simulate", "Generate a synthetic VAR dataset");
  add_run_options(s, sim.run);
  s->add_option("--m", sim.m, "Number of series")->capture_default_str();
  s->add_option("--T", sim.T, "Observations kept after warm-up")->capture_default_str();
  s->add_option("-p,--lags", sim.p, "Lag order")->capture_default_str();
  s->add_option("--coef", sim.coef, "A_1 = coef * I")->capture_default_str();
  s->add_option("--nu-true", sim.nu_true, "Inverse-Wishart nu for Sigma (0: Sigma = I)")->capture_default_str();
  s->add_option("--sigma-scale", sim.sigma_scale, "prior-matched|unit-mean")->capture_default_str();
  s->add_option("--warmup", sim.warmup, "Discarded warm-up steps")->capture_default_str();

  auto* f = app.add_subcommand("fit", "Run the Gibbs sampler once and summarize the posterior");
  add_run_options(f, fit.run);
  add_data_options(f, fit.data);
  add_sampler_options(f, fit.sampler);
  f->add_option("-p,--lags", fit.p, "Lag order")->capture_default_str();
  f->add_option("--nu-scheme", fit.nu_scheme, "loss or fixed:<int>")->capture_default_str();

  auto* r = app.add_subcommand("forecast", "Rolling one-step forecasts under both priors");
  add_run_options(r, fc.run);
  add_data_options(r, fc.data);
  add_sampler_options(r, fc.sampler);
  r->add_option("-p,--lags", fc.p, "Lag order")->required();
  r->add_option("--window", fc.window, "Rolling window length R")->required();
  r->add_option("--fixed-nu", fc.fixed_nu, "nu of the fixed prior (default m + 1)");
  r->add_option("--n-draws", fc.n_draws, "Predictive draws per window (0: all retained)");

  auto* st = app.add_subcommand("study", "Monte Carlo comparison of the two priors");
  add_run_options(st, study.run);
  add_sampler_options(st, study.sampler);
  st->add_option("--preset", study.preset, "desk|full")->capture_default_str();
  st->add_option("--replications", study.replications, "Override the preset's replications");
  st->add_option("-p,--lags", study.p, "Lag order")->capture_default_str();
  st->add_option("--coef", study.coef, "A_1 = coef * I")->capture_default_str();
  st->add_option("--sigma-scale", study.sigma_scale, "prior-matched|unit-mean")->capture_default_str();

  auto* v = app.add_subcommand("verify", "Numerical checks of the prior's construction");
  add_config_option(v);
  v->add_option("--out", verify.out, "Output directory")->required();
  v->add_option("--m-max", verify.m_max)->capture_default_str();
  v->add_option("--offset-max", verify.offset_max)->capture_default_str();
  v->add_option("--c-max", verify.c_max)->capture_default_str();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*s) return cmd_simulate(sim, out);
    if (*f) return cmd_fit(fit, out);
    if (*r) return cmd_forecast(fc, out);
    if (*st) return cmd_study(study, out);
    if (*v) return cmd_verify(verify, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"bvarnu"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace bvarnu::cli
