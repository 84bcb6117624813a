#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdemle/errors.hpp"
#include "sdemle/estimate.hpp"
#include "sdemle/montecarlo.hpp"
#include "sdemle/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sdemle;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitGate = 3;

/// Mutable mirror of ExperimentConfig with string-typed enums for CLI11.
struct ConfigShadow {
  std::string model = "quartic";
  std::vector<double> theta{1.0};
  std::vector<double> bounds_lower;
  std::vector<double> bounds_upper;
  double T = 1000.0;
  double h = 0.01;
  double delta = 0.75;
  std::string method = "one_step";
  std::string tau_grid = "default";
  int replicates = 1;
  std::uint64_t seed = 1;
  std::string fisher = "quadrature";
  std::string init = "stationary";
  double x0 = 0.0;
  bool noise_free = false;
  bool standardize_at_estimate = false;
  int threads = 0;
  int mle_grid_points = 24;

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    cfg.model_id = model;
    cfg.theta_true = theta;
    cfg.bounds_lower = bounds_lower;
    cfg.bounds_upper = bounds_upper;
    cfg.T = T;
    cfg.h = h;
    cfg.delta = delta;
    cfg.method = parse_method(method);
    cfg.tau_grid = TauGridSpec::parse(tau_grid);
    cfg.replicates = replicates;
    cfg.seed = seed;
    cfg.fisher_mode = parse_fisher_mode(fisher);
    cfg.init = parse_init_mode(init);
    cfg.x0 = x0;
    cfg.noise_free = noise_free;
    cfg.standardize_at_estimate = standardize_at_estimate;
    cfg.threads = threads;
    cfg.mle_grid_points = mle_grid_points;
    cfg.validate();
    return cfg;
  }
};

/// Experiment options live on the app itself so that flat config-file keys
/// apply to every subcommand; a hidden configurable "bounds" subcommand
/// receives the [bounds] section.
void add_experiment_options(CLI::App& app, ConfigShadow& shadow) {
  app.set_help_flag("--help", "Print help");  // frees --h for the grid step
  app.add_option("--model", shadow.model, "Model id: quartic, quartic2d, ou")
      ->capture_default_str();
  app.add_option("--theta", shadow.theta, "True parameter (d values)")
      ->expected(1, 2)
      ->capture_default_str();
  app.add_option("--T", shadow.T, "Observation horizon")->capture_default_str();
  app.add_option("--h", shadow.h, "Grid step (at most 0.1)")->capture_default_str();
  app.add_option("--seed", shadow.seed, "Base seed; replicate i uses seed XOR i")
      ->capture_default_str();
  app.add_option("--init", shadow.init, "Initialization: stationary, burnin, fixed")
      ->capture_default_str();
  app.add_option("--x0", shadow.x0, "Start state for burnin/fixed init")->capture_default_str();
  app.add_option("--delta", shadow.delta,
                 "Learning exponent: one_step needs (1/2,1), two_step (1/4,1/2]")
      ->capture_default_str();
  app.add_option("--method", shadow.method,
                 "preliminary, one_step, two_step, second_preliminary, reference_mle")
      ->capture_default_str();
  app.add_option("--tau-grid", shadow.tau_grid,
                 "'default' (100 geometric-then-uniform points), 'uniform:K', or a comma list")
      ->capture_default_str();
  app.add_option("--fisher", shadow.fisher, "Fisher source: quadrature or empirical")
      ->capture_default_str();
  app.add_option("--replicates", shadow.replicates, "Replicate count")->capture_default_str();
  app.add_option("--threads", shadow.threads, "Worker threads (0 = hardware)")
      ->capture_default_str();
  app.add_option("--mle-grid-points", shadow.mle_grid_points,
                 "Grid points per dimension for reference_mle")
      ->capture_default_str();
  app.add_flag("--noise-free", shadow.noise_free, "Test hook: zero diffusion, fixed start");
  app.add_flag("--standardize-at-estimate", shadow.standardize_at_estimate,
               "Standardize with I(theta-hat) instead of I(theta_0)");
  app.add_option("--bounds.lower", shadow.bounds_lower,
                 "Lower bounds of Theta (default: model preset)")
      ->expected(1, 2);
  app.add_option("--bounds.upper", shadow.bounds_upper,
                 "Upper bounds of Theta (default: model preset)")
      ->expected(1, 2);

  CLI::App* bounds = app.add_subcommand("bounds", "");
  bounds->configurable();
  bounds->group("");  // config-file section only, hidden from help
  bounds->add_option("--lower", shadow.bounds_lower)->expected(1, 2);
  bounds->add_option("--upper", shadow.bounds_upper)->expected(1, 2);
}

std::string output_dir_of(const std::string& dir) {
  if (dir.empty()) return ".";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

void write_text(const std::string& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot open " + file + " for writing");
  out << text;
  if (!out) throw ConfigError("write failed for " + file);
}

json fisher_to_json(const FisherMatrix& f) {
  const int d = f.mat.dim();
  auto mat_rows = [&](const SymMatrix& m) {
    json rows = json::array();
    for (int r = 0; r < d; ++r) {
      json row = json::array();
      for (int c = 0; c < d; ++c) row.push_back(m.at(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  json j;
  j["theta"] = f.theta.to_vector();
  j["source"] = f.source == FisherMatrix::Source::quadrature ? "quadrature" : "empirical";
  j["information"] = mat_rows(f.mat);
  j["inverse"] = mat_rows(f.inv);
  j["inverse_sqrt"] = mat_rows(f.inv_sqrt);
  const auto ev = f.mat.eigenvalues();
  j["eigenvalues"] = d == 1 ? std::vector<double>{ev[0]} : std::vector<double>{ev[0], ev[1]};
  return j;
}

SamplePath make_path(const ExperimentConfig& cfg) {
  const DiffusionModel model = cfg.build_model();
  if (cfg.noise_free)
    return euler_maruyama_with_noise(model, cfg.theta(), cfg.x0, cfg.T, cfg.h,
                                     [](std::size_t) { return 0.0; });
  switch (cfg.init) {
    case InitMode::stationary:
      return simulate_stationary(model, cfg.theta(), cfg.T, cfg.h, cfg.seed);
    case InitMode::burnin:
      return simulate_burnin(model, cfg.theta(), cfg.x0, cfg.T, cfg.h, cfg.seed);
    case InitMode::fixed:
      return euler_maruyama(model, cfg.theta(), cfg.x0, cfg.T, cfg.h, cfg.seed);
  }
  throw ConfigError("invalid init mode");
}

int run_simulate(const ConfigShadow& shadow, const std::string& dir, const std::string& name,
                 const std::string& format, bool verbose) {
  const ExperimentConfig cfg = shadow.resolve();
  const SamplePath path = make_path(cfg);
  const std::string base = output_dir_of(dir) + "/" + name;
  if (format == "csv" || format == "both") write_path_csv(path, base + ".csv");
  if (format == "bin" || format == "both") write_path_binary(path, base + ".bin");
  if (format != "csv" && format != "bin" && format != "both")
    throw ConfigError("unknown format: " + format);
  if (verbose)
    std::cerr << "simulated " << path.n_steps() << " steps, horizon " << path.horizon() << "\n";
  std::cout << "path: " << base << (format == "both" ? ".{csv,bin}" : "." + format)
            << " steps=" << path.n_steps() << " seed=" << cfg.seed << "\n";
  return kExitOk;
}

int run_fisher(const ConfigShadow& shadow, const std::string& dir, const std::string& name) {
  const DiffusionModel model =
      shadow.bounds_lower.empty()
          ? make_model(shadow.model)
          : make_model(shadow.model, ParameterSpace{ParamVec::from(shadow.bounds_lower),
                                                    ParamVec::from(shadow.bounds_upper)});
  const ParamVec theta = ParamVec::from(shadow.theta);
  const FisherMatrix f = fisher_quadrature(model, theta);
  json j = fisher_to_json(f);
  j["schema_version"] = 1;
  j["model"] = model.id;
  std::cout << j.dump(2) << "\n";
  if (!name.empty()) write_text(output_dir_of(dir) + "/" + name, j.dump(2));
  return kExitOk;
}

int run_estimate(const ConfigShadow& shadow, const std::string& dir, const std::string& name) {
  const ExperimentConfig cfg = shadow.resolve();
  const DiffusionModel model = cfg.build_model();
  const SamplePath path = make_path(cfg);
  const double tau_delta = std::pow(cfg.T, cfg.delta - 1.0);
  const std::vector<double> grid = cfg.tau_grid.build(tau_delta);

  EstimateOptions opts;
  opts.fisher_mode = cfg.fisher_mode;
  EstimatorTrajectory traj;
  traj.delta = cfg.delta;
  traj.T = cfg.T;
  traj.h = cfg.h;
  traj.seed = cfg.seed;
  traj.model_id = model.id;
  traj.theta_true = path.theta_true;
  switch (cfg.method) {
    case EstimatorMethod::one_step:
      traj = one_step_process(model, path, cfg.delta, grid, opts);
      break;
    case EstimatorMethod::two_step:
      traj = two_step_process(model, path, cfg.delta, grid, opts);
      break;
    case EstimatorMethod::preliminary: {
      const PrelimResult p = model.preliminary(path, cfg.delta);
      traj.tau_grid = grid;
      traj.estimates.assign(grid.size(), p.value);
      traj.method = EstimatorMethod::preliminary;
      traj.preliminary = p.value;
      traj.clamped = p.clamped;
      break;
    }
    case EstimatorMethod::reference_mle: {
      traj.tau_grid = grid;
      traj.estimates.resize(grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k)
        traj.estimates[k] = reference_mle(model, path, grid[k], cfg.mle_grid_points).theta;
      traj.method = EstimatorMethod::reference_mle;
      traj.preliminary = traj.estimates.front();
      break;
    }
    default:
      throw ConfigError(
          "estimate subcommand supports preliminary, one_step, two_step, reference_mle");
  }

  const std::string base = output_dir_of(dir) + "/" + name;
  write_trajectory_csv(traj, base + ".csv");
  json wrapper = json::parse(trajectory_to_json(traj));
  wrapper["config"] = cfg.to_json();
  write_text(base + ".json", wrapper.dump(2));
  std::cout << "trajectory: " << base << ".{csv,json} method=" << to_string(traj.method)
            << " theta(1)=";
  for (int c = 0; c < traj.estimates.back().size(); ++c)
    std::cout << (c ? "," : "") << traj.estimates.back()[c];
  std::cout << "\n";
  return kExitOk;
}

bool gate_passes(const ReplicateStats& stats, std::string& detail) {
  // fixed-tau normality at tau = 1, plus Wiener-increment structure when the
  // quarter points are on the grid and enough replicates survived
  const std::size_t last = stats.tau_grid.size() - 1;
  bool ok = true;
  std::ostringstream os;
  for (int c = 0; c < stats.d; ++c) {
    const double mean =
        stats.mean_std[last * static_cast<std::size_t>(stats.d) + static_cast<std::size_t>(c)];
    const double vr = stats.variance_ratio[last * static_cast<std::size_t>(stats.d) +
                                           static_cast<std::size_t>(c)];
    if (std::abs(mean) >= 0.15 || vr < 0.8 || vr > 1.2) ok = false;
    os << "coord " << c << ": mean=" << mean << " var_ratio=" << vr << "; ";
  }
  const int n_ok = stats.m_total - static_cast<int>(stats.failed_replicates.size());
  bool has_quarters = true;
  for (double q : {0.25, 0.5, 0.75, 1.0}) {
    bool found = false;
    for (double t : stats.tau_grid) found = found || std::abs(t - q) <= 1e-9;
    has_quarters = has_quarters && found;
  }
  if (n_ok >= 100 && has_quarters) {
    const IncrementReport rep = wiener_increment_check(stats, {{{0.25, 0.5, 0.75, 1.0}}});
    if (!rep.all_pass) ok = false;
    os << "increments " << (rep.all_pass ? "pass" : "fail");
  }
  detail = os.str();
  return ok;
}

int run_montecarlo(const ConfigShadow& shadow, const std::string& dir, const std::string& name,
                   bool dump_replicates, bool gate, const std::string& preset,
                   bool replicates_given) {
  std::vector<std::pair<std::string, ExperimentConfig>> runs;
  if (preset.empty()) {
    runs.emplace_back(name, shadow.resolve());
  } else if (preset == "quartic-demo") {
    // quartic demo: one-step at delta = 3/4 and two-step at delta = 3/8
    ConfigShadow leg = shadow;
    leg.model = "quartic";
    leg.theta = {1.0};
    if (!replicates_given) leg.replicates = 100;
    leg.method = "one_step";
    leg.delta = 0.75;
    runs.emplace_back(name + "_one_step", leg.resolve());
    leg.method = "two_step";
    leg.delta = 0.375;
    runs.emplace_back(name + "_two_step", leg.resolve());
  } else {
    throw ConfigError("unknown preset: " + preset);
  }

  bool all_gates = true;
  for (const auto& [run_name, cfg] : runs) {
    const ReplicateStats stats = run_experiment(cfg);
    const std::string base = output_dir_of(dir) + "/" + run_name;
    write_text(base + ".json", stats.to_json(dump_replicates).dump(2));
    if (dump_replicates) {
      std::ostringstream os;
      os << "replicate,tau";
      for (int c = 0; c < stats.d; ++c) os << ",theta_" << (c + 1);
      os << "\n";
      char buf[40];
      for (int i = 0; i < stats.m_total; ++i) {
        if (stats.failed(i)) continue;
        for (std::size_t k = 0; k < stats.tau_grid.size(); ++k) {
          os << i;
          std::snprintf(buf, sizeof buf, ",%.17g", stats.tau_grid[k]);
          os << buf;
          for (int c = 0; c < stats.d; ++c) {
            std::snprintf(buf, sizeof buf, ",%.17g", stats.est(i, static_cast<int>(k), c));
            os << buf;
          }
          os << "\n";
        }
      }
      write_text(base + "_replicates.csv", os.str());
    }
    std::string detail;
    const bool pass = gate_passes(stats, detail);
    const std::size_t last = stats.tau_grid.size() - 1;
    std::cout << run_name << ": method=" << to_string(cfg.method) << " M=" << cfg.replicates
              << " failures=" << stats.failed_replicates.size()
              << " clamp_rate=" << static_cast<double>(stats.clamp_count) / cfg.replicates
              << " var_ratio(tau=1)=";
    for (int c = 0; c < stats.d; ++c)
      std::cout << (c ? "," : "")
                << stats.variance_ratio[last * static_cast<std::size_t>(stats.d) +
                                        static_cast<std::size_t>(c)];
    std::cout << " -> " << base << ".json\n";
    if (gate) {
      std::cout << "gate: " << (pass ? "PASS" : "FAIL") << " (" << detail << ")\n";
      all_gates = all_gates && pass;
    }
  }
  return gate && !all_gates ? kExitGate : kExitOk;
}

/// Build an ExperimentConfig from an INI file using the same option set as
/// the main app (flat keys plus the [bounds] section).
ExperimentConfig config_from_file(const std::string& file) {
  if (!fs::exists(file)) throw ConfigError("config file does not exist: " + file);
  ConfigShadow shadow;
  CLI::App app{"config loader"};
  add_experiment_options(app, shadow);
  app.set_config("--config");
  std::vector<std::string> args{"--config", file};
  std::reverse(args.begin(), args.end());  // CLI11 consumes args back to front
  app.parse(args);
  return shadow.resolve();
}

int run_compare(const std::vector<std::string>& files, const std::string& dir,
                const std::string& name) {
  std::vector<ExperimentConfig> configs;
  configs.reserve(files.size());
  for (const auto& f : files) configs.push_back(config_from_file(f));
  const EfficiencyReport report = efficiency_report(configs);
  std::cout << report.table();
  const std::string base = output_dir_of(dir) + "/" + name;
  write_text(base + ".json", report.to_json().dump(2));
  std::cout << "report: " << base << ".json\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sdemle: multi-step online drift estimation for ergodic scalar diffusions"};

  ConfigShadow shadow;
  std::string output_dir;
  std::string out_name;
  std::string format = "csv";
  std::string preset;
  std::vector<std::string> compare_files;
  bool dump_replicates = false;
  bool gate = false;
  bool verbose = false;

  add_experiment_options(app, shadow);
  app.set_config("--config", "", "INI config file: flat keys plus a [bounds] section")
      ->check(CLI::ExistingFile);
  app.add_option("--output-dir", output_dir, "Output directory")->envname("SDEMLE_OUTPUT_DIR");
  app.add_option("--out", out_name, "Output base name");
  app.add_flag("--verbose", verbose, "Chatty progress on stderr");

  CLI::App* simulate = app.add_subcommand("simulate", "Generate one sample path");
  simulate->fallthrough();
  simulate->add_option("--format", format, "csv, bin, or both")->capture_default_str();

  CLI::App* fisher = app.add_subcommand("fisher", "Print the Fisher information as JSON");
  fisher->fallthrough();

  CLI::App* estimate = app.add_subcommand("estimate", "One path, one estimator trajectory");
  estimate->fallthrough();

  CLI::App* montecarlo =
      app.add_subcommand("montecarlo", "Replicated experiment with standardized-error statistics");
  montecarlo->fallthrough();
  montecarlo->add_flag("--dump-replicates", dump_replicates,
                       "Also write per-replicate trajectories as CSV");
  montecarlo->add_flag("--gate", gate,
                       "Exit 3 unless normality and increment thresholds hold at tau = 1");
  montecarlo->add_option("--preset", preset, "Built-in experiment preset: quartic-demo");

  CLI::App* compare = app.add_subcommand("compare", "Efficiency report across config files");
  compare->fallthrough();
  compare->add_option("configs", compare_files, "Experiment config files (two or more)")
      ->required();

  auto named = [&](const char* default_name) {
    return out_name.empty() ? std::string(default_name) : out_name;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message and usage hint to stderr
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return run_simulate(shadow, output_dir, named("path"), format, verbose);
    if (fisher->parsed()) return run_fisher(shadow, output_dir, out_name);  // empty: stdout only
    if (estimate->parsed()) return run_estimate(shadow, output_dir, named("trajectory"));
    if (montecarlo->parsed())
      return run_montecarlo(shadow, output_dir, named("stats"), dump_replicates, gate, preset,
                            app.count("--replicates") > 0);
    if (compare->parsed())
      return run_compare(compare_files, output_dir, named("compare"));
    std::cerr << "usage: sdemle {simulate|fisher|estimate|montecarlo|compare} [options]\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.get_name() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
