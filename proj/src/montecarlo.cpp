#include "sdemle/montecarlo.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "sdemle/errors.hpp"
#include "sdemle/rng.hpp"
#include "sdemle/simulate.hpp"

namespace sdemle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

std::string to_string(InitMode m) {
  switch (m) {
    case InitMode::stationary: return "stationary";
    case InitMode::burnin: return "burnin";
    case InitMode::fixed: return "fixed";
  }
  return "unknown";
}

EstimatorMethod parse_method(const std::string& s) {
  if (s == "preliminary") return EstimatorMethod::preliminary;
  if (s == "one_step") return EstimatorMethod::one_step;
  if (s == "two_step") return EstimatorMethod::two_step;
  if (s == "second_preliminary") return EstimatorMethod::second_preliminary;
  if (s == "reference_mle") return EstimatorMethod::reference_mle;
  throw ConfigError("unknown method: " + s);
}

FisherMode parse_fisher_mode(const std::string& s) {
  if (s == "quadrature") return FisherMode::quadrature;
  if (s == "empirical") return FisherMode::empirical;
  throw ConfigError("unknown fisher mode: " + s);
}

InitMode parse_init_mode(const std::string& s) {
  if (s == "stationary") return InitMode::stationary;
  if (s == "burnin") return InitMode::burnin;
  if (s == "fixed") return InitMode::fixed;
  throw ConfigError("unknown init mode: " + s);
}

std::vector<double> TauGridSpec::build(double tau_delta) const {
  switch (kind) {
    case Kind::preset:
      return default_tau_grid(tau_delta, n);
    case Kind::uniform: {
      if (n <= 0) throw ConfigError("tau grid size must be positive");
      if (n == 1) return {1.0};
      std::vector<double> g(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] =
            tau_delta + (1.0 - tau_delta) * static_cast<double>(i) / static_cast<double>(n - 1);
      return g;
    }
    case Kind::explicit_list: {
      if (values.empty()) throw ConfigError("explicit tau grid is empty");
      return values;
    }
  }
  throw ConfigError("invalid tau grid spec");
}

std::string TauGridSpec::describe() const {
  switch (kind) {
    case Kind::preset: return "default";
    case Kind::uniform: return "uniform:" + std::to_string(n);
    case Kind::explicit_list: {
      std::ostringstream os;
      for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
      return os.str();
    }
  }
  return "?";
}

TauGridSpec TauGridSpec::parse(const std::string& text) {
  TauGridSpec spec;
  if (text.empty()) throw ConfigError("empty tau grid request");
  if (text == "default") return spec;
  if (text.rfind("uniform:", 0) == 0) {
    spec.kind = Kind::uniform;
    std::size_t used = 0;
    try {
      spec.n = std::stoi(text.substr(8), &used);
    } catch (const std::exception&) {
      throw ConfigError("malformed tau grid request: '" + text + "'");
    }
    if (used != text.size() - 8)
      throw ConfigError("malformed tau grid request: '" + text + "'");
    return spec;
  }
  spec.kind = Kind::explicit_list;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    try {
      spec.values.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      throw ConfigError("malformed tau grid entry: '" + item + "'");
    }
    if (used != item.size()) throw ConfigError("malformed tau grid entry: '" + item + "'");
  }
  if (spec.values.empty()) throw ConfigError("empty tau grid request: '" + text + "'");
  return spec;
}

void ExperimentConfig::validate() const {
  if (!(T >= 10.0)) throw ConfigError("experiment requires T >= 10");
  if (!(h > 0.0 && h <= 0.1)) throw ConfigError("experiment requires 0 < h <= 0.1");
  if (replicates < 1) throw ConfigError("experiment requires at least one replicate");
  if (threads < 0) throw ConfigError("thread count must be nonnegative");
  if (mle_grid_points < 2) throw ConfigError("mle_grid_points must be at least 2");
  switch (method) {
    case EstimatorMethod::one_step:
      if (!(delta > 0.5 && delta < 1.0))
        throw ConfigError("one_step requires delta in (1/2, 1)");
      break;
    case EstimatorMethod::two_step:
    case EstimatorMethod::second_preliminary:
      if (!(delta > 0.25 && delta <= 0.5))
        throw ConfigError("two_step requires delta in (1/4, 1/2]");
      break;
    default:
      if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  }
  const DiffusionModel model = build_model();
  if (static_cast<int>(theta_true.size()) != model.dim_param)
    throw ConfigError("theta_true dimension does not match the model");
  if (!model.theta_space.contains(theta()))
    throw ConfigError("theta_true lies outside the parameter space");
}

DiffusionModel ExperimentConfig::build_model() const {
  if (bounds_lower.empty() && bounds_upper.empty()) return make_model(model_id);
  if (bounds_lower.size() != bounds_upper.size())
    throw ConfigError("bounds lower/upper have mismatched sizes");
  ParameterSpace space{ParamVec::from(bounds_lower), ParamVec::from(bounds_upper)};
  return make_model(model_id, space);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["model"] = model_id;
  const DiffusionModel model = build_model();
  j["bounds"] = {{"lower", model.theta_space.lower.to_vector()},
                 {"upper", model.theta_space.upper.to_vector()}};
  j["theta"] = theta_true;
  j["T"] = T;
  j["h"] = h;
  j["delta"] = delta;
  j["method"] = to_string(method);
  j["tau_grid"] = tau_grid.describe();
  j["replicates"] = replicates;
  j["seed"] = seed;
  j["fisher"] = to_string(fisher_mode);
  j["init"] = to_string(init);
  j["x0"] = x0;
  j["noise_free"] = noise_free;
  j["standardize_at_estimate"] = standardize_at_estimate;
  j["threads"] = threads;
  j["mle_grid_points"] = mle_grid_points;
  return j;
}

bool ReplicateStats::failed(int i) const {
  for (int f : failed_replicates)
    if (f == i) return true;
  return false;
}

std::size_t ReplicateStats::tau_index(double tau) const {
  for (std::size_t k = 0; k < tau_grid.size(); ++k)
    if (std::abs(tau_grid[k] - tau) <= 1e-9) return k;
  throw ConfigError("tau " + std::to_string(tau) + " is not on the experiment tau grid");
}

nlohmann::json ReplicateStats::to_json(bool include_replicates, bool include_timing) const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["config"] = config.to_json();
  j["tau_grid"] = tau_grid;
  j["dim"] = d;
  j["replicates_total"] = m_total;
  j["failed_replicates"] = failed_replicates;
  j["failure_reasons"] = failure_reasons;
  j["clamp_count"] = clamp_count;
  j["mean_standardized"] = mean_std;
  j["cov_standardized"] = cov_std;
  j["variance_ratio"] = variance_ratio;
  if (include_timing) {
    j["wall_clock_total_s"] = wall_clock_total_s;
    j["wall_clock_mean_s"] = wall_clock_mean_s;
  }
  if (include_replicates) {
    j["estimates"] = estimates;
    j["standardized"] = standardized;
  }
  return j;
}

ReplicateStats run_experiment(const ExperimentConfig& config) {
  config.validate();
  const DiffusionModel model = config.build_model();
  const ParamVec theta0 = config.theta();
  const int d = model.dim_param;
  const double tau_delta = std::pow(config.T, config.delta - 1.0);
  const std::vector<double> grid = config.tau_grid.build(tau_delta);
  const std::size_t K = grid.size();
  const int M = config.replicates;

  const FisherMatrix fisher0 = fisher_quadrature(model, theta0);
  const SymMatrix sqrt_info = fisher0.mat.sqrt_spd();

  DensityTable table;
  if (config.init == InitMode::stationary && !config.noise_free)
    table = build_density(model, theta0);

  FisherCache shared_cache;      // two-step quadrature lattice cache
  FisherCache standardize_cache; // optional I(theta-hat) standardization

  ReplicateStats stats;
  stats.config = config;
  stats.tau_grid = grid;
  stats.d = d;
  stats.m_total = M;
  stats.estimates.assign(static_cast<std::size_t>(M) * K * static_cast<std::size_t>(d), kNaN);
  stats.standardized.assign(static_cast<std::size_t>(M) * K * static_cast<std::size_t>(d), kNaN);

  std::vector<char> failed(static_cast<std::size_t>(M), 0);
  std::vector<std::string> reasons(static_cast<std::size_t>(M));
  std::vector<char> clamped(static_cast<std::size_t>(M), 0);
  std::vector<double> wall(static_cast<std::size_t>(M), 0.0);

  auto run_replicate = [&](int i) {
    const double t_begin = now_seconds();
    const std::uint64_t seed_i = replicate_seed(config.seed, static_cast<std::uint64_t>(i));
    try {
      SamplePath path;
      if (config.noise_free) {
        path = euler_maruyama_with_noise(model, theta0, config.x0, config.T, config.h,
                                         [](std::size_t) { return 0.0; });
        path.seed = seed_i;
      } else if (config.init == InitMode::stationary) {
        path = simulate_stationary(model, theta0, config.T, config.h, seed_i, &table);
      } else if (config.init == InitMode::burnin) {
        path = simulate_burnin(model, theta0, config.x0, config.T, config.h, seed_i);
      } else {
        path = euler_maruyama(model, theta0, config.x0, config.T, config.h, seed_i);
      }

      EstimatorTrajectory traj;
      switch (config.method) {
        case EstimatorMethod::one_step: {
          EstimateOptions opts;
          opts.fisher_mode = config.fisher_mode;
          traj = one_step_process(model, path, config.delta, grid, opts);
          break;
        }
        case EstimatorMethod::two_step: {
          EstimateOptions opts;
          opts.fisher_mode = config.fisher_mode;
          opts.cache = config.fisher_mode == FisherMode::quadrature ? &shared_cache : nullptr;
          traj = two_step_process(model, path, config.delta, grid, opts);
          break;
        }
        case EstimatorMethod::preliminary: {
          const PrelimResult p = model.preliminary(path, config.delta);
          traj.tau_grid = grid;
          traj.estimates.assign(K, p.value);
          traj.method = EstimatorMethod::preliminary;
          traj.preliminary = p.value;
          traj.clamped = p.clamped;
          break;
        }
        case EstimatorMethod::reference_mle: {
          traj.tau_grid = grid;
          traj.estimates.resize(K);
          traj.method = EstimatorMethod::reference_mle;
          for (std::size_t k = 0; k < K; ++k)
            traj.estimates[k] = reference_mle(model, path, grid[k], config.mle_grid_points).theta;
          traj.preliminary = traj.estimates.front();
          break;
        }
        case EstimatorMethod::second_preliminary: {
          // one Fisher evaluation at the first preliminary, one score pass
          const PrelimResult p = model.preliminary(path, config.delta);
          const FisherMatrix fisher =
              config.fisher_mode == FisherMode::quadrature
                  ? fisher_quadrature(model, p.value)
                  : empirical_fisher(model, p.value, path, 0.0,
                                     std::pow(config.T, config.delta));
          traj.tau_grid = grid;
          traj.estimates.resize(K);
          traj.method = EstimatorMethod::second_preliminary;
          traj.preliminary = p.value;
          traj.clamped = p.clamped;
          for (std::size_t k = 0; k < K; ++k) {
            const ScoreSample s = score_delta(model, p.value, path, config.delta, grid[k]);
            ParamVec step = fisher.inv.matvec(s.value);
            step *= 1.0 / s.normalization;
            bool cl = false;
            traj.estimates[k] = model.theta_space.clamp(p.value + step, &cl);
            traj.clamped = traj.clamped || cl;
          }
          break;
        }
      }

      SymMatrix standardizer = sqrt_info;
      if (config.standardize_at_estimate)
        standardizer = standardize_cache.get(model, traj.estimates.back()).mat.sqrt_spd();

      for (std::size_t k = 0; k < K; ++k) {
        const ParamVec err = traj.estimates[k] - theta0;
        const ParamVec eta = standardizer.matvec(err);
        const double scale = std::sqrt(grid[k] * config.T);
        for (int c = 0; c < d; ++c) {
          const std::size_t base =
              (static_cast<std::size_t>(i) * K + k) * static_cast<std::size_t>(d) +
              static_cast<std::size_t>(c);
          stats.estimates[base] = traj.estimates[k][c];
          stats.standardized[base] = scale * eta[c];
        }
      }
      clamped[static_cast<std::size_t>(i)] = traj.clamped ? 1 : 0;
    } catch (const std::exception& e) {
      failed[static_cast<std::size_t>(i)] = 1;
      reasons[static_cast<std::size_t>(i)] = e.what();
    }
    wall[static_cast<std::size_t>(i)] = now_seconds() - t_begin;
  };

  int n_threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, M));
  if (n_threads == 1) {
    for (int i = 0; i < M; ++i) run_replicate(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < M; i = next.fetch_add(1)) run_replicate(i);
      });
    for (auto& th : pool) th.join();
  }

  // ordered deterministic aggregation
  for (int i = 0; i < M; ++i) {
    if (failed[static_cast<std::size_t>(i)]) {
      stats.failed_replicates.push_back(i);
      stats.failure_reasons.push_back(reasons[static_cast<std::size_t>(i)]);
    }
    stats.clamp_count += clamped[static_cast<std::size_t>(i)];
    stats.wall_clock_total_s += wall[static_cast<std::size_t>(i)];
  }
  stats.wall_clock_mean_s = stats.wall_clock_total_s / static_cast<double>(M);
  const int n_ok = M - static_cast<int>(stats.failed_replicates.size());
  if (static_cast<double>(stats.failed_replicates.size()) > 0.05 * static_cast<double>(M))
    throw Error("replicate failure rate " + std::to_string(stats.failed_replicates.size()) +
                "/" + std::to_string(M) + " exceeds 5%: " +
                (stats.failure_reasons.empty() ? "" : stats.failure_reasons.front()));
  if (n_ok == 0) throw Error("all replicates failed");

  stats.mean_std.assign(K * static_cast<std::size_t>(d), 0.0);
  stats.cov_std.assign(K * static_cast<std::size_t>(d * d), 0.0);
  stats.variance_ratio.assign(K * static_cast<std::size_t>(d), 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (int c = 0; c < d; ++c) {
      double s = 0.0;
      for (int i = 0; i < M; ++i)
        if (!failed[static_cast<std::size_t>(i)]) s += stats.eta(i, static_cast<int>(k), c);
      stats.mean_std[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] =
          s / static_cast<double>(n_ok);
    }
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        double s = 0.0;
        const double mr = stats.mean_std[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(r)];
        const double mc = stats.mean_std[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)];
        for (int i = 0; i < M; ++i)
          if (!failed[static_cast<std::size_t>(i)])
            s += (stats.eta(i, static_cast<int>(k), r) - mr) *
                 (stats.eta(i, static_cast<int>(k), c) - mc);
        const double cov = n_ok > 1 ? s / static_cast<double>(n_ok - 1) : 0.0;
        stats.cov_std[(k * static_cast<std::size_t>(d) + static_cast<std::size_t>(r)) *
                          static_cast<std::size_t>(d) +
                      static_cast<std::size_t>(c)] = cov;
        if (r == c)
          stats.variance_ratio[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(r)] = cov;
      }
  }
  return stats;
}

IncrementReport wiener_increment_check(const ReplicateStats& stats,
                                       const std::vector<std::array<double, 4>>& tau_pairs,
                                       double corr_threshold, double var_lo, double var_hi) {
  const int n_ok = stats.m_total - static_cast<int>(stats.failed_replicates.size());
  if (n_ok < 100)
    throw ConfigError("wiener increment check requires at least 100 successful replicates");
  IncrementReport report;
  report.corr_threshold = corr_threshold;
  report.var_lo = var_lo;
  report.var_hi = var_hi;
  report.all_pass = true;
  const int d = stats.d;
  for (const auto& p : tau_pairs) {
    const double t1 = p[0], t2 = p[1], t3 = p[2], t4 = p[3];
    if (!(t1 < t2) || !(t3 < t4))
      throw ConfigError("increment intervals must be nondegenerate and ordered");
    if (!(t2 <= t3 + 1e-12 || t4 <= t1 + 1e-12))
      throw ConfigError("increment intervals overlap");
    const std::size_t k1 = stats.tau_index(t1), k2 = stats.tau_index(t2);
    const std::size_t k3 = stats.tau_index(t3), k4 = stats.tau_index(t4);
    IncrementCheck chk;
    chk.taus = p;
    chk.pass = true;
    for (int c = 0; c < d; ++c) {
      std::vector<double> a, b;
      a.reserve(static_cast<std::size_t>(n_ok));
      b.reserve(static_cast<std::size_t>(n_ok));
      for (int i = 0; i < stats.m_total; ++i) {
        if (stats.failed(i)) continue;
        // Wiener-scaled process: eta_w(tau) = sqrt(tau) * standardized(tau)
        const double w1 = std::sqrt(t1) * stats.eta(i, static_cast<int>(k1), c);
        const double w2 = std::sqrt(t2) * stats.eta(i, static_cast<int>(k2), c);
        const double w3 = std::sqrt(t3) * stats.eta(i, static_cast<int>(k3), c);
        const double w4 = std::sqrt(t4) * stats.eta(i, static_cast<int>(k4), c);
        a.push_back(w2 - w1);
        b.push_back(w4 - w3);
      }
      const auto n = static_cast<double>(a.size());
      double ma = 0, mb = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
      }
      ma /= n;
      mb /= n;
      double saa = 0, sbb = 0, sab = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
      }
      const double corr = sab / std::sqrt(saa * sbb);
      const double va = saa / (n - 1.0) / (t2 - t1);
      const double vb = sbb / (n - 1.0) / (t4 - t3);
      chk.corr_per_coord.push_back(corr);
      chk.var_ratio_first.push_back(va);
      chk.var_ratio_second.push_back(vb);
      if (std::abs(corr) >= corr_threshold || va < var_lo || va > var_hi || vb < var_lo ||
          vb > var_hi)
        chk.pass = false;
    }
    report.all_pass = report.all_pass && chk.pass;
    report.checks.push_back(std::move(chk));
  }
  return report;
}

nlohmann::json IncrementReport::to_json() const {
  nlohmann::json j;
  j["corr_threshold"] = corr_threshold;
  j["var_lo"] = var_lo;
  j["var_hi"] = var_hi;
  j["all_pass"] = all_pass;
  auto arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e;
    e["intervals"] = {{c.taus[0], c.taus[1]}, {c.taus[2], c.taus[3]}};
    e["correlation"] = c.corr_per_coord;
    e["var_ratio_first"] = c.var_ratio_first;
    e["var_ratio_second"] = c.var_ratio_second;
    e["pass"] = c.pass;
    arr.push_back(e);
  }
  j["checks"] = arr;
  return j;
}

EfficiencyReport efficiency_report(const std::vector<ExperimentConfig>& configs) {
  if (configs.size() < 2)
    throw ConfigError("efficiency report requires at least two configurations");
  for (std::size_t i = 1; i < configs.size(); ++i) {
    const auto& a = configs[0];
    const auto& b = configs[i];
    if (a.model_id != b.model_id || a.theta_true != b.theta_true || a.T != b.T || a.h != b.h)
      throw ConfigError("efficiency report requires configs sharing (model, theta, T, h)");
  }
  EfficiencyReport report;
  double one_step_cost = -1.0, mle_cost = -1.0;
  for (const auto& cfg : configs) {
    const ReplicateStats stats = run_experiment(cfg);
    EfficiencyEntry entry;
    entry.method = to_string(cfg.method);
    entry.delta = cfg.delta;
    entry.tau_grid = stats.tau_grid;
    entry.wall_clock_mean_s = stats.wall_clock_mean_s;
    entry.config = cfg.to_json();
    const std::size_t K = stats.tau_grid.size();
    entry.second_moment.assign(K, 0.0);
    const int n_ok = stats.m_total - static_cast<int>(stats.failed_replicates.size());
    for (std::size_t k = 0; k < K; ++k) {
      double s = 0.0;
      for (int i = 0; i < stats.m_total; ++i) {
        if (stats.failed(i)) continue;
        for (int c = 0; c < stats.d; ++c) {
          const double e = stats.eta(i, static_cast<int>(k), c);
          s += e * e;
        }
      }
      entry.second_moment[k] = s / static_cast<double>(n_ok);
    }
    if (cfg.method == EstimatorMethod::one_step) one_step_cost = entry.wall_clock_mean_s;
    if (cfg.method == EstimatorMethod::reference_mle) mle_cost = entry.wall_clock_mean_s;
    report.entries.push_back(std::move(entry));
  }
  if (one_step_cost > 0 && mle_cost > 0) report.one_step_vs_mle_cost = one_step_cost / mle_cost;
  return report;
}

nlohmann::json EfficiencyReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  auto arr = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json v;
    v["method"] = e.method;
    v["delta"] = e.delta;
    v["tau_grid"] = e.tau_grid;
    v["second_moment_standardized"] = e.second_moment;
    v["wall_clock_mean_s"] = e.wall_clock_mean_s;
    v["config"] = e.config;
    arr.push_back(v);
  }
  j["entries"] = arr;
  if (one_step_vs_mle_cost >= 0) j["one_step_vs_mle_cost"] = one_step_vs_mle_cost;
  return j;
}

std::string EfficiencyReport::table() const {
  std::ostringstream os;
  os << "method            delta   E|eta|^2(tau=1)   wall-clock/replicate [s]\n";
  for (const auto& e : entries) {
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %6.3f %16.4f %26.6f\n", e.method.c_str(), e.delta,
                  e.second_moment.empty() ? 0.0 : e.second_moment.back(), e.wall_clock_mean_s);
    os << line;
  }
  if (one_step_vs_mle_cost >= 0)
    os << "one-step cost / reference-MLE cost = " << one_step_vs_mle_cost << "\n";
  return os.str();
}

}  // namespace sdemle
