#include "sdemle/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>

#include "json.hpp"
#include "sdemle/errors.hpp"
#include "sdemle/quadrature.hpp"

namespace sdemle {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct LearningWindow {
  std::size_t j_pre;    // first index past the learning interval
  double t_learn;       // T^delta
  double tau_delta;     // T^{delta-1}
};

LearningWindow learning_window(const SamplePath& path, double delta,
                               bool require_min_steps = false) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  const double T = path.horizon();
  const double t_learn = std::pow(T, delta);
  if (t_learn > T + 1e-9) throw ConfigError("learning interval exceeds the path horizon");
  const auto j_pre = static_cast<std::size_t>(std::floor(t_learn / path.h + 1e-9));
  if (require_min_steps && j_pre < 10)
    throw InsufficientData("learning window has " + std::to_string(j_pre) +
                           " grid steps, need at least 10");
  return {j_pre, t_learn, std::pow(T, delta - 1.0)};
}

/// First grid index of the score window [T^delta, tau T].
std::size_t score_start(const SamplePath& path, double t_learn) {
  return static_cast<std::size_t>(std::ceil(t_learn / path.h - 1e-9));
}

std::size_t score_end(const SamplePath& path, double tau, double tau_delta) {
  if (tau < tau_delta - 1e-12)
    throw WindowError("tau " + std::to_string(tau) + " is below tau_delta " +
                      std::to_string(tau_delta));
  if (tau > 1.0 + 1e-12) throw WindowError("tau " + std::to_string(tau) + " exceeds 1");
  const double t = tau * path.horizon();
  auto j = static_cast<std::size_t>(std::floor(t / path.h + 1e-9));
  return std::min(j, path.n_steps());
}

ParamVec accumulate_score(const DiffusionModel& model, const ParamVec& theta_grad,
                          const ParamVec& theta_drift, const SamplePath& path, std::size_t j0,
                          std::size_t j1) {
  ParamVec raw(model.dim_param);
  for (std::size_t j = j0; j < j1; ++j) {
    const double x = path.values[j];
    const double s = model.sigma(x);
    const double bracket = path.values[j + 1] - x - model.drift(theta_drift, x) * path.h;
    const ParamVec g = model.drift_grad(theta_grad, x);
    const double w = bracket / (s * s);
    for (int c = 0; c < raw.size(); ++c) raw[c] += g[c] * w;
  }
  return raw;
}

std::vector<double> checked_grid(const std::vector<double>& tau_grid, double tau_delta) {
  if (tau_grid.empty()) throw ConfigError("tau grid is empty");
  std::vector<double> grid = tau_grid;
  std::sort(grid.begin(), grid.end());
  for (double t : grid) {
    if (t < tau_delta - 1e-12)
      throw WindowError("tau grid entry " + std::to_string(t) + " is below tau_delta " +
                        std::to_string(tau_delta));
    if (t > 1.0 + 1e-12) throw WindowError("tau grid entry exceeds 1");
  }
  return grid;
}

}  // namespace

std::string to_string(EstimatorMethod m) {
  switch (m) {
    case EstimatorMethod::preliminary: return "preliminary";
    case EstimatorMethod::one_step: return "one_step";
    case EstimatorMethod::two_step: return "two_step";
    case EstimatorMethod::second_preliminary: return "second_preliminary";
    case EstimatorMethod::reference_mle: return "reference_mle";
  }
  return "unknown";
}

std::string to_string(FisherMode m) {
  return m == FisherMode::quadrature ? "quadrature" : "empirical";
}

void write_trajectory_csv(const EstimatorTrajectory& traj, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot open " + file + " for writing");
  out << "# method=" << to_string(traj.method) << " model=" << traj.model_id
      << " delta=" << fmt17(traj.delta) << " T=" << fmt17(traj.T) << " h=" << fmt17(traj.h)
      << " seed=" << traj.seed << "\n";
  out << "tau";
  const int d = traj.estimates.empty() ? 0 : traj.estimates.front().size();
  for (int c = 0; c < d; ++c) out << ",theta_" << (c + 1);
  out << "\n";
  for (std::size_t k = 0; k < traj.tau_grid.size(); ++k) {
    out << fmt17(traj.tau_grid[k]);
    for (int c = 0; c < d; ++c) out << "," << fmt17(traj.estimates[k][c]);
    out << "\n";
  }
  if (!out) throw ConfigError("write failed for " + file);
}

std::string trajectory_to_json(const EstimatorTrajectory& traj) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["method"] = to_string(traj.method);
  j["model"] = traj.model_id;
  j["delta"] = traj.delta;
  j["T"] = traj.T;
  j["h"] = traj.h;
  j["seed"] = traj.seed;
  j["preliminary"] = traj.preliminary.to_vector();
  j["clamped"] = traj.clamped;
  if (traj.theta_true) j["theta_true"] = traj.theta_true->to_vector();
  j["tau"] = traj.tau_grid;
  auto rows = nlohmann::json::array();
  for (const auto& e : traj.estimates) rows.push_back(e.to_vector());
  j["estimates"] = rows;
  return j.dump(2);
}

std::vector<double> default_tau_grid(double tau_delta, int n) {
  if (n <= 0) throw ConfigError("tau grid size must be positive");
  if (!(tau_delta > 0.0 && tau_delta < 1.0))
    throw ConfigError("tau_delta must lie in (0,1), got " + std::to_string(tau_delta));
  if (n == 1) return {1.0};
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n));
  const double knee = std::min(std::max(2.0 * tau_delta, 0.2), 1.0);
  // late learning windows leave no room for a geometric head
  const int n_geo = knee < 1.0 && tau_delta < 0.5 ? std::min(30, n - 2) : 0;
  const double start = n_geo > 0 ? knee : tau_delta;
  for (int i = 0; i < n_geo; ++i)
    grid.push_back(tau_delta * std::pow(knee / tau_delta,
                                        static_cast<double>(i) / static_cast<double>(n_geo)));
  const int n_uni = n - n_geo;
  for (int i = 0; i < n_uni; ++i)
    grid.push_back(start + (1.0 - start) * static_cast<double>(i) /
                               static_cast<double>(n_uni - 1));
  // snap the nearest nodes to the quarter points used by the statistics
  for (double q : {0.25, 0.5, 0.75}) {
    if (q <= tau_delta || q >= 1.0) continue;
    std::size_t best = 0;
    double best_gap = 1e300;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double gap = std::abs(grid[k] - q);
      if (gap < best_gap) {
        best_gap = gap;
        best = k;
      }
    }
    grid[best] = q;
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

PrelimResult preliminary_quartic(const ParameterSpace& space, const SamplePath& path,
                                 double delta) {
  const LearningWindow w = learning_window(path, delta, true);
  double sum = 0.0;
  for (std::size_t j = 0; j < w.j_pre; ++j) sum += path.values[j];
  const double mean = sum / static_cast<double>(w.j_pre);
  PrelimResult r;
  r.value = space.clamp(ParamVec::of(mean), &r.clamped);
  return r;
}

PrelimResult preliminary_quartic2d(const ParameterSpace& space, const SamplePath& path,
                                   double delta) {
  const LearningWindow w = learning_window(path, delta, true);
  double sum = 0.0;
  for (std::size_t j = 0; j < w.j_pre; ++j) sum += path.values[j];
  const double alpha = sum / static_cast<double>(w.j_pre);
  double m2 = 0.0;
  for (std::size_t j = 0; j < w.j_pre; ++j) {
    const double y = path.values[j] - alpha;
    m2 += y * y;
  }
  m2 /= static_cast<double>(w.j_pre);
  if (!(m2 > 0.0))
    throw DegeneratePreliminary("second moment of the learning window vanishes");
  const double rho = std::tgamma(0.75) / std::tgamma(0.25);
  const double beta = 2.0 * rho * rho / (m2 * m2);
  PrelimResult r;
  r.value = space.clamp(ParamVec::of(alpha, beta), &r.clamped);
  return r;
}

PrelimResult preliminary_ou_variance(const ParameterSpace& space, const SamplePath& path,
                                     double delta) {
  const LearningWindow w = learning_window(path, delta, true);
  double m2 = 0.0;
  for (std::size_t j = 0; j < w.j_pre; ++j) m2 += path.values[j] * path.values[j];
  m2 /= static_cast<double>(w.j_pre);
  if (!(m2 > 0.0))
    throw DegeneratePreliminary("second moment of the learning window vanishes");
  PrelimResult r;
  r.value = space.clamp(ParamVec::of(1.0 / (2.0 * m2)), &r.clamped);
  return r;
}

ScoreSample score_delta(const DiffusionModel& model, const ParamVec& theta,
                        const SamplePath& path, double delta, double tau) {
  return hat_score_delta(model, theta, theta, path, delta, tau);
}

ScoreSample hat_score_delta(const DiffusionModel& model, const ParamVec& theta_grad,
                            const ParamVec& theta_drift, const SamplePath& path, double delta,
                            double tau) {
  const LearningWindow w = learning_window(path, delta);
  const std::size_t j0 = score_start(path, w.t_learn);
  const std::size_t j1 = score_end(path, tau, w.tau_delta);
  const ParamVec tg = model.theta_space.clamp(theta_grad);
  const ParamVec td = model.theta_space.clamp(theta_drift);
  ScoreSample s;
  s.tau = tau;
  s.normalization = std::sqrt(tau * path.horizon());
  s.value = accumulate_score(model, tg, td, path, j0, std::max(j0, j1));
  s.value *= 1.0 / s.normalization;
  if (!s.value.all_finite()) throw Error("score is not finite at tau " + std::to_string(tau));
  return s;
}

ScoreSample score_delta_pathwise(const DiffusionModel& model, const ParamVec& theta_in,
                                 const SamplePath& path, double delta, double tau) {
  const LearningWindow w = learning_window(path, delta);
  const std::size_t j0 = score_start(path, w.t_learn);
  const std::size_t j1 = std::max(j0, score_end(path, tau, w.tau_delta));
  const ParamVec theta = model.theta_space.clamp(theta_in);
  const int d = model.dim_param;

  ScoreSample s;
  s.tau = tau;
  s.normalization = std::sqrt(tau * path.horizon());
  s.value = ParamVec(d);
  if (j1 == j0) return s;  // empty window

  const double xa = path.values[j0];
  const double xb = path.values[j1];
  ParamVec endpoint(d);
  if (model.grad_antiderivative) {
    endpoint = model.grad_antiderivative(theta, xb) - model.grad_antiderivative(theta, xa);
  } else {
    for (int c = 0; c < d; ++c) {
      QuadratureOptions opts;
      opts.rel_tol = 1e-12;
      opts.abs_tol = 1e-14;
      endpoint[c] = adaptive_simpson(
          [&](double y) {
            const double sg = model.sigma(y);
            return model.drift_grad(theta, y)[c] / (sg * sg);
          },
          xa, xb, opts);
    }
  }

  ParamVec riemann(d);
  for (std::size_t j = j0; j < j1; ++j) {
    const double x = path.values[j];
    const double sg = model.sigma(x);
    const ParamVec g = model.drift_grad(theta, x);
    const ParamVec gdx = model.drift_grad_dx(theta, x);
    const double mixed = (model.sigma_dx(x) * sg - model.drift(theta, x)) / (sg * sg);
    for (int c = 0; c < d; ++c) riemann[c] += (-0.5 * gdx[c] + g[c] * mixed) * path.h;
  }
  s.value = endpoint + riemann;
  s.value *= 1.0 / s.normalization;
  if (!s.value.all_finite())
    throw Error("pathwise score is not finite at tau " + std::to_string(tau));
  return s;
}

FisherMatrix FisherCache::get(const DiffusionModel& model, const ParamVec& theta) {
  std::array<long long, 2> key{0, 0};
  ParamVec rounded(theta.size());
  for (int i = 0; i < theta.size(); ++i) {
    key[static_cast<std::size_t>(i)] = std::llround(theta[i] / lattice_);
    rounded[i] = static_cast<double>(key[static_cast<std::size_t>(i)]) * lattice_;
  }
  {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  FisherMatrix fisher = fisher_quadrature(model, model.theta_space.clamp(rounded));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.emplace(key, std::move(fisher));
  return it->second;
}

std::size_t FisherCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

namespace {

FisherMatrix fisher_for(const DiffusionModel& model, const ParamVec& theta,
                        const SamplePath& path, double t_learn, const EstimateOptions& opts) {
  if (opts.fisher_mode == FisherMode::empirical)
    return empirical_fisher(model, theta, path, 0.0, t_learn);
  if (opts.cache) return opts.cache->get(model, theta);
  return fisher_quadrature(model, theta);
}

}  // namespace

EstimatorTrajectory one_step_process(const DiffusionModel& model, const SamplePath& path,
                                     double delta, const std::vector<double>& tau_grid,
                                     const EstimateOptions& opts) {
  if (!(delta > 0.5 && delta < 1.0))
    throw ConfigError("one-step process requires delta in (1/2, 1), got " +
                      std::to_string(delta));
  const LearningWindow w = learning_window(path, delta);
  const double T = path.horizon();
  const std::vector<double> grid = checked_grid(tau_grid, w.tau_delta);

  const PrelimResult prelim = model.preliminary(path, delta);
  const FisherMatrix fisher = fisher_for(model, prelim.value, path, w.t_learn, opts);

  EstimatorTrajectory traj;
  traj.tau_grid = grid;
  traj.method = EstimatorMethod::one_step;
  traj.delta = delta;
  traj.T = T;
  traj.h = path.h;
  traj.seed = path.seed;
  traj.preliminary = prelim.value;
  traj.clamped = prelim.clamped;
  traj.model_id = model.id;
  traj.theta_true = path.theta_true;
  traj.estimates.resize(grid.size());

  // single pass over the path; checkpoints at the grid indices
  std::vector<std::size_t> ends(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) ends[k] = score_end(path, grid[k], w.tau_delta);
  const std::size_t j0 = score_start(path, w.t_learn);
  ParamVec raw(model.dim_param);
  std::size_t k = 0;
  auto emit = [&](std::size_t upto) {
    while (k < grid.size() && ends[k] <= upto) {
      ParamVec step = fisher.inv.matvec(raw);
      step *= 1.0 / (grid[k] * T);
      bool cl = false;
      traj.estimates[k] = model.theta_space.clamp(prelim.value + step, &cl);
      traj.clamped = traj.clamped || cl;
      ++k;
    }
  };
  emit(j0);
  for (std::size_t j = j0; j < path.n_steps() && k < grid.size(); ++j) {
    const double x = path.values[j];
    const double s = model.sigma(x);
    const double bracket = path.values[j + 1] - x - model.drift(prelim.value, x) * path.h;
    const ParamVec g = model.drift_grad(prelim.value, x);
    const double wgt = bracket / (s * s);
    for (int c = 0; c < raw.size(); ++c) raw[c] += g[c] * wgt;
    emit(j + 1);
  }
  emit(path.n_steps());
  return traj;
}

ParamVec second_preliminary(const DiffusionModel& model, const ParamVec& prelim,
                            const SamplePath& path, double delta, double tau,
                            const EstimateOptions& opts) {
  if (!(delta > 0.25 && delta <= 0.5))
    throw ConfigError("second preliminary requires delta in (1/4, 1/2], got " +
                      std::to_string(delta));
  const LearningWindow w = learning_window(path, delta);
  const ParamVec theta = model.theta_space.clamp(prelim);
  const FisherMatrix fisher = fisher_for(model, theta, path, w.t_learn, opts);
  const ScoreSample s = score_delta(model, theta, path, delta, tau);
  ParamVec step = fisher.inv.matvec(s.value);
  step *= 1.0 / s.normalization;
  return model.theta_space.clamp(theta + step);
}

EstimatorTrajectory two_step_process(const DiffusionModel& model, const SamplePath& path,
                                     double delta, const std::vector<double>& tau_grid,
                                     const EstimateOptions& opts) {
  if (!(delta > 0.25 && delta <= 0.5))
    throw ConfigError("two-step process requires delta in (1/4, 1/2], got " +
                      std::to_string(delta));
  const LearningWindow w = learning_window(path, delta);
  const double T = path.horizon();
  const std::vector<double> grid = checked_grid(tau_grid, w.tau_delta);
  const int d = model.dim_param;

  const PrelimResult first = model.preliminary(path, delta);
  const ParamVec theta1 = first.value;
  const FisherMatrix fisher1 = fisher_for(model, theta1, path, w.t_learn, opts);

  EstimatorTrajectory traj;
  traj.tau_grid = grid;
  traj.method = EstimatorMethod::two_step;
  traj.delta = delta;
  traj.T = T;
  traj.h = path.h;
  traj.seed = path.seed;
  traj.preliminary = theta1;
  traj.clamped = first.clamped;
  traj.model_id = model.id;
  traj.theta_true = path.theta_true;
  traj.estimates.resize(grid.size());

  const std::size_t j0 = score_start(path, w.t_learn);
  const std::size_t N = path.n_steps();

  // per-step quantities at the first preliminary (fixed across the grid)
  std::vector<double> grad1((N - j0) * static_cast<std::size_t>(d));
  std::vector<double> inv_s2(N - j0);
  std::vector<double> bracket1(N - j0);  // dX - S(theta1) dt
  for (std::size_t j = j0; j < N; ++j) {
    const double x = path.values[j];
    const double s = model.sigma(x);
    const ParamVec g = model.drift_grad(theta1, x);
    const std::size_t o = j - j0;
    inv_s2[o] = 1.0 / (s * s);
    for (int c = 0; c < d; ++c) grad1[o * static_cast<std::size_t>(d) + c] = g[c];
    bracket1[o] = path.values[j + 1] - x - model.drift(theta1, x) * path.h;
  }

  std::vector<std::size_t> ends(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    ends[k] = std::max(j0, score_end(path, grid[k], w.tau_delta));

  // second preliminary at every tau via one incremental pass
  std::vector<ParamVec> second(grid.size());
  {
    ParamVec raw(d);
    std::size_t k = 0;
    std::size_t j = j0;
    while (k < grid.size()) {
      for (; j < ends[k]; ++j) {
        const std::size_t o = j - j0;
        const double wgt = bracket1[o] * inv_s2[o];
        for (int c = 0; c < d; ++c) raw[c] += grad1[o * static_cast<std::size_t>(d) + c] * wgt;
      }
      ParamVec step = fisher1.inv.matvec(raw);
      step *= 1.0 / (grid[k] * T);
      bool cl = false;
      second[k] = model.theta_space.clamp(theta1 + step, &cl);
      traj.clamped = traj.clamped || cl;
      ++k;
    }
  }

  // mixed-argument correction per tau; Fisher at the second preliminary,
  // lattice-cached to bound quadrature calls
  FisherCache local_cache;
  FisherCache* cache = opts.cache ? opts.cache : &local_cache;
  std::map<std::array<long long, 2>, FisherMatrix> empirical_cache;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const ParamVec& th2 = second[k];
    FisherMatrix fisher2;
    if (opts.fisher_mode == FisherMode::quadrature) {
      fisher2 = cache->get(model, th2);
    } else {
      std::array<long long, 2> key{0, 0};
      for (int i = 0; i < d; ++i) key[static_cast<std::size_t>(i)] = std::llround(th2[i] / 1e-4);
      auto it = empirical_cache.find(key);
      if (it == empirical_cache.end())
        it = empirical_cache.emplace(key, empirical_fisher(model, th2, path, 0.0, w.t_learn))
                 .first;
      fisher2 = it->second;
    }
    ParamVec raw(d);
    for (std::size_t j = j0; j < ends[k]; ++j) {
      const std::size_t o = j - j0;
      const double x = path.values[j];
      const double br = path.values[j + 1] - x - model.drift(th2, x) * path.h;
      const double wgt = br * inv_s2[o];
      for (int c = 0; c < d; ++c) raw[c] += grad1[o * static_cast<std::size_t>(d) + c] * wgt;
    }
    ParamVec step = fisher2.inv.matvec(raw);
    step *= 1.0 / (grid[k] * T);
    bool cl = false;
    traj.estimates[k] = model.theta_space.clamp(th2 + step, &cl);
    traj.clamped = traj.clamped || cl;
  }
  return traj;
}

MleResult reference_mle(const DiffusionModel& model, const SamplePath& path, double tau,
                        int grid_points) {
  if (!(tau > 0.0 && tau <= 1.0 + 1e-12)) throw ConfigError("reference MLE requires tau in (0,1]");
  if (grid_points < 2) throw ConfigError("reference MLE requires at least 2 grid points per dim");
  const std::size_t j1 =
      std::min(static_cast<std::size_t>(std::floor(tau * path.horizon() / path.h + 1e-9)),
               path.n_steps());
  if (j1 < 2) throw InsufficientData("window too short for the reference MLE");
  const int d = model.dim_param;
  const ParameterSpace& space = model.theta_space;

  auto loglik = [&](const ParamVec& th) {
    double acc = 0.0;
    for (std::size_t j = 0; j < j1; ++j) {
      const double x = path.values[j];
      const double s2 = model.sigma(x) * model.sigma(x);
      const double drift = model.drift(th, x);
      acc += drift / s2 * (path.values[j + 1] - x) - 0.5 * drift * drift / s2 * path.h;
    }
    return acc;
  };

  // coarse grid search
  ParamVec best(d);
  double best_ll = -1e300;
  std::vector<double> margin(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) margin[static_cast<std::size_t>(i)] = 1e-6 * (space.upper[i] - space.lower[i]);
  auto grid_value = [&](int i, int g) {
    const double lo = space.lower[i] + margin[static_cast<std::size_t>(i)];
    const double hi = space.upper[i] - margin[static_cast<std::size_t>(i)];
    return lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
  };
  if (d == 1) {
    for (int g = 0; g < grid_points; ++g) {
      const ParamVec th = ParamVec::of(grid_value(0, g));
      const double ll = loglik(th);
      if (ll > best_ll) {
        best_ll = ll;
        best = th;
      }
    }
  } else {
    for (int g0 = 0; g0 < grid_points; ++g0)
      for (int g1 = 0; g1 < grid_points; ++g1) {
        const ParamVec th = ParamVec::of(grid_value(0, g0), grid_value(1, g1));
        const double ll = loglik(th);
        if (ll > best_ll) {
          best_ll = ll;
          best = th;
        }
      }
  }

  // Newton refinement on the discretized likelihood, observed information
  // keeps the drift-Hessian term
  ParamVec theta = best;
  for (int iter = 0; iter < 20; ++iter) {
    ParamVec score(d);
    SymMatrix info(d);
    SymMatrix gauss_newton(d);
    for (std::size_t j = 0; j < j1; ++j) {
      const double x = path.values[j];
      const double s2 = model.sigma(x) * model.sigma(x);
      const double bracket = path.values[j + 1] - x - model.drift(theta, x) * path.h;
      const ParamVec g = model.drift_grad(theta, x);
      const SymMatrix hess = model.drift_hess(theta, x);
      for (int r = 0; r < d; ++r) {
        score[r] += g[r] * bracket / s2;
        for (int c = r; c < d; ++c) {
          gauss_newton.add(r, c, g[r] * g[c] / s2 * path.h);
          info.add(r, c, g[r] * g[c] / s2 * path.h - hess.at(r, c) * bracket / s2);
        }
      }
    }
    SymMatrix* use = &info;
    if (info.min_eigenvalue() <= 0.0) use = &gauss_newton;
    if (use->min_eigenvalue() <= 1e-300) break;
    ParamVec step = use->inverse().matvec(score);
    theta = space.clamp(theta + step);
    if (step.norm() <= 1e-12 * (1.0 + theta.norm())) break;
  }

  MleResult res;
  res.theta = theta;
  res.loglik = loglik(theta);
  res.boundary = false;
  for (int i = 0; i < d; ++i) {
    const double m = margin[static_cast<std::size_t>(i)];
    if (theta[i] <= space.lower[i] + 2.0 * m || theta[i] >= space.upper[i] - 2.0 * m)
      res.boundary = true;
  }
  return res;
}

}  // namespace sdemle
