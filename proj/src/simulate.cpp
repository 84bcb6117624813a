#include "sdemle/simulate.hpp"

#include <cmath>

#include "sdemle/errors.hpp"
#include "sdemle/rng.hpp"

namespace sdemle {

namespace {

constexpr double kDivergenceGuard = 1e6;

// stream ids within a seed: 0 = initial stationary draw, 1 = increments,
// 2 = burn-in increments
constexpr std::uint64_t kStreamInit = 0;
constexpr std::uint64_t kStreamSteps = 1;
constexpr std::uint64_t kStreamBurnin = 2;

std::size_t step_count(double T, double h) {
  if (!(h > 0.0) || !(T >= h)) throw ConfigError("simulation requires h > 0 and T >= h");
  const double n = T / h;
  const auto N = static_cast<std::size_t>(std::llround(n));
  if (std::abs(static_cast<double>(N) * h - T) > 1e-12 * std::max(1.0, T) * 1e3)
    throw ConfigError("horizon T is not an integer multiple of the step h");
  return N;
}

SamplePath run_scheme(const DiffusionModel& model, const ParamVec& theta, double x0, double T,
                      double h, std::uint64_t seed,
                      const std::function<double(std::size_t)>& noise) {
  const std::size_t N = step_count(T, h);
  SamplePath path;
  path.h = h;
  path.seed = seed;
  path.theta_true = theta;
  path.values.resize(N + 1);
  double x = x0;
  path.values[0] = x;
  const double sqrt_h = std::sqrt(h);
  for (std::size_t j = 0; j < N; ++j) {
    x += model.drift(theta, x) * h + model.sigma(x) * sqrt_h * noise(j);
    if (!std::isfinite(x) || std::abs(x) > kDivergenceGuard)
      throw SimulationDiverged("simulation diverged", j);
    path.values[j + 1] = x;
  }
  return path;
}

}  // namespace

SamplePath euler_maruyama(const DiffusionModel& model, const ParamVec& theta, double x0, double T,
                          double h, std::uint64_t seed) {
  if (!model.theta_space.contains(theta))
    throw ConfigError("euler_maruyama requires theta inside the parameter space");
  CounterRng rng(seed, kStreamSteps);
  return run_scheme(model, theta, x0, T, h, seed,
                    [&rng](std::size_t j) { return rng.normal(j); });
}

SamplePath euler_maruyama_with_noise(const DiffusionModel& model, const ParamVec& theta, double x0,
                                     double T, double h,
                                     const std::function<double(std::size_t)>& noise) {
  return run_scheme(model, theta, x0, T, h, 0, noise);
}

double stationary_draw(const DensityTable& table, std::uint64_t seed) {
  CounterRng rng(seed, kStreamInit);
  return table.sample(rng.uniform(0));
}

double stationary_draw(const DiffusionModel& model, const ParamVec& theta, std::uint64_t seed) {
  return stationary_draw(build_density(model, theta), seed);
}

SamplePath simulate_stationary(const DiffusionModel& model, const ParamVec& theta, double T,
                               double h, std::uint64_t seed, const DensityTable* table) {
  DensityTable local;
  if (!table) {
    local = build_density(model, theta);
    table = &local;
  }
  const double x0 = stationary_draw(*table, seed);
  return euler_maruyama(model, theta, x0, T, h, seed);
}

SamplePath simulate_burnin(const DiffusionModel& model, const ParamVec& theta, double x0, double T,
                           double h, std::uint64_t seed) {
  if (!model.theta_space.contains(theta))
    throw ConfigError("simulate_burnin requires theta inside the parameter space");
  const auto burn = static_cast<std::size_t>(
      std::max(10.0 / h, 1e4));
  CounterRng rng(seed, kStreamBurnin);
  double x = x0;
  const double sqrt_h = std::sqrt(h);
  for (std::size_t j = 0; j < burn; ++j) {
    x += model.drift(theta, x) * h + model.sigma(x) * sqrt_h * rng.normal(j);
    if (!std::isfinite(x) || std::abs(x) > kDivergenceGuard)
      throw SimulationDiverged("burn-in diverged", j);
  }
  return euler_maruyama(model, theta, x, T, h, seed);
}

}  // namespace sdemle
