#pragma once

#include <cstdint>
#include <functional>

#include "sdemle/models.hpp"
#include "sdemle/sample_path.hpp"
#include "sdemle/stationary.hpp"

namespace sdemle {

/// Euler-Maruyama path on [0, T] with fixed step h:
///   X_{j+1} = X_j + S(theta, X_j) h + sigma(X_j) sqrt(h) Z_j
/// with Z_j from the counter-based stream keyed by seed. Deterministic given
/// (seed, h, T, x0, theta). Throws SimulationDiverged (carrying the step
/// index) if the state leaves |x| <= 1e6 or becomes non-finite.
SamplePath euler_maruyama(const DiffusionModel& model, const ParamVec& theta, double x0, double T,
                          double h, std::uint64_t seed);

/// Same stepper with a caller-supplied noise source Z_j (test hook for
/// noise-free and hand-built paths).
SamplePath euler_maruyama_with_noise(const DiffusionModel& model, const ParamVec& theta, double x0,
                                     double T, double h,
                                     const std::function<double(std::size_t)>& noise);

/// Draw X_0 from the invariant density via inverse cdf on the tabulated
/// cumulative. Deterministic given seed.
double stationary_draw(const DiffusionModel& model, const ParamVec& theta, std::uint64_t seed);
double stationary_draw(const DensityTable& table, std::uint64_t seed);

/// Stationary-start path: inverse-cdf initial draw, then Euler-Maruyama.
/// Passing a prebuilt table avoids re-tabulating the density per replicate.
SamplePath simulate_stationary(const DiffusionModel& model, const ParamVec& theta, double T,
                               double h, std::uint64_t seed,
                               const DensityTable* table = nullptr);

/// Warm-up alternative: start at x0 and discard a burn-in of
/// max(10/h, 1e4) steps before t = 0.
SamplePath simulate_burnin(const DiffusionModel& model, const ParamVec& theta, double x0, double T,
                           double h, std::uint64_t seed);

}  // namespace sdemle
