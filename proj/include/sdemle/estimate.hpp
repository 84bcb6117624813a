#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "sdemle/models.hpp"
#include "sdemle/sample_path.hpp"
#include "sdemle/stationary.hpp"
#include "sdemle/vec.hpp"

namespace sdemle {

enum class FisherMode { quadrature, empirical };
enum class EstimatorMethod { preliminary, one_step, two_step, second_preliminary, reference_mle };

std::string to_string(EstimatorMethod m);
std::string to_string(FisherMode m);

/// One sample of the score process Delta_tau(theta).
struct ScoreSample {
  double tau = 0.0;
  ParamVec value;
  double normalization = 0.0;  // sqrt(tau T)
};

/// Estimator-process values theta(tau) on a tau-grid over [tau_delta, 1].
struct EstimatorTrajectory {
  std::vector<double> tau_grid;
  std::vector<ParamVec> estimates;
  EstimatorMethod method = EstimatorMethod::one_step;
  double delta = 0.0;
  double T = 0.0;
  double h = 0.0;
  std::uint64_t seed = 0;
  ParamVec preliminary;
  bool clamped = false;
  std::string model_id;
  std::optional<ParamVec> theta_true;
};

void write_trajectory_csv(const EstimatorTrajectory& traj, const std::string& file);
std::string trajectory_to_json(const EstimatorTrajectory& traj);

/// Default tau grid: geometric points through the steep early region, then
/// uniform to 1, with {0.25, 0.5, 0.75, 1} snapped in when inside the range.
std::vector<double> default_tau_grid(double tau_delta, int n = 100);

/// Empirical mean of X over the learning interval [0, T^delta], clamped.
PrelimResult preliminary_quartic(const ParameterSpace& space, const SamplePath& path,
                                 double delta);

/// Moment preliminary (alpha, beta) for the two-parameter quartic model.
PrelimResult preliminary_quartic2d(const ParameterSpace& space, const SamplePath& path,
                                   double delta);

/// Variance-matching moment preliminary for the OU model: theta = 1/(2 Var).
PrelimResult preliminary_ou_variance(const ParameterSpace& space, const SamplePath& path,
                                     double delta);

/// Delta_tau(theta) = (tau T)^{-1/2} int_{T^delta}^{tau T} drift_grad/sigma^2
/// [dX - S dt], discretized with left-endpoint sums and path increments.
ScoreSample score_delta(const DiffusionModel& model, const ParamVec& theta,
                        const SamplePath& path, double delta, double tau);

/// Mixed-argument score: drift_grad at theta_grad, compensator drift at
/// theta_drift. hat_score_delta(theta, theta, ...) == score_delta(theta, ...).
ScoreSample hat_score_delta(const DiffusionModel& model, const ParamVec& theta_grad,
                            const ParamVec& theta_drift, const SamplePath& path, double delta,
                            double tau);

/// Pathwise score variant: the stochastic integral is replaced by the
/// antiderivative evaluated at the window endpoints plus ordinary integrals.
ScoreSample score_delta_pathwise(const DiffusionModel& model, const ParamVec& theta,
                                 const SamplePath& path, double delta, double tau);

/// Thread-safe cache of quadrature Fisher matrices keyed by theta rounded to
/// a 1e-4 lattice; bounds the number of quadrature calls in two-step runs.
class FisherCache {
 public:
  explicit FisherCache(double lattice = 1e-4) : lattice_(lattice) {}
  FisherMatrix get(const DiffusionModel& model, const ParamVec& theta);
  std::size_t size() const;

 private:
  double lattice_;
  mutable std::shared_mutex mutex_;
  std::map<std::array<long long, 2>, FisherMatrix> entries_;
};

struct EstimateOptions {
  FisherMode fisher_mode = FisherMode::quadrature;
  FisherCache* cache = nullptr;  // optional shared lattice cache for two-step
};

/// One-step process: theta*(tau) = prelim + I(prelim)^{-1} Delta_tau /
/// sqrt(tau T) for every tau in one O(N) pass. Requires delta in (1/2, 1).
EstimatorTrajectory one_step_process(const DiffusionModel& model, const SamplePath& path,
                                     double delta, const std::vector<double>& tau_grid,
                                     const EstimateOptions& opts = {});

/// Second preliminary at a single tau: prelim + I(prelim)^{-1} Delta_tau /
/// sqrt(tau T). Requires delta in (1/4, 1/2].
ParamVec second_preliminary(const DiffusionModel& model, const ParamVec& prelim,
                            const SamplePath& path, double delta, double tau,
                            const EstimateOptions& opts = {});

/// Two-step process: per tau, the second preliminary followed by the
/// mixed-argument score correction with Fisher at the second preliminary.
EstimatorTrajectory two_step_process(const DiffusionModel& model, const SamplePath& path,
                                     double delta, const std::vector<double>& tau_grid,
                                     const EstimateOptions& opts = {});

struct MleResult {
  ParamVec theta;
  double loglik = 0.0;
  bool boundary = false;  // maximizer landed on the edge of Theta
};

/// Reference MLE on [0, tau T]: coarse theta-grid search refined by Newton
/// iterations on the discretized log-likelihood.
MleResult reference_mle(const DiffusionModel& model, const SamplePath& path, double tau,
                        int grid_points);

}  // namespace sdemle
