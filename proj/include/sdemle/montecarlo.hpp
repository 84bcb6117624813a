#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "sdemle/estimate.hpp"
#include "sdemle/models.hpp"
#include "sdemle/vec.hpp"

namespace sdemle {

enum class InitMode { stationary, burnin, fixed };

std::string to_string(InitMode m);
EstimatorMethod parse_method(const std::string& s);
FisherMode parse_fisher_mode(const std::string& s);
InitMode parse_init_mode(const std::string& s);

/// Tau grid request: "default", "uniform:K", or an explicit comma list.
struct TauGridSpec {
  enum class Kind { preset, uniform, explicit_list };
  Kind kind = Kind::preset;
  int n = 100;
  std::vector<double> values;

  std::vector<double> build(double tau_delta) const;
  std::string describe() const;
  static TauGridSpec parse(const std::string& text);
};

/// Full description of one Monte Carlo experiment.
struct ExperimentConfig {
  std::string model_id = "quartic";
  std::vector<double> bounds_lower;  // empty -> model defaults
  std::vector<double> bounds_upper;
  std::vector<double> theta_true{1.0};
  double T = 1000.0;
  double h = 0.01;
  double delta = 0.75;
  EstimatorMethod method = EstimatorMethod::one_step;
  TauGridSpec tau_grid;
  int replicates = 1;
  std::uint64_t seed = 1;
  FisherMode fisher_mode = FisherMode::quadrature;
  InitMode init = InitMode::stationary;
  double x0 = 0.0;                      // start state for burnin/fixed init
  bool noise_free = false;              // test hook: zero diffusion, fixed start
  bool standardize_at_estimate = false; // use I(theta-hat) instead of I(theta_0)
  int threads = 0;                      // 0 = hardware concurrency
  int mle_grid_points = 24;

  void validate() const;
  DiffusionModel build_model() const;
  ParamVec theta() const { return ParamVec::from(theta_true); }
  nlohmann::json to_json() const;
};

/// Aggregated standardized-error statistics over replicates. The
/// per-replicate tensors are kept so increment checks and dumps can be run
/// after the fact.
struct ReplicateStats {
  ExperimentConfig config;
  std::vector<double> tau_grid;
  int d = 0;
  int m_total = 0;

  // row-major [replicate][tau][coord]; failed replicates carry NaN
  std::vector<double> estimates;
  std::vector<double> standardized;  // sqrt(tau T) I^{1/2} (theta(tau) - theta_0)

  std::vector<int> failed_replicates;
  std::vector<std::string> failure_reasons;
  int clamp_count = 0;

  std::vector<double> mean_std;        // [tau][coord]
  std::vector<double> cov_std;         // [tau][coord][coord] row-major
  std::vector<double> variance_ratio;  // [tau][coord], sample variance vs 1

  double wall_clock_total_s = 0.0;
  double wall_clock_mean_s = 0.0;

  double est(int i, int k, int c) const {
    return estimates[(static_cast<std::size_t>(i) * tau_grid.size() + static_cast<std::size_t>(k)) *
                         static_cast<std::size_t>(d) +
                     static_cast<std::size_t>(c)];
  }
  double eta(int i, int k, int c) const {
    return standardized[(static_cast<std::size_t>(i) * tau_grid.size() +
                         static_cast<std::size_t>(k)) *
                            static_cast<std::size_t>(d) +
                        static_cast<std::size_t>(c)];
  }
  bool failed(int i) const;
  std::size_t tau_index(double tau) const;  // exact grid lookup

  nlohmann::json to_json(bool include_replicates = false, bool include_timing = true) const;
};

/// Run the experiment: one path + one trajectory per replicate (seed XOR
/// replicate index), standardized errors collected, deterministic ordered
/// aggregation. Throws if more than 5% of replicates fail.
ReplicateStats run_experiment(const ExperimentConfig& config);

/// Disjoint-interval increment diagnostics against the Wiener limit.
struct IncrementCheck {
  std::array<double, 4> taus;             // (t1,t2) vs (t3,t4)
  std::vector<double> corr_per_coord;
  std::vector<double> var_ratio_first;    // Var(inc)/(t2-t1) per coord
  std::vector<double> var_ratio_second;   // Var(inc)/(t4-t3) per coord
  bool pass = false;
};

struct IncrementReport {
  std::vector<IncrementCheck> checks;
  double corr_threshold = 0.15;
  double var_lo = 0.7;
  double var_hi = 1.3;
  bool all_pass = false;
  nlohmann::json to_json() const;
};

IncrementReport wiener_increment_check(const ReplicateStats& stats,
                                       const std::vector<std::array<double, 4>>& tau_pairs,
                                       double corr_threshold = 0.15, double var_lo = 0.7,
                                       double var_hi = 1.3);

/// Method comparison on a shared (model, theta_0, T, h) base: standardized
/// second moments per tau, mean wall clock, and the one-step vs reference-MLE
/// cost ratio when both methods are present.
struct EfficiencyEntry {
  std::string method;
  double delta = 0.0;
  std::vector<double> tau_grid;
  std::vector<double> second_moment;  // E |eta|^2 per tau
  double wall_clock_mean_s = 0.0;
  nlohmann::json config;  // resolved experiment config echo
};

struct EfficiencyReport {
  std::vector<EfficiencyEntry> entries;
  double one_step_vs_mle_cost = -1.0;  // <0 when not applicable
  nlohmann::json to_json() const;
  std::string table() const;
};

EfficiencyReport efficiency_report(const std::vector<ExperimentConfig>& configs);

}  // namespace sdemle
