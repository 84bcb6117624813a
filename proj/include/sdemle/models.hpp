#pragma once

#include <functional>
#include <string>

#include "sdemle/sample_path.hpp"
#include "sdemle/spd.hpp"
#include "sdemle/vec.hpp"

namespace sdemle {

/// Open box Theta = prod (a_i, b_i).
struct ParameterSpace {
  ParamVec lower;
  ParamVec upper;

  int dim() const { return lower.size(); }
  void validate() const;
  bool contains(const ParamVec& theta) const;

  /// Project theta into Theta shrunk by margin 1e-6*(upper-lower) per
  /// coordinate. Sets *clamped when a projection happened.
  ParamVec clamp(const ParamVec& theta, bool* clamped = nullptr) const;

  double midpoint(int i) const { return 0.5 * (lower[i] + upper[i]); }
};

struct PrelimResult {
  ParamVec value;
  bool clamped = false;
};

/// Scalar ergodic diffusion dX = S(theta, X) dt + sigma(X) dW with analytic
/// derivative callbacks. Immutable after construction; all callbacks pure.
struct DiffusionModel {
  std::string id;
  int dim_param = 1;
  std::function<double(const ParamVec&, double)> drift;             // S
  std::function<ParamVec(const ParamVec&, double)> drift_grad;      // dS/dtheta
  std::function<SymMatrix(const ParamVec&, double)> drift_hess;     // d2S/dtheta2
  std::function<ParamVec(const ParamVec&, double)> drift_grad_dx;   // d/dx of drift_grad
  std::function<double(double)> sigma;
  std::function<double(double)> sigma_dx;
  ParameterSpace theta_space;
  /// Antiderivative in x of drift_grad(theta, y) / sigma(y)^2; empty when no
  /// closed form is available (quadrature fallback is used instead).
  std::function<ParamVec(const ParamVec&, double)> grad_antiderivative;
  /// Method-of-moments preliminary estimator on [0, T^delta], clamped.
  std::function<PrelimResult(const SamplePath&, double)> preliminary;
};

/// dX = -(X - theta)^3 dt + dW on Theta = (a, b).
DiffusionModel quartic_model(double a, double b);

/// dX = -beta (X - alpha)^3 dt + dW, theta = (alpha, beta), beta > 0.
DiffusionModel quartic2d_model(const ParameterSpace& bounds);

/// dX = -theta X dt + dW, theta > 0 (closed-form test oracle).
DiffusionModel ou_model(const ParameterSpace& bounds);

/// Built-in models by string id: "quartic", "quartic2d", "ou".
DiffusionModel make_model(const std::string& id);
DiffusionModel make_model(const std::string& id, const ParameterSpace& bounds);
ParameterSpace default_bounds(const std::string& id);

/// Mean-reversion diagnostic: sgn(x) S(theta, x) / sigma(x)^2 < 0.
bool mean_reversion_ok(const DiffusionModel& model, const ParamVec& theta, double x);

}  // namespace sdemle
