#include "sdemle/models.hpp"

#include <cmath>

#include "sdemle/errors.hpp"
#include "sdemle/estimate.hpp"

namespace sdemle {

void ParameterSpace::validate() const {
  if (lower.size() < 1 || lower.size() > 2)
    throw ConfigError("parameter space dimension must be 1 or 2, got " +
                      std::to_string(lower.size()));
  if (lower.size() != upper.size())
    throw ConfigError("parameter space bounds have mismatched dimensions");
  for (int i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i]))
      throw ConfigError("parameter space requires lower < upper in coordinate " +
                        std::to_string(i));
}

bool ParameterSpace::contains(const ParamVec& theta) const {
  if (theta.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (!(theta[i] > lower[i] && theta[i] < upper[i])) return false;
  return true;
}

ParamVec ParameterSpace::clamp(const ParamVec& theta, bool* clamped) const {
  ParamVec out = theta;
  bool any = false;
  for (int i = 0; i < dim(); ++i) {
    const double margin = 1e-6 * (upper[i] - lower[i]);
    const double lo = lower[i] + margin;
    const double hi = upper[i] - margin;
    if (!(out[i] >= lo)) {
      out[i] = lo;
      any = true;
    } else if (!(out[i] <= hi)) {
      out[i] = hi;
      any = true;
    }
  }
  if (clamped) *clamped = any;
  return out;
}

namespace {

double unit_sigma(double) { return 1.0; }
double zero_sigma_dx(double) { return 0.0; }

}  // namespace

DiffusionModel quartic_model(double a, double b) {
  if (!(a < b)) throw ConfigError("quartic model requires a < b");
  DiffusionModel m;
  m.id = "quartic";
  m.dim_param = 1;
  m.theta_space = ParameterSpace{ParamVec::of(a), ParamVec::of(b)};
  m.drift = [](const ParamVec& th, double x) {
    const double y = x - th[0];
    return -y * y * y;
  };
  m.drift_grad = [](const ParamVec& th, double x) {
    const double y = x - th[0];
    return ParamVec::of(3.0 * y * y);
  };
  m.drift_hess = [](const ParamVec& th, double x) {
    SymMatrix h(1);
    h.set(0, 0, -6.0 * (x - th[0]));
    return h;
  };
  m.drift_grad_dx = [](const ParamVec& th, double x) {
    return ParamVec::of(6.0 * (x - th[0]));
  };
  m.sigma = unit_sigma;
  m.sigma_dx = zero_sigma_dx;
  m.grad_antiderivative = [](const ParamVec& th, double x) {
    const double y = x - th[0];
    return ParamVec::of(y * y * y);
  };
  const ParameterSpace space = m.theta_space;
  m.preliminary = [space](const SamplePath& path, double delta) {
    return preliminary_quartic(space, path, delta);
  };
  return m;
}

DiffusionModel quartic2d_model(const ParameterSpace& bounds) {
  bounds.validate();
  if (bounds.dim() != 2) throw ConfigError("quartic2d model requires a 2-dimensional space");
  if (!(bounds.lower[1] > 0.0))
    throw ConfigError("quartic2d model requires beta bounded away from 0");
  DiffusionModel m;
  m.id = "quartic2d";
  m.dim_param = 2;
  m.theta_space = bounds;
  m.drift = [](const ParamVec& th, double x) {
    const double y = x - th[0];
    return -th[1] * y * y * y;
  };
  m.drift_grad = [](const ParamVec& th, double x) {
    const double y = x - th[0];
    return ParamVec::of(3.0 * th[1] * y * y, -y * y * y);
  };
  m.drift_hess = [](const ParamVec& th, double x) {
    const double y = x - th[0];
    SymMatrix h(2);
    h.set(0, 0, -6.0 * th[1] * y);
    h.set(0, 1, 3.0 * y * y);
    h.set(1, 1, 0.0);
    return h;
  };
  m.drift_grad_dx = [](const ParamVec& th, double x) {
    const double y = x - th[0];
    return ParamVec::of(6.0 * th[1] * y, -3.0 * y * y);
  };
  m.sigma = unit_sigma;
  m.sigma_dx = zero_sigma_dx;
  m.grad_antiderivative = [](const ParamVec& th, double x) {
    const double y = x - th[0];
    return ParamVec::of(th[1] * y * y * y, -0.25 * y * y * y * y);
  };
  const ParameterSpace space = m.theta_space;
  m.preliminary = [space](const SamplePath& path, double delta) {
    return preliminary_quartic2d(space, path, delta);
  };
  return m;
}

DiffusionModel ou_model(const ParameterSpace& bounds) {
  bounds.validate();
  if (bounds.dim() != 1) throw ConfigError("ou model requires a 1-dimensional space");
  if (!(bounds.lower[0] > 0.0)) throw ConfigError("ou model requires a positive theta range");
  DiffusionModel m;
  m.id = "ou";
  m.dim_param = 1;
  m.theta_space = bounds;
  m.drift = [](const ParamVec& th, double x) { return -th[0] * x; };
  m.drift_grad = [](const ParamVec&, double x) { return ParamVec::of(-x); };
  m.drift_hess = [](const ParamVec&, double) {
    SymMatrix h(1);
    h.set(0, 0, 0.0);
    return h;
  };
  m.drift_grad_dx = [](const ParamVec&, double) { return ParamVec::of(-1.0); };
  m.sigma = unit_sigma;
  m.sigma_dx = zero_sigma_dx;
  m.grad_antiderivative = [](const ParamVec&, double x) { return ParamVec::of(-0.5 * x * x); };
  const ParameterSpace space = m.theta_space;
  m.preliminary = [space](const SamplePath& path, double delta) {
    return preliminary_ou_variance(space, path, delta);
  };
  return m;
}

ParameterSpace default_bounds(const std::string& id) {
  if (id == "quartic") return {ParamVec::of(0.0), ParamVec::of(2.0)};
  if (id == "quartic2d") return {ParamVec::of(-2.0, 0.2), ParamVec::of(2.0, 5.0)};
  if (id == "ou") return {ParamVec::of(0.1), ParamVec::of(5.0)};
  throw ConfigError("unknown model id: " + id);
}

DiffusionModel make_model(const std::string& id) { return make_model(id, default_bounds(id)); }

DiffusionModel make_model(const std::string& id, const ParameterSpace& bounds) {
  if (id == "quartic") {
    if (bounds.dim() != 1) throw ConfigError("quartic model requires 1-dimensional bounds");
    return quartic_model(bounds.lower[0], bounds.upper[0]);
  }
  if (id == "quartic2d") return quartic2d_model(bounds);
  if (id == "ou") return ou_model(bounds);
  throw ConfigError("unknown model id: " + id);
}

bool mean_reversion_ok(const DiffusionModel& model, const ParamVec& theta, double x) {
  if (x == 0.0) return true;
  const double s = model.sigma(x);
  const double v = (x > 0 ? 1.0 : -1.0) * model.drift(theta, x) / (s * s);
  return v < 0.0;
}

}  // namespace sdemle
