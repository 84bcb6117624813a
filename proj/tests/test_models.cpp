#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "sdemle/errors.hpp"
#include "sdemle/models.hpp"

using namespace sdemle;

namespace {

bool close(double got, double want, double rel = 1e-5, double abs = 1e-8) {
  return std::abs(got - want) <= std::max(abs, rel * std::abs(want));
}

void check_derivative_consistency(const DiffusionModel& m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ux(-5.0, 5.0);
  const int d = m.dim_param;
  for (int rep = 0; rep < 100; ++rep) {
    ParamVec th(d);
    for (int i = 0; i < d; ++i) {
      std::uniform_real_distribution<double> ut(m.theta_space.lower[i] + 1e-3,
                                                m.theta_space.upper[i] - 1e-3);
      th[i] = ut(gen);
    }
    const double x = ux(gen);
    const double eps = 1e-5;

    // drift_grad vs central difference of drift in theta
    const ParamVec g = m.drift_grad(th, x);
    for (int i = 0; i < d; ++i) {
      ParamVec tp = th, tm = th;
      tp[i] += eps;
      tm[i] -= eps;
      const double fd = (m.drift(tp, x) - m.drift(tm, x)) / (2 * eps);
      CHECK_MESSAGE(close(g[i], fd, 1e-5, 1e-7), m.id << " grad[" << i << "] vs fd");
    }

    // drift_hess vs difference of drift_grad
    const SymMatrix hess = m.drift_hess(th, x);
    for (int i = 0; i < d; ++i) {
      ParamVec tp = th, tm = th;
      tp[i] += eps;
      tm[i] -= eps;
      const ParamVec gp = m.drift_grad(tp, x);
      const ParamVec gm = m.drift_grad(tm, x);
      for (int j = 0; j < d; ++j) {
        const double fd = (gp[j] - gm[j]) / (2 * eps);
        CHECK_MESSAGE(close(hess.at(i, j), fd, 1e-5, 1e-6), m.id << " hess vs fd");
      }
    }

    // drift_grad_dx vs difference of drift_grad in x
    const ParamVec gdx = m.drift_grad_dx(th, x);
    const ParamVec gxp = m.drift_grad(th, x + eps);
    const ParamVec gxm = m.drift_grad(th, x - eps);
    for (int i = 0; i < d; ++i)
      CHECK_MESSAGE(close(gdx[i], (gxp[i] - gxm[i]) / (2 * eps), 1e-5, 1e-6),
                    m.id << " grad_dx vs fd");

    // sigma_dx vs difference of sigma
    CHECK(close(m.sigma_dx(x), (m.sigma(x + eps) - m.sigma(x - eps)) / (2 * eps), 1e-5, 1e-8));
    CHECK(m.sigma(x) > 0.0);

    // antiderivative differentiates back to drift_grad / sigma^2
    if (m.grad_antiderivative) {
      const ParamVec ap = m.grad_antiderivative(th, x + eps);
      const ParamVec am = m.grad_antiderivative(th, x - eps);
      const double s2 = m.sigma(x) * m.sigma(x);
      for (int i = 0; i < d; ++i)
        CHECK_MESSAGE(close((ap[i] - am[i]) / (2 * eps), g[i] / s2, 1e-5, 1e-6),
                      m.id << " antiderivative vs grad");
    }
  }
}

void check_mean_reversion(const DiffusionModel& m) {
  const int d = m.dim_param;
  for (int step = 0; step <= 8; ++step) {
    ParamVec th(d);
    for (int i = 0; i < d; ++i) {
      const double lo = m.theta_space.lower[i], hi = m.theta_space.upper[i];
      th[i] = lo + (hi - lo) * (0.05 + 0.9 * step / 8.0);
    }
    for (double x : {10.0, 25.0, 100.0, -10.0, -25.0, -100.0})
      CHECK_MESSAGE(mean_reversion_ok(m, th, x), m.id << " A0 check at x=" << x);
  }
}

}  // namespace

TEST_CASE("quartic model formulas") {
  const DiffusionModel m = quartic_model(0.0, 2.0);
  CHECK(m.drift(ParamVec::of(1.0), 1.0) == 0.0);
  CHECK(m.drift(ParamVec::of(0.0), 2.0) == -8.0);
  CHECK(m.drift_grad(ParamVec::of(0.0), 2.0)[0] == 12.0);
  CHECK(m.drift_hess(ParamVec::of(0.0), 2.0).at(0, 0) == -12.0);
  CHECK(m.drift_grad_dx(ParamVec::of(0.0), 2.0)[0] == 12.0);
  CHECK(m.sigma(3.7) == 1.0);
  CHECK(m.sigma_dx(3.7) == 0.0);
  CHECK(m.grad_antiderivative(ParamVec::of(0.0), 2.0)[0] == 8.0);
  CHECK_THROWS_AS(quartic_model(2.0, 2.0), ConfigError);
  CHECK_THROWS_AS(quartic_model(3.0, 1.0), ConfigError);
}

TEST_CASE("quartic2d model formulas") {
  const DiffusionModel m = make_model("quartic2d");
  CHECK(m.drift(ParamVec::of(0.0, 2.0), 1.0) == -2.0);
  const ParamVec g = m.drift_grad(ParamVec::of(0.0, 2.0), 1.0);
  CHECK(g[0] == 6.0);
  CHECK(g[1] == -1.0);
  const ParamVec g0 = m.drift_grad(ParamVec::of(1.0, 5.0), 1.0);
  CHECK(g0[0] == 0.0);
  CHECK(g0[1] == 0.0);
  ParameterSpace bad{ParamVec::of(-1.0, 0.0), ParamVec::of(1.0, 2.0)};
  CHECK_THROWS_AS(quartic2d_model(bad), ConfigError);
  ParameterSpace wrong_dim{ParamVec::of(0.0), ParamVec::of(1.0)};
  CHECK_THROWS_AS(quartic2d_model(wrong_dim), ConfigError);
}

TEST_CASE("ou model formulas") {
  const DiffusionModel m = make_model("ou");
  CHECK(m.drift(ParamVec::of(1.0), 3.0) == -3.0);
  CHECK(m.drift_hess(ParamVec::of(1.0), 3.0).at(0, 0) == 0.0);
  CHECK(m.drift_grad(ParamVec::of(2.0), -1.0)[0] == 1.0);
  ParameterSpace bad{ParamVec::of(-1.0), ParamVec::of(1.0)};
  CHECK_THROWS_AS(ou_model(bad), ConfigError);
}

TEST_CASE("derivative callbacks agree with finite differences") {
  check_derivative_consistency(make_model("quartic"), 11);
  check_derivative_consistency(make_model("quartic2d"), 12);
  check_derivative_consistency(make_model("ou"), 13);
}

TEST_CASE("ergodicity diagnostic holds for the built-ins") {
  check_mean_reversion(make_model("quartic"));
  check_mean_reversion(make_model("quartic2d"));
  check_mean_reversion(make_model("ou"));
}

TEST_CASE("parameter space validation and clamping") {
  ParameterSpace space{ParamVec::of(0.0), ParamVec::of(2.0)};
  space.validate();
  CHECK(space.contains(ParamVec::of(1.0)));
  CHECK_FALSE(space.contains(ParamVec::of(0.0)));
  CHECK_FALSE(space.contains(ParamVec::of(2.5)));

  bool clamped = false;
  const ParamVec inside = space.clamp(ParamVec::of(1.3), &clamped);
  CHECK(inside[0] == 1.3);
  CHECK_FALSE(clamped);
  const ParamVec low = space.clamp(ParamVec::of(-4.0), &clamped);
  CHECK(clamped);
  CHECK(low[0] == doctest::Approx(2e-6));
  const ParamVec high = space.clamp(ParamVec::of(9.0), &clamped);
  CHECK(high[0] == doctest::Approx(2.0 - 2e-6));

  ParameterSpace bad{ParamVec::of(1.0), ParamVec::of(1.0)};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("model registry") {
  CHECK(make_model("quartic").id == "quartic");
  CHECK(make_model("quartic2d").dim_param == 2);
  CHECK(make_model("ou").dim_param == 1);
  CHECK_THROWS_AS(make_model("nope"), ConfigError);
}
