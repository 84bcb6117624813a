#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "sdemle/errors.hpp"
#include "sdemle/rng.hpp"
#include "sdemle/simulate.hpp"

using namespace sdemle;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sdemle_test_" + name);
}

}  // namespace

TEST_CASE("drift-only steps with forced zero noise") {
  const double h = 0.01;
  const auto zero = [](std::size_t) { return 0.0; };
  const SamplePath ou =
      euler_maruyama_with_noise(make_model("ou"), ParamVec::of(1.0), 2.0, 1.0, h, zero);
  CHECK(ou.values[1] == doctest::Approx(2.0 - 2.0 * h).epsilon(1e-15));

  const SamplePath q = euler_maruyama_with_noise(quartic_model(-1.0, 1.0), ParamVec::of(0.0), 0.0,
                                                 1.0, h, zero);
  CHECK(q.values[1] == 0.0);
}

TEST_CASE("ou long-run moments match the stationary law") {
  const DiffusionModel ou = make_model("ou");
  const SamplePath path = euler_maruyama(ou, ParamVec::of(1.0), 0.0, 1000.0, 0.01, 21);
  double s = 0, s2 = 0;
  for (double v : path.values) {
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(path.values.size());
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(mean > -0.1);
  CHECK(mean < 0.1);
  CHECK(var == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("reproducibility: identical seed gives bit-identical paths") {
  const DiffusionModel ou = make_model("ou");
  const SamplePath a = euler_maruyama(ou, ParamVec::of(0.8), 0.3, 50.0, 0.01, 99);
  const SamplePath b = euler_maruyama(ou, ParamVec::of(0.8), 0.3, 50.0, 0.01, 99);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t j = 0; j < a.values.size(); ++j) CHECK(a.values[j] == b.values[j]);
  const SamplePath c = euler_maruyama(ou, ParamVec::of(0.8), 0.3, 50.0, 0.01, 100);
  CHECK(a.values.back() != c.values.back());
}

TEST_CASE("weak order: ou lag-h autocorrelation") {
  const DiffusionModel ou = make_model("ou");
  const double h = 0.01, theta = 1.0;
  const SamplePath path = simulate_stationary(ou, ParamVec::of(theta), 1000.0, h, 5);
  double m = 0;
  for (double v : path.values) m += v;
  m /= static_cast<double>(path.values.size());
  double c0 = 0, c1 = 0;
  for (std::size_t j = 0; j + 1 < path.values.size(); ++j) {
    c0 += (path.values[j] - m) * (path.values[j] - m);
    c1 += (path.values[j] - m) * (path.values[j + 1] - m);
  }
  const double rho = c1 / c0;
  CHECK(rho == doctest::Approx(std::exp(-theta * h)).epsilon(0.02));
}

TEST_CASE("stationary draws reproduce invariant-law moments") {
  const DiffusionModel q = quartic_model(-1.0, 1.0);
  const DensityTable table = build_density(q, ParamVec::of(0.0));
  CounterRng rng(31, 0);
  const int n = 10000;
  double s1 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = table.sample(rng.uniform(static_cast<std::uint64_t>(i)));
    s1 += x;
    s4 += x * x * x * x;
  }
  CHECK(std::abs(s1 / n) < 0.05);
  // E (xi - theta)^4 = 2 Gamma(5/4)/Gamma(1/4) = 1/2
  CHECK(s4 / n == doctest::Approx(0.5).epsilon(0.10));

  const DiffusionModel ou = make_model("ou");
  const DensityTable ou_table = build_density(ou, ParamVec::of(1.0));
  CounterRng rng2(32, 0);
  double s2 = 0, m1 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = ou_table.sample(rng2.uniform(static_cast<std::uint64_t>(i)));
    m1 += x;
    s2 += x * x;
  }
  const double var = s2 / n - (m1 / n) * (m1 / n);
  CHECK(var == doctest::Approx(0.5).epsilon(0.10));

  // deterministic given seed
  CHECK(stationary_draw(table, 7) == stationary_draw(table, 7));
  CHECK(stationary_draw(table, 7) != stationary_draw(table, 8));
}

TEST_CASE("occupation measure matches the invariant density") {
  const DiffusionModel q = make_model("quartic");
  const ParamVec theta = ParamVec::of(1.0);
  const DensityTable table = build_density(q, theta);
  const SamplePath path = simulate_stationary(q, theta, 2000.0, 0.01, 17, &table);

  const int bins = 50;
  std::vector<double> edges(static_cast<std::size_t>(bins - 1));
  for (int b = 1; b < bins; ++b)
    edges[static_cast<std::size_t>(b - 1)] = table.sample(static_cast<double>(b) / bins);
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double v : path.values) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    counts[static_cast<std::size_t>(it - edges.begin())] += 1.0;
  }
  double tv = 0.0;
  for (double c : counts)
    tv += std::abs(c / static_cast<double>(path.values.size()) - 1.0 / bins);
  tv *= 0.5;
  CHECK(tv < 0.05);
}

TEST_CASE("divergence guard reports the step index") {
  const DiffusionModel q = make_model("quartic");
  try {
    euler_maruyama(q, ParamVec::of(1.0), 500.0, 10.0, 0.01, 1);
    FAIL("expected divergence");
  } catch (const SimulationDiverged& e) {
    CHECK(e.step_index == 0);
  }
}

TEST_CASE("argument validation") {
  const DiffusionModel ou = make_model("ou");
  CHECK_THROWS_AS(euler_maruyama(ou, ParamVec::of(-1.0), 0.0, 10.0, 0.01, 1), ConfigError);
  CHECK_THROWS_AS(euler_maruyama(ou, ParamVec::of(1.0), 0.0, 1.0, 0.3, 1), ConfigError);
  CHECK_THROWS_AS(euler_maruyama(ou, ParamVec::of(1.0), 0.0, 0.001, 0.01, 1), ConfigError);
}

TEST_CASE("burn-in initialization yields near-stationary moments") {
  const DiffusionModel q = make_model("quartic");
  const SamplePath path = simulate_burnin(q, ParamVec::of(1.0), 1.0, 500.0, 0.01, 23);
  double s = 0;
  for (double v : path.values) s += v;
  CHECK(s / static_cast<double>(path.values.size()) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("path serialization round trips") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    SamplePath p;
    p.h = 0.01 * (1 + rep % 3);
    p.seed = gen();
    p.values.resize(50);
    for (double& v : p.values) v = u(gen);
    if (rep % 2 == 0) p.theta_true = ParamVec::of(u(gen), std::abs(u(gen)) + 0.5);

    const auto bin = temp_file("roundtrip.bin");
    write_path_binary(p, bin.string());
    const SamplePath pb = read_path_binary(bin.string());
    REQUIRE(pb.values.size() == p.values.size());
    for (std::size_t j = 0; j < p.values.size(); ++j) CHECK(pb.values[j] == p.values[j]);
    CHECK(pb.h == p.h);
    CHECK(pb.seed == p.seed);
    CHECK(pb.theta_true.has_value() == p.theta_true.has_value());
    if (p.theta_true) CHECK(*pb.theta_true == *p.theta_true);

    const auto csv = temp_file("roundtrip.csv");
    write_path_csv(p, csv.string());
    const SamplePath pc = read_path_csv(csv.string());
    REQUIRE(pc.values.size() == p.values.size());
    for (std::size_t j = 0; j < p.values.size(); ++j) CHECK(pc.values[j] == p.values[j]);
    CHECK(pc.seed == p.seed);
    std::filesystem::remove(bin);
    std::filesystem::remove(csv);
  }
}

TEST_CASE("binary reader rejects foreign files") {
  const auto f = temp_file("garbage.bin");
  {
    std::FILE* fp = std::fopen(f.string().c_str(), "wb");
    std::fputs("not a path record at all", fp);
    std::fclose(fp);
  }
  CHECK_THROWS_AS(read_path_binary(f.string()), ConfigError);
  std::filesystem::remove(f);
}
