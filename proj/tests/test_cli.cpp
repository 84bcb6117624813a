// CLI end-to-end checks. argv[1] is the path to the sdemle binary.
#define DOCTEST_CONFIG_IMPLEMENT
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sdemle/sample_path.hpp"

namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_dir;

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunResult run(const std::string& args) {
  const fs::path out = g_dir / "stdout.txt";
  const fs::path err = g_dir / "stderr.txt";
  const std::string cmd = g_cli + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("fisher subcommand prints the information matrix as json") {
  const RunResult r = run("fisher --model quartic --theta 1.0");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["information"][0][0].get<double>() - 4.5) < 1e-6);
  CHECK(std::abs(j["inverse"][0][0].get<double>() - 1.0 / 4.5) < 1e-6);
  CHECK(j["eigenvalues"].size() == 1);

  const RunResult ou = run("fisher --model ou --theta 1.0");
  REQUIRE(ou.exit_code == 0);
  CHECK(std::abs(nlohmann::json::parse(ou.out)["information"][0][0].get<double>() - 0.5) < 1e-8);
}

TEST_CASE("estimate runs are deterministic per seed") {
  const std::string base = "estimate --model ou --theta 1.0 --T 200 --h 0.01 --delta 0.75 "
                           "--method one_step --tau-grid uniform:10 --output-dir " +
                           g_dir.string();
  REQUIRE(run(base + " --seed 7 --out a").exit_code == 0);
  REQUIRE(run(base + " --seed 7 --out b").exit_code == 0);
  REQUIRE(run(base + " --seed 8 --out c").exit_code == 0);
  const std::string a = slurp(g_dir / "a.csv");
  CHECK(a == slurp(g_dir / "b.csv"));
  CHECK(a != slurp(g_dir / "c.csv"));
  CHECK(a.find("tau,theta_1") != std::string::npos);
}

TEST_CASE("estimate json embeds the resolved config") {
  const RunResult r = run("estimate --model quartic --theta 1.0 --T 100 --h 0.01 --delta 0.75 "
                          "--method one_step --seed 4 --tau-grid uniform:5 --output-dir " +
                          g_dir.string() + " --out cfg_echo");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(slurp(g_dir / "cfg_echo.json"));
  CHECK(j["config"]["model"] == "quartic");
  CHECK(j["config"]["T"] == 100.0);
  CHECK(j["config"]["seed"] == 4);
  CHECK(j["config"]["bounds"]["lower"][0] == 0.0);
  CHECK(j["schema_version"] == 1);
  CHECK(j["estimates"].size() == 5);
}

TEST_CASE("override precedence: command line beats config file beats defaults") {
  const fs::path cfg = g_dir / "layer.ini";
  std::ofstream(cfg) << "T = 200\nseed = 33\n";
  const std::string tail = " --model ou --theta 1.0 --h 0.01 --delta 0.75 --method one_step "
                           "--tau-grid uniform:4 --output-dir " +
                           g_dir.string();

  // default
  REQUIRE(run("estimate" + tail + " --out l0").exit_code == 0);
  CHECK(nlohmann::json::parse(slurp(g_dir / "l0.json"))["config"]["T"] == 1000.0);
  // config file
  REQUIRE(run("estimate --config " + cfg.string() + tail + " --out l1").exit_code == 0);
  const auto j1 = nlohmann::json::parse(slurp(g_dir / "l1.json"));
  CHECK(j1["config"]["T"] == 200.0);
  CHECK(j1["config"]["seed"] == 33);
  // command line on top
  REQUIRE(run("estimate --config " + cfg.string() + " --T 400" + tail + " --out l2").exit_code ==
          0);
  const auto j2 = nlohmann::json::parse(slurp(g_dir / "l2.json"));
  CHECK(j2["config"]["T"] == 400.0);
  CHECK(j2["config"]["seed"] == 33);
}

TEST_CASE("config file with a bounds section") {
  const fs::path cfg = g_dir / "bounds.ini";
  std::ofstream(cfg) << "model = quartic\ntheta = 0.5\n[bounds]\nlower = -1.0\nupper = 1.0\n";
  const RunResult r = run("fisher --config " + cfg.string());
  REQUIRE(r.exit_code == 0);
  CHECK(std::abs(nlohmann::json::parse(r.out)["information"][0][0].get<double>() - 4.5) < 1e-6);
}

TEST_CASE("error exit codes") {
  CHECK(run("estimate --config /definitely/not/here.ini").exit_code == 1);
  CHECK(run("estimate --config /definitely/not/here.ini").err.find("/definitely/not/here.ini") !=
        std::string::npos);
  CHECK(run("estimate --frobnicate").exit_code == 1);
  CHECK(run("montecarlo --model quartic --theta 1.0 --tau-grid ,").exit_code == 1);
  CHECK(run("montecarlo --model quartic --theta 5.0 --T 100 --delta 0.75").exit_code == 1);
  CHECK(run("compare onlyone.ini").exit_code == 1);
  CHECK(run("").exit_code == 1);  // missing subcommand

  // numerical failure (divergent simulation from a far fixed start) -> 2
  const RunResult div = run("estimate --model quartic --theta 1.0 --T 100 --h 0.01 "
                            "--delta 0.75 --method one_step --init fixed --x0 999999 "
                            "--output-dir " +
                            g_dir.string() + " --out divergent");
  CHECK(div.exit_code == 2);
  CHECK(div.err.find("diverged") != std::string::npos);
}

TEST_CASE("simulate csv and binary agree bit-exactly") {
  REQUIRE(run("simulate --model quartic --theta 1.0 --T 50 --h 0.01 --seed 12 --format both "
              "--output-dir " +
              g_dir.string() + " --out rt")
              .exit_code == 0);
  const sdemle::SamplePath csv = sdemle::read_path_csv((g_dir / "rt.csv").string());
  const sdemle::SamplePath bin = sdemle::read_path_binary((g_dir / "rt.bin").string());
  REQUIRE(csv.values.size() == bin.values.size());
  for (std::size_t j = 0; j < csv.values.size(); ++j) CHECK(csv.values[j] == bin.values[j]);
  CHECK(csv.seed == bin.seed);
}

TEST_CASE("burn-in init and empirical fisher mode run end to end") {
  const RunResult sim = run("simulate --model quartic --theta 1.0 --T 20 --h 0.01 --seed 6 "
                            "--init burnin --x0 0.5 --output-dir " +
                            g_dir.string() + " --out warm");
  CHECK(sim.exit_code == 0);
  const RunResult est = run("estimate --model quartic --theta 1.0 --T 100 --h 0.01 --delta 0.75 "
                            "--method one_step --seed 6 --fisher empirical --tau-grid uniform:4 "
                            "--output-dir " +
                            g_dir.string() + " --out empf");
  CHECK(est.exit_code == 0);
  CHECK(nlohmann::json::parse(slurp(g_dir / "empf.json"))["config"]["fisher"] == "empirical");
}

TEST_CASE("environment variable supplies the default output directory") {
  const fs::path envdir = g_dir / "from_env";
  fs::create_directories(envdir);
  const fs::path out = g_dir / "stdout.txt";
  const fs::path err = g_dir / "stderr.txt";
  const std::string cmd = "SDEMLE_OUTPUT_DIR=" + envdir.string() + " " + g_cli +
                          " simulate --model ou --theta 1.0 --T 20 --h 0.01 --seed 2 --out envp" +
                          " > " + out.string() + " 2> " + err.string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(envdir / "envp.csv"));
}

TEST_CASE("montecarlo gate fails on degenerate standardized errors") {
  // noise-free run: zero variance, far from the Wiener thresholds -> exit 3
  const RunResult r = run("montecarlo --model quartic --theta 1.0 --T 100 --h 0.01 --delta 0.75 "
                          "--method one_step --replicates 4 --noise-free --x0 1.0 "
                          "--tau-grid uniform:6 --gate --output-dir " +
                          g_dir.string() + " --out gate_run");
  CHECK(r.exit_code == 3);
  CHECK(r.out.find("gate: FAIL") != std::string::npos);
}

TEST_CASE("montecarlo stats json lands on disk with the config echo") {
  const RunResult r = run("montecarlo --model ou --theta 1.0 --T 100 --h 0.01 --delta 0.75 "
                          "--method one_step --replicates 6 --seed 2 --tau-grid uniform:5 "
                          "--dump-replicates --output-dir " +
                          g_dir.string() + " --out mc_out");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(slurp(g_dir / "mc_out.json"));
  CHECK(j["config"]["model"] == "ou");
  CHECK(j["config"]["replicates"] == 6);
  CHECK(j["variance_ratio"].size() == 5);
  CHECK(slurp(g_dir / "mc_out_replicates.csv").find("replicate,tau,theta_1") !=
        std::string::npos);
}

TEST_CASE("compare produces the efficiency table") {
  const fs::path ca = g_dir / "cmp_one.ini";
  const fs::path cb = g_dir / "cmp_mle.ini";
  std::ofstream(ca) << "model = quartic\ntheta = 1.0\nT = 100\nh = 0.01\ndelta = 0.75\n"
                       "method = one_step\ntau-grid = uniform:4\nreplicates = 6\nseed = 3\n";
  std::ofstream(cb) << "model = quartic\ntheta = 1.0\nT = 100\nh = 0.01\ndelta = 0.75\n"
                       "method = reference_mle\ntau-grid = uniform:4\nreplicates = 6\nseed = 3\n"
                       "mle-grid-points = 8\n";
  const RunResult r =
      run("compare " + ca.string() + " " + cb.string() + " --output-dir " + g_dir.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("one_step") != std::string::npos);
  CHECK(r.out.find("reference_mle") != std::string::npos);
  CHECK(r.out.find("one-step cost / reference-MLE cost") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(g_dir / "compare.json"));
  CHECK(j["entries"].size() == 2);
  // the cost advantage only shows at real horizons; here just require the
  // ratio to be emitted (the acceptance suite pins the < 5% claim at scale)
  CHECK(j["one_step_vs_mle_cost"].get<double>() > 0.0);
}

TEST_CASE("quartic-demo preset runs both legs") {
  const RunResult r = run("montecarlo --preset quartic-demo --replicates 4 --T 100 "
                          "--tau-grid uniform:4 --seed 9 --output-dir " +
                          g_dir.string() + " --out demo");
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(g_dir / "demo_one_step.json"));
  CHECK(fs::exists(g_dir / "demo_two_step.json"));
  const auto j1 = nlohmann::json::parse(slurp(g_dir / "demo_one_step.json"));
  const auto j2 = nlohmann::json::parse(slurp(g_dir / "demo_two_step.json"));
  CHECK(j1["config"]["delta"] == 0.75);
  CHECK(j2["config"]["delta"] == 0.375);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-sdemle-binary>\n");
    return 2;
  }
  g_cli = argv[1];
  g_dir = fs::temp_directory_path() / "sdemle_cli_tests";
  fs::create_directories(g_dir);
  doctest::Context ctx;
  const int rc = ctx.run();
  fs::remove_all(g_dir);
  return rc;
}
