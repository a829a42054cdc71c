#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "entrocurve/commands.hpp"
#include "entrocurve/error.hpp"
#include "entrocurve/models.hpp"
#include "entrocurve/parallel.hpp"

using namespace entrocurve;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr is discarded.
Run run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + ENTROCURVE_CLI_PATH + "' " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("entrocurve_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config JSON round trip and hash") {
  ExperimentConfig c;
  c.model = "bl:n=5,k=2";
  c.nu0 = "dirac:3";
  c.gammas = {0.1, 0.05, 0.01};
  c.seed = 42;
  c.ct_scale = 2.5;
  const ExperimentConfig back = config_from_json(config_to_json(c));
  CHECK(back == c);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  ExperimentConfig d = c;
  d.seed = 43;
  CHECK(config_hash(d) != config_hash(c));
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"seed", "x"}}), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"modle", "circle:N=5"}}), Error);
}

TEST_CASE("t-grid and number lists") {
  const auto g = parse_tgrid("0.1:0.9:9");
  REQUIRE(g.size() == 9);
  CHECK(g.front() == doctest::Approx(0.1));
  CHECK(g.back() == doctest::Approx(0.9));
  CHECK(g[4] == doctest::Approx(0.5));
  CHECK(parse_tgrid("0.25,0.5") == std::vector<double>{0.25, 0.5});
  CHECK(parse_double_list("1e-2,5e-3") == std::vector<double>{1e-2, 5e-3});
  CHECK_THROWS_AS(parse_tgrid("0.1:0.9"), Error);
  CHECK_THROWS_AS(parse_double_list("0.1,abc"), Error);
}

TEST_CASE("marginal presets") {
  const GraphSpace h = build_hypercube({0.3, 0.6, 0.5});
  CHECK(parse_marginal("dirac:5", h, 1) == Vec::Unit(8, 5));
  CHECK((parse_marginal("uniform", h, 1) - Vec::Constant(8, 0.125)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((parse_marginal("measure", h, 1) - h.measure()).cwiseAbs().maxCoeff() < 1e-15);
  const Vec arr = parse_marginal("[1,0,0,0,0,0,0,3]", h, 1);
  CHECK(arr[0] == 0.25);
  CHECK(arr[7] == 0.75);
  const Vec r1 = parse_marginal("random", h, 7), r2 = parse_marginal("random:7", h, 99);
  CHECK(r1 == r2);
  CHECK(std::abs(r1.sum() - 1.0) < 1e-15);
  const Vec r3 = parse_marginal("random:7:3", h, 1);
  CHECK((r3.array() > 0.0).count() == 3);
  CHECK_THROWS_AS(parse_marginal("dirac:8", h, 1), Error);
  CHECK_THROWS_AS(parse_marginal("random:1:0", h, 1), Error);
  CHECK_THROWS_AS(parse_marginal("[1,2]", h, 1), Error);
  CHECK_THROWS_AS(parse_marginal("gaussian", h, 1), Error);
}

TEST_CASE("bridge command") {
  const Run r = run_cli("bridge --model 'complete:mu=uniform:4' --nu0 dirac:0 --nu1 '[0,1,1,0]' --t 0.5");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("header").at("tool") == "entrocurve");
  CHECK(j.at("bridge").at("W1").get<double>() == doctest::Approx(1.0));
  const auto q = j.at("rows").at(0).at("Q").get<std::vector<double>>();
  CHECK(q[0] == doctest::Approx(0.5));
  CHECK(q[1] == doctest::Approx(0.25));

  // the binary prints what the library command returns
  ExperimentConfig c;
  c.model = "complete:mu=uniform:4";
  c.nu0 = "dirac:0";
  c.nu1 = "[0,1,1,0]";
  c.tgrid = "0.5";
  CHECK(cmd_bridge(c).output == r.out);
}

TEST_CASE("convexity command") {
  const Run ok = run_cli("convexity --model 'hypercube:n=3,alpha=0.5' --seed 3");
  CHECK(ok.status == 0);
  CHECK(ok.out.rfind("# entrocurve ", 0) == 0);
  CHECK(ok.out.find("t,entropy,C_t,gap,branch1,branch2,branch3") != std::string::npos);

  const Run bad = run_cli("convexity --model 'hypercube:n=3,alpha=0.5' --seed 3 --ct-scale 10");
  CHECK(bad.status == 1);

  const Run flat = run_cli("convexity --model 'circle:N=7' --seed 2");
  CHECK(flat.status == 0);
  CHECK(flat.out.find("second differences") != std::string::npos);

  const fs::path dir = scratch_dir();
  const fs::path out = dir / "report.json";
  const Run js = run_cli("convexity --model 'bl:n=5,k=2' --out '" + out.string() + "'");
  CHECK(js.status == 0);
  CHECK(js.out.empty());
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("rows").size() == 9);
  CHECK(j.at("header").at("config").at("model") == "bl:n=5,k=2");
  fs::remove_all(dir);
}

TEST_CASE("derivative-audit command") {
  const Run r = run_cli("derivative-audit --model 'complete:mu=uniform:3' --gammas 0.2 --tgrid 0.2:0.8:4");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("rows").size() == 4);
  CHECK(j.at("worst_rel_error_d1").get<double>() <= 1e-5);
  CHECK(j.at("worst_rel_error_d2").get<double>() <= 1e-3);
  CHECK(j.at("zero_temperature_bounds").size() == 4);
  CHECK(run_cli("derivative-audit --model 'circle:N=5' --tgrid 0:1:3").status == 2);
}

TEST_CASE("config files and overrides") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = dir / "cfg.json";
  ExperimentConfig c;
  c.model = "circle:N=6";
  c.nu0 = "dirac:0";
  c.nu1 = "dirac:3";
  c.tgrid = "0.5";
  std::ofstream(cfg) << config_to_json(c).dump();
  const Run a = run_cli("bridge --config '" + cfg.string() + "'");
  REQUIRE(a.status == 0);
  const auto ja = nlohmann::json::parse(a.out);
  CHECK(ja.at("header").at("config_hash") == config_hash(c));
  CHECK(ja.at("bridge").at("W1").get<double>() == 3.0);

  const Run b = run_cli("bridge --config '" + cfg.string() + "' --nu1 dirac:1");
  REQUIRE(b.status == 0);
  CHECK(nlohmann::json::parse(b.out).at("bridge").at("W1").get<double>() == 1.0);

  std::ofstream(dir / "broken.json") << "{not json";
  CHECK(run_cli("bridge --config '" + (dir / "broken.json").string() + "'").status == 2);
  fs::remove_all(dir);
}

TEST_CASE("exit codes for bad input and numerical failure") {
  CHECK(run_cli("bridge --model 'torus:N=4'").status == 2);
  CHECK(run_cli("bridge --model 'circle:N=5' --nu0 dirac:9").status == 2);
  CHECK(run_cli("bridge --gammas 0.5,0.6,0.7").status == 2);
  CHECK(run_cli("frobnicate").status != 0);
  CHECK(run_cli("--version").status == 0);
  // a tolerance below roundoff never converges
  CHECK(run_cli("bridge --model 'circle:N=5' --tol 1e-300").status == 3);

  const CommandResult guarded = run_guarded([]() -> CommandResult {
    throw Error(ErrorKind::ScheduleTooCoarse, "x");
  });
  CHECK(guarded.exit_code == 3);
  CHECK(guarded.message.find("ScheduleTooCoarse") != std::string::npos);
  CHECK(audit_relative_error(1.0, 1.0 + 1e-6) == doctest::Approx(1e-6 / (1.0 + 1e-6)));
  CHECK(audit_relative_error(0.0, 1e-12) < 1e-3);
}

TEST_CASE("parallel_for") {
  CHECK(thread_count() >= 1);
  std::vector<std::size_t> out(257, 0);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = i * i; });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
  parallel_for(0, [](std::size_t) { FAIL("body called for an empty range"); });

  // the lowest failing index wins, whatever the scheduling
  try {
    parallel_for(100, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error("index " + std::to_string(i));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "index 17");
  }
}

}  // TEST_SUITE
