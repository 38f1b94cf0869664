#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "neckflow/cli.hpp"
#include "neckflow/io.hpp"
#include "support.hpp"

using namespace neckflow;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("evolve writes trace, snapshots and manifest") {
  ScratchDir dir("cli_evolve");
  const auto d = (dir.path / "sphere").string();
  const auto r = run({"evolve", "--lambda", "0", "--n", "100", "--snapshot-dt", "0.05", "--out", d});
  CHECK(r.code == 0);
  const auto m = io::read_json(dir.path / "sphere" / "manifest.json");
  CHECK(m["outcome"] == "ShrinksRound");
  CHECK(m["T_est"].get<double>() == doctest::Approx(0.25).epsilon(0.01));
  for (const char* key : {"config", "config_hash", "versions", "wall_seconds"}) CHECK(m.contains(key));
  CHECK(io::read_trace(dir.path / "sphere" / "trace.csv").records.size() > 10);
  CHECK(io::read_snapshots(dir.path / "sphere" / "snapshots").size() >= 5);
  CHECK(io::read_profile(dir.path / "sphere" / "final.csv").size() == 100);
}

TEST_CASE("usage errors exit with 1 and name the field") {
  auto r = run({"evolve", "--n", "100"});
  CHECK(r.code == 1);
  CHECK(r.err.find("lambda") != std::string::npos);
  CHECK(run({"search", "--lo", "0.95", "--hi", "0.85"}).code == 1);
  CHECK(run({"evolve", "--lambda", "0.5", "--safety", "-1"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("unwritable output is an I/O error") {
  CHECK(run({"soliton", "--out", "/proc/neckflow"}).code == 3);
  CHECK(run({"fit", "--run", "/nonexistent/run"}).code == 3);
}

TEST_CASE("config file values are overridden by flags") {
  ScratchDir dir("cli_cfg");
  io::write_text(dir.path / "run.cfg", "lambda = 0.3\nn = 64\nsafety = 0.4\n");
  const auto out = (dir.path / "o").string();
  CHECK(run({"evolve", "--config", (dir.path / "run.cfg").string(), "--n", "80", "--out", out}).code == 0);
  const auto m = io::read_json(dir.path / "o" / "manifest.json");
  CHECK(m["config"]["n"] == "80");
  CHECK(m["config"]["lambda"] == "0.29999999999999999");
  CHECK(io::read_text(dir.path / "o" / "config.txt").find("n = 80") != std::string::npos);
}

TEST_CASE("NECKFLOW_OUT sets the default output directory") {
  ScratchDir dir("cli_env");
  ::setenv("NECKFLOW_OUT", dir.path.c_str(), 1);
  CHECK(run({"soliton", "--speed", "1"}).code == 0);
  ::unsetenv("NECKFLOW_OUT");
  const auto sol = io::read_soliton(dir.path / "soliton.csv");
  CHECK(sol.samples.front().H == 1.0);
  CHECK(sol.c == 1.0);
}

TEST_CASE("sweep output is byte-identical across reruns") {
  ScratchDir dir("cli_sweep");
  const auto a = (dir.path / "a").string(), b = (dir.path / "b").string();
  const std::vector<std::string> base{"sweep", "--lambdas", "0.3", "0.5", "0.96", "--n", "64",
                                      "--safety", "0.4"};
  auto args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"--out", a});
  args_b.insert(args_b.end(), {"--out", b, "--jobs", "2"});
  CHECK(run(args_a).code == 0);
  CHECK(run(args_b).code == 0);
  CHECK(io::read_text(dir.path / "a" / "sweep.csv") == io::read_text(dir.path / "b" / "sweep.csv"));
  const auto runs = io::read_sweep(dir.path / "a" / "sweep.csv");
  REQUIRE(runs.size() == 3);
  CHECK(runs[2].outcome == Outcome::CentralNeckpinch);
  CHECK(io::read_table(dir.path / "a" / "fig7.csv").rows() == 1);
}

TEST_CASE("fit, compare and hermite read a finished run") {
  ScratchDir dir("cli_fit");
  const auto d = (dir.path / "pinch").string();
  REQUIRE(run({"evolve", "--lambda", "0.96", "--n", "200", "--safety", "0.4",
               "--snapshot-h-growth", "1.2", "--out", d}).code == 0);
  auto r = run({"fit", "--run", d, "--quantity", "H_center", "--decades", "2", "--out", d});
  CHECK(r.code == 0);
  const auto f = io::read_json(dir.path / "pinch" / "fit.json");
  CHECK(f["fit"]["exponent"].get<double>() == doctest::Approx(-0.5).epsilon(0.2));
  CHECK(io::read_table(dir.path / "pinch" / "fig5_rate.csv").rows() >= 10);
  CHECK(run({"fit", "--run", d, "--cusp", "--cusp-window", "0.25", "--out", d}).code == 0);
  CHECK(run({"fit", "--run", d, "--quantity", "H_nowhere"}).code == 1);
  CHECK(run({"compare", "--tip", "--run", d, "--out", d}).code == 0);
  CHECK(io::read_table(dir.path / "pinch" / "fig2.csv").rows() > 10);
  CHECK(run({"compare", "--run", d, "--last", "3", "--window", "1", "--out", d}).code == 0);
  CHECK(io::read_table(dir.path / "pinch" / "compare.csv").rows() == 3);

  r = run({"hermite", "--m", "4"});
  CHECK(r.code == 0);
  CHECK(r.out.find("[0.75,0.0,-3.0,0.0,1.0]") != std::string::npos);
}
