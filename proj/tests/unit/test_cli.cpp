#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "saddle_raar/cli.hpp"

using namespace saddle_raar;
using namespace saddle_raar::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("saddle_raar_cli_" + name);
  fs::remove_all(p);
  return p;
}

ParseResult parse(std::vector<std::string> args) {
  args.insert(args.begin(), "saddle-raar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_config(static_cast<int>(argv.size()), argv.data());
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "saddle-raar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

io::Json read_json(const fs::path& p) { return io::Json::parse(io::read_file(p)); }

std::string first_line(const fs::path& p) {
  const std::string s = io::read_file(p);
  return s.substr(0, s.find('\n'));
}

}  // namespace

TEST_CASE("solve flags parse into the config") {
  const fs::path dir = scratch_dir("parse");
  const auto r = parse({"solve", "--algo", "raar", "--beta", "0.9", "--n", "16", "--N", "64", "--seed", "1", "--out",
                        dir.string()});
  CHECK(r.config.command == "solve");
  CHECK(r.config.algo == "raar");
  CHECK(r.config.beta == 0.9);
  CHECK(r.config.n == 16);
  CHECK(r.config.N == 64);
  CHECK(r.config.seed == 1);
  CHECK(fs::exists(dir));
  fs::remove_all(dir);
}

TEST_CASE("out-of-range beta names the admissible interval") {
  try {
    parse({"solve", "--beta", "1.5", "--print-effective-config"});
    FAIL("expected a usage error");
  } catch (const UsageError& ex) {
    CHECK(std::string(ex.what()).find("(0, 1]") != std::string::npos);
  }
  CHECK(run({"solve", "--beta", "1.5"}) == kExitUsage);
}

TEST_CASE("other usage errors") {
  CHECK_THROWS_AS(parse({"solve", "--no-such-flag", "--print-effective-config"}), UsageError);
  CHECK_THROWS_AS(parse({"solve", "--beta", "0.5", "--rho", "2", "--print-effective-config"}), UsageError);
  CHECK_THROWS_AS(parse({"teleport", "--print-effective-config"}), UsageError);
  CHECK_THROWS_AS(parse({"certify", "--print-effective-config"}), UsageError);
  CHECK_THROWS_AS(parse({"solve", "--grid", "8by8", "--print-effective-config"}), UsageError);
  CHECK_THROWS_AS(parse({"sweep", "--full-grid", "--ratios", "3,4", "--print-effective-config"}), UsageError);
  CHECK_THROWS_AS(parse({"solve", "--out", "/proc/forbidden/out"}), UsageError);
}

TEST_CASE("flags override the config file") {
  const fs::path dir = scratch_dir("precedence");
  fs::create_directories(dir);
  const fs::path cfg = dir / "cfg.json";
  io::atomic_write(cfg, R"({"beta": 0.8, "n": 12, "N": 48})");
  auto r = parse({"solve", "--config", cfg.string(), "--beta", "0.9", "--print-effective-config"});
  CHECK(r.config.beta == 0.9);
  CHECK(r.config.n == 12);
  r = parse({"solve", "--config", cfg.string(), "--print-effective-config"});
  CHECK(r.config.beta == 0.8);
  fs::remove_all(dir);
}

TEST_CASE("config files with unknown keys are rejected") {
  const fs::path dir = scratch_dir("unknown");
  fs::create_directories(dir);
  const fs::path cfg = dir / "cfg.json";
  io::atomic_write(cfg, R"({"beta": 0.8, "betta": 0.7})");
  CHECK_THROWS_AS(parse({"solve", "--config", cfg.string(), "--print-effective-config"}), UsageError);
  io::atomic_write(cfg, R"({"beta": "high"})");
  CHECK_THROWS_AS(parse({"solve", "--config", cfg.string(), "--print-effective-config"}), UsageError);
  io::atomic_write(cfg, "{not json");
  CHECK_THROWS_AS(parse({"solve", "--config", cfg.string(), "--print-effective-config"}), UsageError);
  fs::remove_all(dir);
}

TEST_CASE("printed effective config parses back to the same config") {
  std::string text;
  REQUIRE(run({"cdp", "--case", "c", "--paths", "0.9,0.6", "--beta", "0.7", "--seed", "5", "--print-effective-config"},
              &text) == kExitOk);
  const fs::path dir = scratch_dir("roundtrip");
  fs::create_directories(dir);
  io::atomic_write(dir / "cfg.json", text);
  const auto a = parse({"cdp", "--case", "c", "--paths", "0.9,0.6", "--beta", "0.7", "--seed", "5",
                        "--print-effective-config"});
  const auto b = parse({"--config", (dir / "cfg.json").string(), "--print-effective-config"});
  CHECK(a.config == b.config);
  CHECK(from_json(to_json(a.config)) == a.config);
  fs::remove_all(dir);
}

TEST_CASE("solve then certify") {
  const fs::path dir = scratch_dir("certify");
  REQUIRE(run({"solve", "--n", "8", "--N", "32", "--beta", "0.8", "--max-iters", "5000", "--init", "random", "--out",
               dir.string()}) == kExitOk);
  CHECK(first_line(dir / "trace.csv") == "k,beta_or_rho,residual,deriv_norm,t_ratio,objective_F,wall_ns");
  const auto summary = read_json(dir / "summary.json");
  CHECK(summary["command"] == "solve");
  CHECK(summary.contains("aligned_error"));

  const fs::path cert_dir = dir / "cert";
  REQUIRE(run({"certify", "--state", (dir / "state.json").string(), "--out", cert_dir.string()}) == kExitOk);
  const auto cert = read_json(cert_dir / "summary.json");
  CHECK(cert.contains("phase_residual"));
  CHECK(cert.contains("hessian_min_eig"));
  REQUIRE(cert.contains("beta_interval"));
  CHECK(cert["beta_interval"].size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("strict mode reports non-convergence with exit status 2") {
  const fs::path dir = scratch_dir("strict");
  CHECK(run({"solve", "--n", "8", "--N", "32", "--max-iters", "2", "--strict", "--out", dir.string()}) ==
        kExitNotConverged);
  CHECK(run({"solve", "--n", "8", "--N", "32", "--max-iters", "2", "--out", dir.string()}) == kExitOk);
  fs::remove_all(dir);
}

TEST_CASE("DRS solve and certify") {
  const fs::path dir = scratch_dir("drs");
  REQUIRE(run({"solve", "--algo", "drs", "--rho", "0.25", "--n", "8", "--N", "32", "--max-iters", "5000", "--out",
               dir.string()}) == kExitOk);
  REQUIRE(run({"certify", "--state", (dir / "state.json").string(), "--out", (dir / "cert").string()}) == kExitOk);
  const auto cert = read_json(dir / "cert" / "summary.json");
  CHECK(cert["algo"] == "drs");
  CHECK(cert.contains("drs"));
  fs::remove_all(dir);
}

TEST_CASE("gap writes one row per seed") {
  const fs::path dir = scratch_dir("gap");
  REQUIRE(run({"gap", "--grid", "4x4", "--masks", "2", "--seeds", "3", "--out", dir.string()}) == kExitOk);
  const auto s = read_json(dir / "summary.json");
  REQUIRE(s["runs"].size() == 3);
  for (const auto& row : s["runs"]) CHECK(row["lambda2"].get<double>() < 1.0);
  CHECK(first_line(dir / "gap.csv") == "seed_index,lambda2,hessian_min_eig,gap_bound_ok,hypothesis_met");
  fs::remove_all(dir);
}

TEST_CASE("sweep CSV schema") {
  const fs::path dir = scratch_dir("sweep");
  REQUIRE(run({"sweep", "--sweep-n", "6", "--trials", "2", "--sweep-iters", "200", "--out", dir.string()}) == kExitOk);
  CHECK(first_line(dir / "sweep.csv").rfind("ratio,param,algo,success_rate", 0) == 0);
  const auto j = read_json(dir / "sweep.json");
  CHECK(j["cells"].size() == 2);
  CHECK(j["trials"].size() == 4);
  fs::remove_all(dir);
}

TEST_CASE("cdp writes traces, images and correlations") {
  const fs::path dir = scratch_dir("cdp");
  REQUIRE(run({"cdp", "--grid", "16x16", "--case", "b", "--paths", "0.9", "--hold", "20", "--max-iters", "40",
               "--out", dir.string()}) == kExitOk);
  CHECK(fs::exists(dir / "correlations.csv"));
  CHECK(fs::exists(dir / "object_mag.pgm"));
  bool trace = false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("trace_", 0) == 0) trace = true;
    CHECK(name.find(".tmp") == std::string::npos);
  }
  CHECK(trace);
  fs::remove_all(dir);
}
