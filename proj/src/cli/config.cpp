#include <cmath>
#include <filesystem>
#include <fstream>
#include <string_view>

#include <CLI11.hpp>

#include "saddle_raar/cli.hpp"

namespace saddle_raar::cli {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, command, out_dir, seed, strict, ensemble, n, N, grid,
                                                masks, object, noise, noise_level, algo, beta, rho, schedule, hold,
                                                end, max_iters, fixed_budget, tol, record_every, success_tol, init,
                                                weak_fraction, power_iters, full_grid, sweep_n, ratios, betas, trials,
                                                sweep_iters, cdp_case, paths, state_file, seeds, pgm_bits)

io::Json to_json(const RunConfig& cfg) { return io::Json(cfg); }

RunConfig from_json(const io::Json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  const io::Json known = io::Json(RunConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw UsageError("unknown config key '" + key + "'");
  }
  try {
    return j.get<RunConfig>();
  } catch (const io::Json::exception& ex) {
    throw UsageError(std::string("invalid config value: ") + ex.what());
  }
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void require_member(const std::string& value, std::initializer_list<std::string_view> allowed, const char* field) {
  for (auto a : allowed)
    if (value == a) return;
  std::string list;
  for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw UsageError(std::string(field) + " must be one of {" + list + "}, got '" + value + "'");
}

}  // namespace

GridShape parse_grid(const std::string& s) {
  const auto x = s.find('x');
  require(x != std::string::npos, "grid must look like ROWSxCOLS, got '" + s + "'");
  try {
    std::size_t used_r = 0, used_c = 0;
    const int r = std::stoi(s.substr(0, x), &used_r);
    const int c = std::stoi(s.substr(x + 1), &used_c);
    require(used_r == x && used_c == s.size() - x - 1 && r > 0 && c > 0,
            "grid must look like ROWSxCOLS with positive sizes, got '" + s + "'");
    return GridShape{r, c};
  } catch (const std::logic_error&) {
    throw UsageError("grid must look like ROWSxCOLS, got '" + s + "'");
  }
}

void validate(const RunConfig& c) {
  require_member(c.command, {"solve", "sweep", "cdp", "certify", "gap"}, "command");
  require(!c.out_dir.empty(), "out_dir must not be empty");
  require_member(c.ensemble, {"gaussian", "cdp"}, "ensemble");
  require(c.n >= 1, "n must be >= 1");
  require(c.N >= c.n, "N must be >= n");
  parse_grid(c.grid);
  require(c.masks >= 1, "masks must be >= 1");
  require_member(c.object, {"auto", "random", "rpp"}, "object");
  require_member(c.noise, {"none", "poisson"}, "noise");
  require(c.noise_level > 0.0 && c.noise_level < 1.0, "noise_level must lie in (0, 1)");
  require_member(c.algo, {"raar", "admm", "drs"}, "algo");
  require(c.beta > 0.0 && c.beta <= 1.0, "beta must lie in (0, 1], got " + std::to_string(c.beta));
  require(c.algo != "admm" || c.beta < 1.0, "ADMM beta must lie in (0, 1), got " + std::to_string(c.beta));
  require(c.rho > 0.0 && std::isfinite(c.rho), "rho must be positive and finite");
  require_member(c.schedule, {"constant", "ramp"}, "schedule");
  require(c.hold >= 0, "hold must be >= 0");
  require(c.end > 0.0 && (c.algo == "drs" || c.end <= 1.0), "end must lie in the algorithm's parameter range");
  require(c.max_iters >= 0, "max_iters must be >= 0");
  require(c.schedule != "ramp" || c.max_iters > c.hold, "ramp schedule needs max_iters > hold");
  require(c.tol > 0.0, "tol must be positive");
  require(c.record_every >= 1, "record_every must be >= 1");
  require(c.success_tol > 0.0, "success_tol must be positive");
  require_member(c.init, {"null", "random"}, "init");
  require(c.weak_fraction > 0.0 && c.weak_fraction < 1.0, "weak_fraction must lie in (0, 1)");
  require(c.power_iters >= 1, "power_iters must be >= 1");
  require(c.sweep_n >= 1, "sweep_n must be >= 1");
  require(!c.ratios.empty(), "ratios must not be empty");
  for (double r : c.ratios) require(r >= 1.0, "ratios must be >= 1");
  require(!c.betas.empty(), "betas must not be empty");
  for (double b : c.betas) require(b > 0.0 && b < 1.0, "sweep betas must lie in (0, 1)");
  require(c.trials >= 1, "trials must be >= 1");
  require(c.sweep_iters >= 1, "sweep_iters must be >= 1");
  require_member(c.cdp_case, {"a", "b", "c", "d"}, "cdp_case");
  require(!c.paths.empty(), "paths must not be empty");
  for (double p : c.paths) require(p > 0.0 && p <= 1.0, "path start values must lie in (0, 1]");
  require(c.command != "certify" || !c.state_file.empty(), "certify needs --state FILE");
  require(c.seeds >= 1, "seeds must be >= 1");
  require(c.pgm_bits == 8 || c.pgm_bits == 16, "pgm_bits must be 8 or 16");
}

namespace {

void check_writable(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, "cannot create output directory '" + dir + "': " + ec.message());
  const fs::path probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream f(probe);
    require(static_cast<bool>(f), "output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

}  // namespace

ParseResult parse_config(int argc, const char* const* argv) {
  ParseResult result;

  // The config file is read first so that flags can override it.
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    std::string path;
    if (a == "--config" && i + 1 < argc) path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    if (path.empty()) continue;
    io::Json j;
    try {
      j = io::Json::parse(io::read_file(path));
    } catch (const io::Json::exception& ex) {
      throw UsageError("cannot parse config '" + path + "': " + ex.what());
    } catch (const Error& ex) {
      throw UsageError(ex.what());
    }
    result.config = from_json(j);
  }

  RunConfig& c = result.config;
  CLI::App app{"Phase retrieval with beta-RAAR, ADMM and DRS"};
  app.name("saddle-raar");
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_flag("--print-effective-config", result.print_effective_config, "Print the resolved config and exit");
  app.add_option("command", c.command, "solve | sweep | cdp | certify | gap");
  app.add_option("--out", c.out_dir, "Output directory");
  app.add_option("--seed", c.seed, "Master seed");
  app.add_flag("--strict", c.strict, "Exit 2 when the solver does not converge");

  app.add_option("--ensemble", c.ensemble, "gaussian | cdp");
  app.add_option("--n", c.n, "Object dimension (gaussian)");
  app.add_option("--N", c.N, "Measurement dimension (gaussian)");
  app.add_option("--grid", c.grid, "Object grid ROWSxCOLS (cdp, gap)");
  app.add_option("--masks", c.masks, "Number of masks (cdp, gap)");
  app.add_option("--object", c.object, "auto | random | rpp");
  app.add_option("--noise", c.noise, "none | poisson");
  app.add_option("--noise-level", c.noise_level, "Target relative noise level");

  app.add_option("--algo", c.algo, "raar | admm | drs");
  auto* beta = app.add_option("--beta", c.beta, "beta in (0, 1] (start value for ramps)");
  auto* rho = app.add_option("--rho", c.rho, "DRS penalty rho > 0");
  beta->excludes(rho);
  app.add_option("--schedule", c.schedule, "constant | ramp");
  app.add_option("--hold", c.hold, "Iterations at the start value before the ramp");
  app.add_option("--end", c.end, "Final value of a ramp");
  app.add_option("--max-iters", c.max_iters, "Iteration budget");
  app.add_flag("--fixed-budget", c.fixed_budget, "Run exactly max-iters iterations");
  app.add_option("--tol", c.tol, "Stopping tolerance (residual or derivative norm relative to ||b||)");
  app.add_option("--record-every", c.record_every, "Trace sampling interval");
  app.add_option("--success-tol", c.success_tol, "Aligned error counted as success");

  app.add_option("--init", c.init, "null | random");
  app.add_option("--weak-fraction", c.weak_fraction, "Weak-set fraction of the null-vector method");
  app.add_option("--power-iters", c.power_iters, "Power iterations of the null-vector method");

  auto* full = app.add_flag("--full-grid", c.full_grid, "Sweep every ratio and beta of the full grid");
  auto* ratios = app.add_option("--ratios", c.ratios, "Sweep N/n ratios")->delimiter(',');
  auto* betas = app.add_option("--betas", c.betas, "Sweep betas (DRS uses rho = 1/beta - 1)")->delimiter(',');
  full->excludes(ratios)->excludes(betas);
  app.add_option("--sweep-n", c.sweep_n, "Object dimension of the sweep");
  app.add_option("--trials", c.trials, "Trials per cell");
  app.add_option("--sweep-iters", c.sweep_iters, "Iteration budget per sweep trial");

  app.add_option("--case", c.cdp_case, "CDP case a | b | c | d");
  app.add_option("--paths", c.paths, "Beta-path start values")->delimiter(',');
  app.add_option("--state", c.state_file, "state.json written by solve (certify)");
  app.add_option("--seeds", c.seeds, "Number of mask seeds (gap)");
  app.add_option("--pgm-bits", c.pgm_bits, "8 or 16");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    result.help = true;
    result.message = app.help();
    return result;
  } catch (const CLI::ParseError& ex) {
    throw UsageError(ex.what());
  }

  validate(c);
  if (!result.print_effective_config) check_writable(c.out_dir);
  return result;
}

}  // namespace saddle_raar::cli
