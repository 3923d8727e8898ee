#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "saddle_raar/io.hpp"

namespace saddle_raar::cli {

/// Bad flags, bad config files, out-of-range values, unwritable outputs.
class UsageError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

struct RunConfig {
  /// solve | sweep | cdp | certify | gap
  std::string command = "solve";
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  bool strict = false;

  // Problem.
  std::string ensemble = "gaussian";  // gaussian | cdp
  std::int64_t n = 16;
  std::int64_t N = 64;
  std::string grid = "32x32";
  int masks = 2;
  std::string object = "auto";  // auto | random | rpp
  std::string noise = "none";   // none | poisson
  double noise_level = 0.18;

  // Solver.
  std::string algo = "raar";  // raar | admm | drs
  double beta = 0.9;
  double rho = 1.0;
  std::string schedule = "constant";  // constant | ramp
  int hold = 300;
  double end = 0.5;
  int max_iters = 600;
  bool fixed_budget = false;
  double tol = 1e-10;
  int record_every = 1;
  double success_tol = 1e-5;

  // Initialization.
  std::string init = "null";  // null | random
  double weak_fraction = 0.5;
  int power_iters = 200;

  // sweep
  bool full_grid = false;
  std::int64_t sweep_n = 100;
  std::vector<double> ratios{4.0};
  std::vector<double> betas{0.9};
  int trials = 40;
  int sweep_iters = 5000;

  // cdp
  std::string cdp_case = "a";
  std::vector<double> paths{0.95, 0.9, 0.8, 0.7, 0.6};

  // certify
  std::string state_file;

  // gap
  int seeds = 20;

  int pgm_bits = 8;

  bool operator==(const RunConfig&) const = default;
};

io::Json to_json(const RunConfig& cfg);
/// Rejects keys that RunConfig does not have.
RunConfig from_json(const io::Json& j);

/// "ROWSxCOLS" -> GridShape.
GridShape parse_grid(const std::string& s);

/// Range and consistency checks; throws UsageError naming the contract.
void validate(const RunConfig& cfg);

struct ParseResult {
  RunConfig config;
  bool print_effective_config = false;
  /// Set for --help; the text is in `message`.
  bool help = false;
  std::string message;
};

/// Flags override values from --config FILE. Throws UsageError.
ParseResult parse_config(int argc, const char* const* argv);

/// Runs the configured command, writing artifacts under cfg.out_dir.
/// Returns an exit status; errors inside the run are reported on `log`.
int execute(const RunConfig& cfg, std::ostream& log);

/// Full command-line entry point.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace saddle_raar::cli
