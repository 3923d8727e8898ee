#pragma once

// beta-RAAR, its ADMM form (dual step s = 1), Gaussian-DRS, and the shared
// run loop. RAAR is the reference iteration; the ADMM triple (y, z, lambda)
// reproduces the same sequence through w'_k = y_{k+1} + lambda_k.

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "saddle_raar/analysis.hpp"
#include "saddle_raar/operators.hpp"
#include "saddle_raar/schedule.hpp"

namespace saddle_raar {

enum class Algorithm { Raar, Admm, Drs };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct RaarState {
  CVec w;
  int k = 0;
  double beta = 0.5;
};

struct AdmmState {
  CVec y;
  CVec z;
  CVec lambda;
  int k = 0;
  double beta = 0.5;
  /// Dual step size; only 1 is supported.
  double step = 1.0;
};

struct DrsState {
  CVec y;
  CVec z;
  CVec lambda;
  double rho = 1.0;
  int k = 0;
};

using SolverState = std::variant<RaarState, AdmmState, DrsState>;

Algorithm algorithm_of(const SolverState& s);

/// beta' = beta / (1 - beta).
double beta_prime(double beta);
/// beta = 1 / (rho + 1).
double beta_from_rho(double rho);
/// rho = 1/beta - 1 = 1/beta'. Throws RangeError at beta = 1 (rho infinite).
double rho_from_beta(double beta);

/// beta w + (1 - 2 beta) [w]_Z + beta P(2 [w]_Z - w).
CVec raar_step(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& w, double beta);

/// y <- (I - beta (I-P))(z - lambda); z <- [y + lambda]_Z; lambda <- lambda + y - z.
AdmmState admm_step(const MeasurementEnsemble& e, const Magnitudes& b, const AdmmState& s);

/// y <- P(z + lambda/rho); w <- y - lambda/rho; z <- ([w]_Z + rho w)/(1 + rho);
/// lambda <- lambda + rho (z - y).
DrsState drs_step(const MeasurementEnsemble& e, const Magnitudes& b, const DrsState& s);

/// (z, lambda) view of a state: for RAAR, z = [w]_Z and lambda = w - z.
std::pair<CVec, CVec> primal_dual(const SolverState& s, const Magnitudes& b);

/// Object estimate: A(z - lambda) for RAAR/ADMM, A(z + lambda/rho) for DRS.
CVec reconstruct_object(const MeasurementEnsemble& e, const Magnitudes& b, const SolverState& s);

struct StoppingRule {
  /// Run exactly max_iters iterations.
  bool fixed_budget = false;
  /// Stop when ||(I-P) z|| / ||b|| <= residual_tol.
  double residual_tol = 1e-10;
  /// Stop when D_lambda / ||b|| <= deriv_tol.
  double deriv_tol = 1e-10;
  /// Evaluate the rule every this many iterations.
  int check_every = 1;
};

struct RunOptions {
  int max_iters = 600;
  StoppingRule stop;
  /// Record diagnostics every this many iterations (and always the first and last).
  int record_every = 1;
  /// Called after every step with the new state and the state it came from.
  std::function<void(const SolverState& prev, const SolverState& next)> on_step;
};

struct RunResult {
  std::vector<DiagnosticsRecord> trace;
  SolverState final_state;
  int iterations = 0;
  bool stopped_early = false;
};

/// Diagnostics of a state with parameter value `param`.
DiagnosticsRecord diagnose_state(const MeasurementEnsemble& e, const Magnitudes& b, const SolverState& s,
                                 double param);

/// Iterates from `init`, taking the parameter for step k (1-based) from the
/// schedule. The algorithm is the one of `init`.
RunResult run(const MeasurementEnsemble& e, const Magnitudes& b, const ParameterSchedule& schedule,
              SolverState init, const RunOptions& opts);

}  // namespace saddle_raar
