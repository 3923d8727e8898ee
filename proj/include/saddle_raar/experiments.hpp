#pragma once

// Desk-scale experiment drivers: the Gaussian RAAR-vs-DRS success-rate sweep
// and the coded-diffraction beta-path cases (a)-(d).

#include <cstdint>
#include <string>
#include <vector>

#include "saddle_raar/init.hpp"
#include "saddle_raar/solvers.hpp"

namespace saddle_raar {

/// Counter-based seed split: distinct (seed, stream, index) give independent seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

/// Worker count for trial-level parallelism: SADDLE_RAAR_THREADS if set, else
/// the OpenMP default.
int trial_threads();

// --- Noise ---

enum class NoiseKind { None, Poisson };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::None;
  /// Target ||b - |A^* x0||| / ||b||, in [0, 1).
  double target_level = 0.18;
  /// Accepted relative deviation of the realized level.
  double level_tolerance = 0.05;
};

struct NoisyData {
  Magnitudes b;
  double kappa = 0.0;
  double level = 0.0;
  int search_steps = 0;
};

/// ||b - |A^* x0||| / ||b||.
double noise_level(const MeasurementEnsemble& e, const CVec& x0, const Magnitudes& b);

/// b^2 ~ Poisson(kappa |A^* x0|^2) / kappa with kappa found by bisection in
/// log scale. Entry i draws from its own fixed stream for every probed kappa.
NoisyData poisson_data(const CVec& x0, const MeasurementEnsemble& e, double target_level, std::uint64_t seed,
                       double level_tolerance = 0.05);

// --- Gaussian sweep ---

struct SweepOptions {
  Index n = 100;
  std::vector<double> ratios{4.0};
  /// RAAR betas; DRS runs at the paired rho = 1/beta - 1.
  std::vector<double> betas{0.9};
  int trials = 40;
  int max_iters = 5000;
  double success_tol = 1e-5;
  double stop_tol = 1e-10;
  std::uint64_t seed = 2024;
  bool run_drs = true;
  /// 0 selects trial_threads().
  int threads = 0;

  /// Paper grid: ratios 3..5 step 1/2, beta = k/(k+1) for k = 1..10.
  static SweepOptions full_grid();
};

struct TrialRecord {
  double ratio = 0.0;
  Algorithm algo = Algorithm::Raar;
  /// beta for RAAR, rho for DRS.
  double param = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  double residual = 0.0;
  double aligned_error = 0.0;
  bool success = false;
};

struct SweepCell {
  double ratio = 0.0;
  Algorithm algo = Algorithm::Raar;
  double param = 0.0;
  int successes = 0;
  int total = 0;
  double rate() const { return total > 0 ? static_cast<double>(successes) / total : 0.0; }
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<TrialRecord> trials;

  const SweepCell* find(double ratio, Algorithm algo, double param) const;
};

SweepResult gaussian_success_sweep(const SweepOptions& opts);

// --- Coded diffraction cases ---

enum class CdpCase { A, B, C, D };

std::string to_string(CdpCase c);
CdpCase cdp_case_from_string(const std::string& s);
bool case_is_noisy(CdpCase c);
bool case_uses_null_init(CdpCase c);

struct CdpOptions {
  GridShape grid{32, 32};
  int masks = 2;
  std::vector<double> path_starts{0.95, 0.9, 0.8, 0.7, 0.6};
  int hold = 300;
  int total = 600;
  double end = 0.5;
  double noise_level = 0.18;
  std::uint64_t seed = 11;
  InitSpec init{};
  int record_every = 1;
  /// 0 selects trial_threads().
  int threads = 0;
};

/// Shared problem of a case: object, ensemble, data and starting object.
struct CdpProblem {
  CdpCase which = CdpCase::A;
  PhantomObject object;
  MeasurementEnsemble ensemble;
  Magnitudes b;
  double noise_level = 0.0;
  double kappa = 0.0;
  CVec x_init;
};

CdpProblem make_cdp_problem(CdpCase which, const CdpOptions& opts);

struct CdpPathResult {
  double start = 0.0;
  std::vector<DiagnosticsRecord> trace;
  /// A(z - lambda) after `hold` iterations.
  CVec snapshot;
  /// A(z - lambda) at the end.
  CVec reconstruction;
  RaarState final_state;
  double final_residual = 0.0;
  double final_deriv_norm = 0.0;
  double aligned_error = 0.0;
};

/// One beta-path on a prepared problem.
CdpPathResult cdp_case_run(const CdpProblem& problem, double beta_path_start, const CdpOptions& opts);

struct CdpCaseResult {
  CdpProblem problem;
  std::vector<CdpPathResult> paths;
  /// Pairwise aligned correlations of the final reconstructions.
  RMat correlations;
  double min_correlation() const;
};

/// All beta-paths of a case, concurrently.
CdpCaseResult cdp_case_suite(CdpCase which, const CdpOptions& opts);

}  // namespace saddle_raar
