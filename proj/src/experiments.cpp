#include "saddle_raar/experiments.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>

#include <omp.h>

namespace saddle_raar {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Runs body(i) for i in [0, count) on `threads` workers and rethrows the
// first exception raised by any of them.
template <class Body>
void parallel_for(int count, int threads, Body&& body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

int resolve_threads(int requested) { return requested > 0 ? requested : trial_threads(); }

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL)) ^ index);
}

int trial_threads() {
  if (const char* env = std::getenv("SADDLE_RAAR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return omp_get_max_threads();
}

// --- Noise ---

double noise_level(const MeasurementEnsemble& e, const CVec& x0, const Magnitudes& b) {
  const RVec clean = e.apply_adjoint(x0).cwiseAbs();
  return (b.values() - clean).norm() / b.norm();
}

NoisyData poisson_data(const CVec& x0, const MeasurementEnsemble& e, double target_level, std::uint64_t seed,
                       double level_tolerance) {
  if (!(target_level > 0.0 && target_level < 1.0)) {
    throw InvalidDataError("poisson_data: target level must lie in (0, 1); level 0 is unreachable at finite kappa");
  }
  const RVec clean = e.apply_adjoint(x0).cwiseAbs();
  const RVec intensity = clean.cwiseAbs2();
  const double clean_norm = clean.norm();
  if (clean_norm == 0.0) throw InvalidDataError("poisson_data: zero object");

  auto sample = [&](double kappa) {
    RVec b(clean.size());
    for (Index i = 0; i < clean.size(); ++i) {
      std::mt19937_64 rng(derive_seed(seed, 0x9015, static_cast<std::uint64_t>(i)));
      std::poisson_distribution<long long> draw(kappa * intensity[i]);
      const double s = intensity[i] > 0.0 ? static_cast<double>(draw(rng)) : 0.0;
      b[i] = std::sqrt(std::max(s, 0.0) / kappa);
    }
    return b;
  };
  auto level_of = [&](const RVec& b) {
    const double bn = b.norm();
    return bn > 0.0 ? (b - clean).norm() / bn : 1.0;
  };

  // Var(sqrt(Poisson)) ~ 1/4 gives level ~ sqrt(N / (4 kappa)) / ||b||.
  const double guess = static_cast<double>(clean.size()) / (4.0 * target_level * target_level * clean_norm * clean_norm);
  double lo = std::log(guess) - std::log(1e4);
  double hi = std::log(guess) + std::log(1e4);
  NoisyData out;
  for (int step = 1; step <= 200; ++step) {
    const double mid = 0.5 * (lo + hi);
    const double kappa = std::exp(mid);
    RVec b = sample(kappa);
    const double level = level_of(b);
    out.search_steps = step;
    if (std::abs(level - target_level) <= level_tolerance * target_level && b.maxCoeff() > 0.0) {
      out.b = Magnitudes(std::move(b));
      out.kappa = kappa;
      out.level = level;
      return out;
    }
    // Level decreases as kappa grows.
    if (level > target_level) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-12) break;
  }
  throw InvalidDataError("poisson_data: could not reach the target noise level");
}

// --- Gaussian sweep ---

SweepOptions SweepOptions::full_grid() {
  SweepOptions o;
  o.ratios = {3.0, 3.5, 4.0, 4.5, 5.0};
  o.betas.clear();
  for (int k = 1; k <= 10; ++k) o.betas.push_back(static_cast<double>(k) / (k + 1));
  return o;
}

const SweepCell* SweepResult::find(double ratio, Algorithm algo, double param) const {
  for (const auto& c : cells)
    if (std::abs(c.ratio - ratio) < 1e-12 && c.algo == algo && std::abs(c.param - param) < 1e-12) return &c;
  return nullptr;
}

SweepResult gaussian_success_sweep(const SweepOptions& opts) {
  if (opts.n < 1 || opts.trials < 1 || opts.max_iters < 1) throw RangeError("sweep: n, trials and max_iters must be positive");
  for (double beta : opts.betas)
    if (!(beta > 0.0 && beta < 1.0)) throw RangeError("sweep: betas must lie in (0, 1)");

  const int algos = opts.run_drs ? 2 : 1;
  const std::size_t per_trial = opts.betas.size() * static_cast<std::size_t>(algos);
  SweepResult result;

  for (std::size_t ri = 0; ri < opts.ratios.size(); ++ri) {
    const double ratio = opts.ratios[ri];
    const auto big_n = static_cast<Index>(std::llround(ratio * static_cast<double>(opts.n)));
    if (big_n < opts.n) throw RangeError("sweep: ratios must be >= 1");
    std::vector<TrialRecord> records(static_cast<std::size_t>(opts.trials) * per_trial);

    parallel_for(opts.trials, resolve_threads(opts.threads), [&](int t) {
      const std::uint64_t trial_seed = derive_seed(opts.seed, ri, static_cast<std::uint64_t>(t));
      const MeasurementEnsemble e = build_gaussian_ensemble(opts.n, big_n, derive_seed(trial_seed, 1));
      const CVec x0 = random_lifted_vector(opts.n, derive_seed(trial_seed, 2));
      const Magnitudes b = noiseless_magnitudes(e, x0);
      const CVec x_init = b.norm() * random_object_vector(opts.n, derive_seed(trial_seed, 3));

      RunOptions ro;
      ro.max_iters = opts.max_iters;
      ro.record_every = opts.max_iters;
      ro.stop.residual_tol = opts.stop_tol;
      ro.stop.deriv_tol = opts.stop_tol;
      ro.stop.check_every = 10;

      std::size_t slot = static_cast<std::size_t>(t) * per_trial;
      for (double beta : opts.betas) {
        for (int a = 0; a < algos; ++a) {
          TrialRecord rec;
          rec.ratio = ratio;
          rec.trial = t;
          rec.seed = trial_seed;
          RunResult rr;
          if (a == 0) {
            rec.algo = Algorithm::Raar;
            rec.param = beta;
            rr = run(e, b, ParameterSchedule::constant(beta), make_initial_state(e, b, x_init, beta).raar, ro);
          } else {
            rec.algo = Algorithm::Drs;
            rec.param = rho_from_beta(beta);
            rr = run(e, b, ParameterSchedule::constant(rec.param), make_drs_state(e, b, x_init, rec.param), ro);
          }
          rec.iterations = rr.iterations;
          rec.residual = rr.trace.back().residual;
          rec.aligned_error = aligned_error(reconstruct_object(e, b, rr.final_state), x0);
          rec.success = rec.aligned_error <= opts.success_tol;
          records[slot++] = rec;
        }
      }
    });

    for (double beta : opts.betas) {
      for (int a = 0; a < algos; ++a) {
        SweepCell cell;
        cell.ratio = ratio;
        cell.algo = a == 0 ? Algorithm::Raar : Algorithm::Drs;
        cell.param = a == 0 ? beta : rho_from_beta(beta);
        for (const auto& r : records) {
          if (r.algo == cell.algo && r.param == cell.param) {
            ++cell.total;
            if (r.success) ++cell.successes;
          }
        }
        result.cells.push_back(cell);
      }
    }
    result.trials.insert(result.trials.end(), records.begin(), records.end());
  }
  return result;
}

// --- Coded diffraction cases ---

std::string to_string(CdpCase c) {
  switch (c) {
    case CdpCase::A: return "a";
    case CdpCase::B: return "b";
    case CdpCase::C: return "c";
    case CdpCase::D: return "d";
  }
  return "a";
}

CdpCase cdp_case_from_string(const std::string& s) {
  if (s == "a") return CdpCase::A;
  if (s == "b") return CdpCase::B;
  if (s == "c") return CdpCase::C;
  if (s == "d") return CdpCase::D;
  throw RangeError("unknown CDP case '" + s + "' (expected a, b, c or d)");
}

bool case_is_noisy(CdpCase c) { return c == CdpCase::C || c == CdpCase::D; }
bool case_uses_null_init(CdpCase c) { return c == CdpCase::A || c == CdpCase::C; }

CdpProblem make_cdp_problem(CdpCase which, const CdpOptions& opts) {
  CdpProblem p;
  p.which = which;
  p.object = build_rpp(opts.grid, derive_seed(opts.seed, 1));
  p.ensemble = build_default_cdp(opts.grid, opts.masks, derive_seed(opts.seed, 2));
  if (case_is_noisy(which)) {
    NoisyData nd = poisson_data(p.object.x0, p.ensemble, opts.noise_level, derive_seed(opts.seed, 3));
    p.b = std::move(nd.b);
    p.kappa = nd.kappa;
    p.noise_level = nd.level;
  } else {
    p.b = noiseless_magnitudes(p.ensemble, p.object.x0);
  }
  InitSpec spec = opts.init;
  spec.kind = case_uses_null_init(which) ? InitKind::NullVector : InitKind::Random;
  spec.seed = derive_seed(opts.seed, 4, opts.init.seed);
  p.x_init = initial_object(p.ensemble, p.b, spec);
  return p;
}

CdpPathResult cdp_case_run(const CdpProblem& problem, double beta_path_start, const CdpOptions& opts) {
  const MeasurementEnsemble& e = problem.ensemble;
  const Magnitudes& b = problem.b;
  CdpPathResult out;
  out.start = beta_path_start;
  const ParameterSchedule schedule = ParameterSchedule::hold_then_ramp(beta_path_start, opts.hold, opts.total, opts.end);

  RunOptions ro;
  ro.max_iters = opts.total;
  ro.stop.fixed_budget = true;
  ro.record_every = opts.record_every;
  ro.on_step = [&](const SolverState&, const SolverState& next) {
    const auto& s = std::get<RaarState>(next);
    if (s.k == opts.hold) out.snapshot = reconstruct_object(e, b, next);
  };
  RunResult rr = run(e, b, schedule, make_initial_state(e, b, problem.x_init, schedule.at(1)).raar, ro);
  out.trace = std::move(rr.trace);
  out.reconstruction = reconstruct_object(e, b, rr.final_state);
  out.final_state = std::get<RaarState>(rr.final_state);
  out.final_residual = out.trace.back().residual;
  out.final_deriv_norm = out.trace.back().deriv_norm;
  out.aligned_error = aligned_error(out.reconstruction, problem.object.x0);
  return out;
}

double CdpCaseResult::min_correlation() const {
  double m = 1.0;
  for (Index i = 0; i < correlations.rows(); ++i)
    for (Index j = i + 1; j < correlations.cols(); ++j) m = std::min(m, correlations(i, j));
  return m;
}

CdpCaseResult cdp_case_suite(CdpCase which, const CdpOptions& opts) {
  CdpCaseResult res;
  res.problem = make_cdp_problem(which, opts);
  const int count = static_cast<int>(opts.path_starts.size());
  res.paths.resize(opts.path_starts.size());
  parallel_for(count, resolve_threads(opts.threads), [&](int i) {
    res.paths[static_cast<std::size_t>(i)] = cdp_case_run(res.problem, opts.path_starts[static_cast<std::size_t>(i)], opts);
  });
  res.correlations = RMat::Identity(count, count);
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      const double c = aligned_correlation(res.paths[static_cast<std::size_t>(i)].reconstruction,
                                           res.paths[static_cast<std::size_t>(j)].reconstruction);
      res.correlations(i, j) = c;
      res.correlations(j, i) = c;
    }
  }
  return res;
}

}  // namespace saddle_raar
