#include "saddle_raar/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "saddle_raar/kernels.hpp"

namespace saddle_raar {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Raar: return "raar";
    case Algorithm::Admm: return "admm";
    case Algorithm::Drs: return "drs";
  }
  return "raar";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "raar") return Algorithm::Raar;
  if (s == "admm") return Algorithm::Admm;
  if (s == "drs") return Algorithm::Drs;
  throw RangeError("unknown algorithm '" + s + "' (expected raar, admm or drs)");
}

Algorithm algorithm_of(const SolverState& s) { return static_cast<Algorithm>(s.index()); }

double beta_prime(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw RangeError("beta' needs beta in (0, 1)");
  return beta / (1.0 - beta);
}

double beta_from_rho(double rho) {
  if (!(rho > 0.0)) throw RangeError("rho must be positive");
  return 1.0 / (rho + 1.0);
}

double rho_from_beta(double beta) {
  if (beta == 1.0) throw RangeError("rho is infinite at beta = 1");
  if (!(beta > 0.0 && beta < 1.0)) throw RangeError("beta must lie in (0, 1)");
  return (1.0 - beta) / beta;
}

CVec raar_step(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& w, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw RangeError("raar_step: beta must lie in (0, 1]");
  require_size(w.size(), e.N(), "raar_step");
  const CVec t = project_torus(w, b);
  const CVec p = e.project_range(2.0 * t - w);
  CVec out(w.size());
  kernels::omp::raar_combine(beta, as_span(w), as_span(t), as_span(p), as_span(out));
  return out;
}

AdmmState admm_step(const MeasurementEnsemble& e, const Magnitudes& b, const AdmmState& s) {
  if (s.step != 1.0) throw RangeError("admm_step: only dual step size s = 1 is supported");
  if (!(s.beta > 0.0 && s.beta <= 1.0)) throw RangeError("admm_step: beta must lie in (0, 1]");
  AdmmState next;
  next.beta = s.beta;
  next.step = s.step;
  next.k = s.k + 1;
  const CVec v = s.z - s.lambda;
  next.y = (1.0 - s.beta) * v + s.beta * e.project_range(v);
  next.z = project_torus(next.y + s.lambda, b);
  next.lambda = s.lambda + (next.y - next.z);
  return next;
}

DrsState drs_step(const MeasurementEnsemble& e, const Magnitudes& b, const DrsState& s) {
  if (!(s.rho > 0.0)) throw RangeError("drs_step: rho must be positive");
  DrsState next;
  next.rho = s.rho;
  next.k = s.k + 1;
  const CVec mu = s.lambda / s.rho;
  next.y = e.project_range(s.z + mu);
  const CVec w = next.y - mu;
  next.z = (project_torus(w, b) + s.rho * w) / (1.0 + s.rho);
  next.lambda = s.lambda + s.rho * (next.z - next.y);
  return next;
}

std::pair<CVec, CVec> primal_dual(const SolverState& s, const Magnitudes& b) {
  return std::visit(
      [&b](const auto& st) -> std::pair<CVec, CVec> {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, RaarState>) {
          CVec z = project_torus(st.w, b);
          CVec lambda = st.w - z;
          return {std::move(z), std::move(lambda)};
        } else {
          return {st.z, st.lambda};
        }
      },
      s);
}

CVec reconstruct_object(const MeasurementEnsemble& e, const Magnitudes& b, const SolverState& s) {
  if (const auto* d = std::get_if<DrsState>(&s)) return e.apply(d->z + d->lambda / d->rho);
  const auto [z, lambda] = primal_dual(s, b);
  return e.apply(z - lambda);
}

DiagnosticsRecord diagnose_state(const MeasurementEnsemble& e, const Magnitudes& b, const SolverState& s,
                                 double param) {
  if (const auto* d = std::get_if<DrsState>(&s)) {
    DiagnosticsRecord rec;
    rec.k = d->k;
    rec.param = param;
    const CVec mu = d->lambda / d->rho;
    const CVec tz = project_torus(d->z, b);
    rec.residual = e.project_complement(tz).norm() / b.norm();
    const double range = e.project_range(mu).norm();
    const CVec cz = e.project_complement(d->z);
    const double mag = (d->z + d->rho * mu - tz).norm();
    rec.deriv_norm = std::sqrt(range * range + cz.squaredNorm() + mag * mag);
    rec.t_ratio = std::numeric_limits<double>::quiet_NaN();
    const double fit = (d->z.cwiseAbs() - b.values()).squaredNorm();
    rec.objective =
        0.5 * fit + 0.5 * d->rho * (e.project_complement(d->z + mu).squaredNorm() - mu.squaredNorm());
    return rec;
  }
  const auto [z, lambda] = primal_dual(s, b);
  DiagnosticsRecord rec = diagnose(e, b, z, lambda, param);
  rec.k = std::visit([](const auto& st) { return st.k; }, s);
  return rec;
}

namespace {

void validate_schedule(Algorithm algo, const ParameterSchedule& schedule) {
  const double lo = schedule.min_value();
  const double hi = schedule.max_value();
  switch (algo) {
    case Algorithm::Raar:
      if (!(lo > 0.0 && hi <= 1.0)) throw RangeError("RAAR schedule values must lie in (0, 1]");
      break;
    case Algorithm::Admm:
      if (!(lo > 0.0 && hi < 1.0)) throw RangeError("ADMM schedule values must lie in (0, 1)");
      break;
    case Algorithm::Drs:
      if (!(lo > 0.0)) throw RangeError("DRS schedule values must be positive");
      break;
  }
}

void check_dims(const MeasurementEnsemble& e, const Magnitudes& b, const SolverState& s) {
  require_size(b.size(), e.N(), "run: magnitudes");
  std::visit(
      [&e](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, RaarState>) {
          require_size(st.w.size(), e.N(), "run: w");
        } else {
          require_size(st.z.size(), e.N(), "run: z");
          require_size(st.lambda.size(), e.N(), "run: lambda");
        }
      },
      s);
}

SolverState step(const MeasurementEnsemble& e, const Magnitudes& b, const SolverState& s, double param) {
  return std::visit(
      [&](const auto& st) -> SolverState {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, RaarState>) {
          return RaarState{raar_step(e, b, st.w, param), st.k + 1, param};
        } else if constexpr (std::is_same_v<T, AdmmState>) {
          AdmmState cur = st;
          cur.beta = param;
          return admm_step(e, b, cur);
        } else {
          DrsState cur = st;
          cur.rho = param;
          return drs_step(e, b, cur);
        }
      },
      s);
}

}  // namespace

RunResult run(const MeasurementEnsemble& e, const Magnitudes& b, const ParameterSchedule& schedule,
              SolverState init, const RunOptions& opts) {
  const Algorithm algo = algorithm_of(init);
  validate_schedule(algo, schedule);
  check_dims(e, b, init);
  if (opts.max_iters < 0) throw RangeError("max_iters must be nonnegative");
  const int record_every = std::max(opts.record_every, 1);

  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
  };

  RunResult result;
  result.final_state = std::move(init);
  {
    DiagnosticsRecord rec = diagnose_state(e, b, result.final_state, schedule.at(1));
    rec.wall_ns = elapsed();
    result.trace.push_back(rec);
  }

  const double bnorm = b.norm();
  for (int k = 1; k <= opts.max_iters; ++k) {
    const double param = schedule.at(k);
    SolverState next = step(e, b, result.final_state, param);
    if (opts.on_step) opts.on_step(result.final_state, next);
    result.final_state = std::move(next);
    result.iterations = k;

    const bool record = (k % record_every == 0) || k == opts.max_iters;
    const bool check = !opts.stop.fixed_budget && k % std::max(opts.stop.check_every, 1) == 0;
    if (!record && !check) continue;
    DiagnosticsRecord rec = diagnose_state(e, b, result.final_state, param);
    rec.k = k;
    rec.wall_ns = elapsed();
    const bool done = check && (rec.residual <= opts.stop.residual_tol || rec.deriv_norm <= opts.stop.deriv_tol * bnorm);
    if (record || done) result.trace.push_back(rec);
    if (done) {
      result.stopped_early = k < opts.max_iters;
      break;
    }
  }
  return result;
}

}  // namespace saddle_raar
