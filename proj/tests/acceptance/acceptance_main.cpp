// Acceptance suite: one PASS/FAIL line per criterion. With an argument N only
// criterion N runs. Exit status 0 iff every criterion that ran passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "saddle_raar/analysis.hpp"
#include "saddle_raar/experiments.hpp"
#include "saddle_raar/init.hpp"
#include "saddle_raar/solvers.hpp"

using namespace saddle_raar;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> body;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Instance {
  MeasurementEnsemble e;
  CVec x0;
  Magnitudes b;
};

Instance dense_instance(Index n, Index N, std::uint64_t seed) {
  auto e = build_gaussian_ensemble(n, N, seed);
  CVec x0 = random_object_vector(n, derive_seed(seed, 1));
  Magnitudes b = noiseless_magnitudes(e, x0);
  return {std::move(e), std::move(x0), std::move(b)};
}

// 1. RAAR and ADMM generate the same sequence.
Outcome raar_admm_equivalence() {
  const auto in = dense_instance(16, 48, 101);
  double worst = 0.0, literal = 0.0;
  for (double beta : {0.6, 0.9}) {
    const CVec w0 = random_lifted_vector(48, 102);
    const auto st = make_initial_state_lifted(in.e, in.b, w0, beta);
    AdmmState a = st.admm;
    // The literal lambda_1 = (I-P) w0, reported for reference only.
    AdmmState lit = st.admm;
    lit.lambda = in.e.project_complement(w0);
    CVec w = w0;
    for (int k = 1; k <= 50; ++k) {
      w = raar_step(in.e, in.b, w, beta);
      const AdmmState next = admm_step(in.e, in.b, a);
      worst = std::max(worst, (next.y + a.lambda - w).norm() / w.norm());
      a = next;
      const AdmmState lnext = admm_step(in.e, in.b, lit);
      literal = std::max(literal, (lnext.y + lit.lambda - w).norm() / w.norm());
      lit = lnext;
    }
  }
  return {worst <= 1e-10, fmt("max rel ||w'_k - w_k|| = %.2e (tol 1e-10); with lambda_1 = (I-P)w0: %.2e", worst,
                              literal)};
}

// 2. beta = 1/2 on range(A*) reduces to alternating projections.
Outcome alternating_projection() {
  const auto in = dense_instance(16, 64, 201);
  const CMat a = in.e.materialize_adjoint();
  const CMat p = a * a.adjoint();
  CVec w = in.e.apply_adjoint(random_object_vector(16, 202));
  CVec ap = w;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    w = raar_step(in.e, in.b, w, 0.5);
    CVec z(ap.size());
    for (Index i = 0; i < ap.size(); ++i) z[i] = in.b[i] * ap[i] / std::abs(ap[i]);
    ap = p * z;
    worst = std::max(worst, (w - ap).norm() / ap.norm());
  }
  return {worst <= 1e-12, fmt("max rel deviation over 100 iterations = %.2e (tol 1e-12)", worst)};
}

// 3. Fixed-point certificate.
Outcome fixed_point_certificate() {
  const auto in = dense_instance(16, 64, 301);
  const CVec zstar = in.e.apply_adjoint(in.x0);
  bool noiseless_ok = true;
  double worst_c = 0.0;
  for (int i = 1; i <= 19; ++i) {
    const double beta = 0.05 * i;
    const auto cert = certify_fixed_point(in.e, in.b, zstar, beta, 1e-10 * in.b.norm());
    worst_c = std::max(worst_c, (cert.c - in.b.values()).norm() / in.b.norm());
    noiseless_ok = noiseless_ok && cert.certified && std::abs(cert.beta_max - 1.0) <= 1e-12;
  }
  noiseless_ok = noiseless_ok && worst_c <= 1e-12;

  InitSpec spec;
  const CVec x_init = initial_object(in.e, in.b, spec);
  const auto st = make_initial_state(in.e, in.b, x_init, 0.9);
  RunOptions ro;
  ro.max_iters = 20000;
  ro.stop.residual_tol = 1e-14;
  ro.stop.deriv_tol = 1e-14;
  const RunResult r = run(in.e, in.b, ParameterSchedule::constant(0.9), st.raar, ro);
  const CVec& w = std::get<RaarState>(r.final_state).w;
  const double tol = 1e-8 * in.b.norm();
  const auto cert = certify_fixed_point(in.e, in.b, w, 0.9, tol);
  const bool run_ok = cert.certified;
  return {noiseless_ok && run_ok,
          fmt("noiseless: all 19 betas certified=%s, max ||c-b||/||b|| = %.1e; beta=0.9 run (%d it): phase %.1e, "
              "f1 %.1e, f2 %.1e, magnitude_ok=%s (tol %.1e)",
              noiseless_ok ? "yes" : "no", worst_c, r.iterations, cert.phase_residual, cert.f1_residual,
              cert.f2_residual, cert.magnitude_ok ? "yes" : "no", tol)};
}

// 4. Spectral gap and the restricted Hessian at the true solution.
Outcome spectral_gap() {
  const GridShape grid{8, 8};
  const auto obj = build_random_object(grid, 401);
  double max_l2 = 0.0, worst_slack = 1e300;
  bool ok = matricized_rank(obj.x0, grid) >= 2;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto e = build_default_cdp(grid, 2, derive_seed(402, s));
    const auto g = spectral_gap_lambda2(e, obj.x0, grid);
    const CVec zstar = e.apply_adjoint(obj.x0);
    const Magnitudes b(zstar.cwiseAbs());
    const auto cert = certify_cross_section_minimizer(e, b, zstar, CVec::Zero(e.N()), 0.5);
    const double slack = cert.hessian_min_eig - (1.0 - g.lambda2);
    max_l2 = std::max(max_l2, g.lambda2);
    worst_slack = std::min(worst_slack, slack);
    ok = ok && g.lambda2 < 1.0 && slack >= -1e-8;
  }
  return {ok, fmt("max lambda2 = %.6f (< 1), min [hessian_min_eig - (1 - lambda2)] = %.2e (>= -1e-8)", max_l2,
                  worst_slack)};
}

// 5. Lambda-gradient against central differences, coordinate by coordinate.
Outcome gradient_check() {
  const auto e = build_gaussian_ensemble(8, 32, 501);
  std::mt19937_64 rng(502);
  std::uniform_real_distribution<double> unif(0.01, 0.99);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const double beta = unif(rng);
    const CVec z = random_lifted_vector(32, derive_seed(503, t)), l = random_lifted_vector(32, derive_seed(504, t));
    const CVec g = grad_F_lambda(e, z, l, beta);
    CVec fd(32);
    const double h = 1e-4;
    for (Index i = 0; i < 32; ++i) {
      double part[2];
      for (int c = 0; c < 2; ++c) {
        const Complex step = c == 0 ? Complex(h, 0) : Complex(0, h);
        CVec lp = l, lm = l;
        lp[i] += step;
        lm[i] -= step;
        part[c] = (eval_F(e, z, lp, beta) - eval_F(e, z, lm, beta)) / (2 * h);
      }
      fd[i] = Complex(part[0], part[1]);
    }
    worst = std::max(worst, (fd - g).norm() / g.norm());
  }
  return {worst <= 1e-6, fmt("max rel gradient error over 20 draws = %.2e (tol 1e-6)", worst)};
}

// 6. Gaussian success rates at N/n = 4, beta = 0.9, rho = 1/9.
Outcome success_sweep() {
  const SweepOptions o;
  const SweepResult r = gaussian_success_sweep(o);
  const SweepCell* raar = r.find(4.0, Algorithm::Raar, 0.9);
  const SweepCell* drs = r.find(4.0, Algorithm::Drs, 1.0 / 0.9 - 1.0);
  if (!raar || !drs) return {false, "missing sweep cell"};
  return {raar->rate() >= 0.60 && drs->rate() >= 0.50,
          fmt("n=100, 40 trials: RAAR beta=0.9 rate %.3f (>= 0.60), DRS rho=1/9 rate %.3f (>= 0.50)", raar->rate(),
              drs->rate())};
}

double min_t_last(const std::vector<DiagnosticsRecord>& trace, std::size_t window) {
  double m = 1e300;
  for (std::size_t i = trace.size() > window ? trace.size() - window : 0; i < trace.size(); ++i)
    m = std::min(m, trace[i].t_ratio);
  return m;
}

// 7. Noiseless coded diffraction, null-vector start, five beta-paths.
Outcome cdp_case_a() {
  const CdpOptions o;
  const auto r = cdp_case_suite(CdpCase::A, o);
  bool ok = r.paths.size() == 5;
  double worst_res = 0.0, worst_err = 0.0, min_t = 1e300;
  for (const auto& p : r.paths) {
    const double t = min_t_last(p.trace, 100);
    worst_res = std::max(worst_res, p.final_residual);
    worst_err = std::max(worst_err, p.aligned_error);
    min_t = std::min(min_t, t);
    ok = ok && p.final_residual <= 1e-6 && p.aligned_error <= 1e-6 && t > 0.0 && p.trace.size() >= 100;
  }
  return {ok, fmt("max residual %.2e, max aligned error %.2e (both <= 1e-6), min T-ratio over last 100 = %.4f (> 0)",
                  worst_res, worst_err, min_t)};
}

// 8. Poisson-noisy coded diffraction, null-vector start, five beta-paths.
Outcome cdp_case_c() {
  const CdpOptions o;
  const auto r = cdp_case_suite(CdpCase::C, o);
  const double bn = r.problem.b.norm();
  const bool level_ok = std::abs(r.problem.noise_level - 0.18) <= 0.009;
  double worst_d = 0.0;
  for (const auto& p : r.paths) worst_d = std::max(worst_d, p.final_deriv_norm / bn);
  const double corr = r.min_correlation();
  const bool ok = level_ok && r.paths.size() == 5 && worst_d <= 1e-6 && corr >= 0.99;
  return {ok, fmt("noise level %.4f (0.18 +- 0.009), max D_lambda/||b|| at 600 = %.2e (<= 1e-6), min pairwise "
                  "correlation %.6f (>= 0.99)",
                  r.problem.noise_level, worst_d, corr)};
}

// 9. Fejer monotonicity and the partial-sum bound on case (a) runs.
Outcome fejer() {
  const CdpOptions o;
  const CdpProblem p = make_cdp_problem(CdpCase::A, o);
  const CVec zstar = p.ensemble.apply_adjoint(p.object.x0);
  bool ok = true;
  double worst_inc = 0.0, worst_excess = -1e300;
  int min_window = 1 << 30;
  for (double start : o.path_starts) {
    FejerMonitor mon(p.ensemble, p.b, zstar, CVec::Zero(zstar.size()));
    RunOptions ro;
    ro.max_iters = o.total;
    ro.stop.fixed_budget = true;
    ro.record_every = o.total;
    ro.on_step = [&](const SolverState& prev, const SolverState& next) {
      mon.observe(std::get<RaarState>(prev).w, std::get<RaarState>(next).w, std::get<RaarState>(next).beta);
    };
    const auto st = make_initial_state(p.ensemble, p.b, p.x_init, start);
    run(p.ensemble, p.b, ParameterSchedule::hold_then_ramp(start, o.hold, o.total, o.end), st.raar, ro);
    const auto s = mon.summarize();
    worst_inc = std::max(worst_inc, s.max_increase);
    worst_excess = std::max(worst_excess, s.worst_sum_excess);
    min_window = std::min(min_window, s.window_steps);
    ok = ok && s.window_start > 0 && s.max_increase <= 1e-8 && s.worst_sum_excess <= 0.0;
  }
  return {ok, fmt("5 paths: min window %d steps, max distance increase %.2e (<= 1e-8), max partial-sum excess %.3e "
                  "(<= 0)",
                  min_window, worst_inc, worst_excess)};
}

// 10. DRS fixed-point conditions at rho = 1/4.
Outcome drs_conditions() {
  const auto in = dense_instance(16, 64, 1001);
  const double rho = 0.25;
  InitSpec spec;
  const CVec x_init = initial_object(in.e, in.b, spec);
  RunOptions ro;
  ro.max_iters = 20000;
  ro.stop.residual_tol = 1e-14;
  ro.stop.deriv_tol = 1e-14;
  const RunResult r = run(in.e, in.b, ParameterSchedule::constant(rho), make_drs_state(in.e, in.b, x_init, rho), ro);
  const auto& s = std::get<DrsState>(r.final_state);
  const CMat a = in.e.materialize_adjoint();
  const CMat p = a * a.adjoint();
  const CVec mu = s.lambda / rho;
  CVec proj(s.z.size());
  for (Index i = 0; i < proj.size(); ++i) proj[i] = in.b[i] * s.z[i] / std::abs(s.z[i]);
  const double d1 = (p * mu).norm(), d2 = (s.z - p * s.z).norm(), d3 = (s.z + rho * mu - proj).norm();
  const double tol = 1e-8 * in.b.norm();
  return {d1 <= tol && d2 <= tol && d3 <= tol,
          fmt("%d it: ||P mu|| %.1e, ||(I-P) z|| %.1e, ||z + rho mu - [z]_Z|| %.1e (tol %.1e)", r.iterations, d1, d2,
              d3, tol)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "RAAR = ADMM sequence", 1.0, raar_admm_equivalence},
      {2, "beta = 1/2 alternating projections", 1.0, alternating_projection},
      {3, "fixed-point certificate", 5.0, fixed_point_certificate},
      {4, "spectral gap and Hessian bound", 30.0, spectral_gap},
      {5, "lambda-gradient check", 1.0, gradient_check},
      {6, "Gaussian success sweep", 300.0, success_sweep},
      {7, "CDP noiseless null-init paths", 300.0, cdp_case_a},
      {8, "CDP Poisson null-init paths", 300.0, cdp_case_c},
      {9, "Fejer property", 60.0, fejer},
      {10, "DRS fixed-point conditions", 5.0, drs_conditions},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool all_pass = true;
  int ran = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.time_limit_s;
    const bool pass = o.pass && in_time;
    all_pass = all_pass && pass;
    std::printf("criterion %2d %s  %s: %s; %.2f s (limit %.0f s)\n", c.id, pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs, c.time_limit_s);
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return all_pass ? 0 : 1;
}
