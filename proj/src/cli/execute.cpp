#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "saddle_raar/cli.hpp"
#include "saddle_raar/experiments.hpp"

namespace saddle_raar::cli {

namespace fs = std::filesystem;

namespace {

struct Problem {
  MeasurementEnsemble e;
  CVec x0;
  Magnitudes b;
  GridShape grid{};
  bool image = false;
  double noise_level = 0.0;
  double kappa = 0.0;
};

PhantomObject make_object(const RunConfig& c, GridShape grid, std::uint64_t seed) {
  const bool big = grid.rows >= 16 && grid.cols >= 16;
  if (c.object == "rpp" || (c.object == "auto" && big)) return build_rpp(grid, seed);
  return build_random_object(grid, seed);
}

Problem build_problem(const RunConfig& c) {
  Problem p;
  if (c.ensemble == "gaussian") {
    if (c.object == "rpp") throw UsageError("object rpp needs the cdp ensemble");
    p.e = build_gaussian_ensemble(c.n, c.N, derive_seed(c.seed, 2));
    p.x0 = random_lifted_vector(c.n, derive_seed(c.seed, 1));
  } else {
    p.grid = parse_grid(c.grid);
    p.image = true;
    p.e = build_default_cdp(p.grid, c.masks, derive_seed(c.seed, 2));
    p.x0 = make_object(c, p.grid, derive_seed(c.seed, 1)).x0;
  }
  if (c.noise == "poisson") {
    NoisyData nd = poisson_data(p.x0, p.e, c.noise_level, derive_seed(c.seed, 3));
    p.b = std::move(nd.b);
    p.noise_level = nd.level;
    p.kappa = nd.kappa;
  } else {
    p.b = noiseless_magnitudes(p.e, p.x0);
  }
  return p;
}

InitSpec init_spec(const RunConfig& c) {
  InitSpec s;
  s.kind = init_kind_from_string(c.init);
  s.weak_fraction = c.weak_fraction;
  s.power_iters = c.power_iters;
  s.seed = derive_seed(c.seed, 4);
  return s;
}

void write(const fs::path& dir, const std::string& name, const std::string& contents) {
  io::atomic_write(dir / name, contents);
}

void write_json(const fs::path& dir, const std::string& name, const io::Json& j) {
  write(dir, name, j.dump(2) + "\n");
}

// Magnitude and phase-aligned real part Re(conj(alpha) x conj(u0)), u0 the
// phase of the reference object.
void write_image_pair(const fs::path& dir, const std::string& stem, const CVec& x, const CVec& x0, GridShape grid,
                      int bits) {
  write(dir, stem + "_mag.pgm", io::pgm(x.cwiseAbs(), grid, bits));
  const Complex alpha = align_phase(x, x0);
  const CVec aligned = std::conj(alpha) * x;
  const RVec re = aligned.cwiseProduct(unit_phase(x0).conjugate()).real().cwiseMax(0.0);
  write(dir, stem + "_real.pgm", io::pgm(re, grid, bits));
}

io::Json record_json(const DiagnosticsRecord& r) {
  io::Json j;
  auto num = [](double x) { return std::isfinite(x) ? io::Json(x) : io::Json(nullptr); };
  j["k"] = r.k;
  j["param"] = num(r.param);
  j["residual"] = num(r.residual);
  j["deriv_norm"] = num(r.deriv_norm);
  j["t_ratio"] = num(r.t_ratio);
  j["objective"] = num(r.objective);
  return j;
}

std::string format_param(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

int run_solve(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const Problem p = build_problem(c);
  const Algorithm algo = algorithm_from_string(c.algo);
  const double start = algo == Algorithm::Drs ? c.rho : c.beta;
  const ParameterSchedule schedule = c.schedule == "ramp"
                                         ? ParameterSchedule::hold_then_ramp(start, c.hold, c.max_iters, c.end)
                                         : ParameterSchedule::constant(start);

  const InitSpec spec = init_spec(c);
  NullVectorResult nv;
  CVec x_init;
  if (spec.kind == InitKind::NullVector) {
    nv = null_vector(p.e, p.b, spec);
    x_init = p.b.norm() * nv.x;
  } else {
    x_init = initial_object(p.e, p.b, spec);
  }

  SolverState init;
  switch (algo) {
    case Algorithm::Raar: init = make_initial_state(p.e, p.b, x_init, schedule.at(1)).raar; break;
    case Algorithm::Admm: init = make_initial_state(p.e, p.b, x_init, schedule.at(1)).admm; break;
    case Algorithm::Drs: init = make_drs_state(p.e, p.b, x_init, schedule.at(1)); break;
  }

  RunOptions ro;
  ro.max_iters = c.max_iters;
  ro.record_every = c.record_every;
  ro.stop.fixed_budget = c.fixed_budget;
  ro.stop.residual_tol = c.tol;
  ro.stop.deriv_tol = c.tol;
  const RunResult rr = run(p.e, p.b, schedule, init, ro);
  const DiagnosticsRecord& last = rr.trace.back();
  const bool converged = last.residual <= c.tol || last.deriv_norm <= c.tol * p.b.norm();
  const CVec x = reconstruct_object(p.e, p.b, rr.final_state);

  write(out, "trace.csv", io::trace_csv(rr.trace));
  io::Json state;
  state["state"] = io::state_to_json(rr.final_state);
  state["ensemble"] = io::ensemble_to_json(p.e);
  state["b"] = io::real_to_json(p.b.values());
  state["x0"] = io::complex_to_json(p.x0);
  write_json(out, "state.json", state);

  io::Json s;
  s["command"] = "solve";
  s["algo"] = c.algo;
  s["iterations"] = rr.iterations;
  s["stopped_early"] = rr.stopped_early;
  s["converged"] = converged;
  s["final"] = record_json(last);
  s["aligned_error"] = aligned_error(x, p.x0);
  s["success"] = aligned_error(x, p.x0) <= c.success_tol;
  s["noise_level"] = p.noise_level;
  s["kappa"] = p.kappa;
  if (spec.kind == InitKind::NullVector) {
    s["null_vector"] = {{"eigenvalue", nv.eigenvalue},
                        {"residual", nv.residual},
                        {"iterations", nv.iterations},
                        {"converged", nv.converged}};
  }
  write_json(out, "summary.json", s);

  if (p.image) {
    write(out, "object_mag.pgm", io::pgm(p.x0.cwiseAbs(), p.grid, c.pgm_bits));
    write_image_pair(out, "init", x_init, p.x0, p.grid, c.pgm_bits);
    write_image_pair(out, "reconstruction", x, p.x0, p.grid, c.pgm_bits);
  }
  log << "solve: " << rr.iterations << " iterations, residual " << last.residual << ", aligned error "
      << aligned_error(x, p.x0) << (converged ? "" : " (not converged)") << '\n';
  return (c.strict && !converged) ? kExitNotConverged : kExitOk;
}

int run_certify(const RunConfig& c, const fs::path& out, std::ostream& log) {
  io::Json in;
  try {
    in = io::Json::parse(io::read_file(c.state_file));
  } catch (const io::Json::exception& ex) {
    throw UsageError("cannot parse state file: " + std::string(ex.what()));
  }
  const MeasurementEnsemble e = io::ensemble_from_json(in.at("ensemble"));
  const Magnitudes b(io::real_from_json(in.at("b")));
  const SolverState state = io::state_from_json(in.at("state"));
  require_size(b.size(), e.N(), "certify: magnitudes");
  const auto [z, lambda] = primal_dual(state, b);
  const double tol = std::max(c.tol, 1e-8) * b.norm();

  io::Json s;
  s["command"] = "certify";
  s["algo"] = to_string(algorithm_of(state));
  s["tolerance"] = tol;
  bool certified = false;
  if (const auto* d = std::get_if<DrsState>(&state)) {
    const DrsCertificate dc = certify_drs_fixed_point(e, b, d->z, d->lambda, d->rho);
    s["drs"] = io::to_json(dc);
    certified = dc.range_defect <= tol && dc.complement_defect <= tol && dc.magnitude_defect <= tol;
    const double beta = beta_from_rho(d->rho);
    const FixedPointCertificate fp = certify_fixed_point(e, b, d->z + d->lambda / d->rho, beta, tol);
    s["phase_residual"] = fp.phase_residual;
    s["beta_interval"] = {0.0, fp.beta_max};
  } else {
    const double beta = std::holds_alternative<RaarState>(state) ? std::get<RaarState>(state).beta
                                                                 : std::get<AdmmState>(state).beta;
    const FixedPointCertificate fp = certify_fixed_point(e, b, z + lambda, beta, tol);
    s["fixed_point"] = io::to_json(fp);
    s["phase_residual"] = fp.phase_residual;
    s["beta_interval"] = {0.0, fp.beta_max};
    certified = fp.certified;
    if (beta < 1.0 && b.strictly_positive()) {
      const SaddleCertificate sc = certify_cross_section_minimizer(e, b, z, lambda, beta);
      s["cross_section"] = io::to_json(sc);
      s["hessian_min_eig"] = sc.hessian_min_eig;
    } else {
      s["hessian_min_eig"] = nullptr;
      s["cross_section_skipped"] = beta >= 1.0 ? "beta = 1" : "b has zero entries";
    }
  }
  s["certified"] = certified;
  write_json(out, "summary.json", s);
  log << "certify: " << (certified ? "certified" : "not certified") << '\n';
  return (c.strict && !certified) ? kExitNotConverged : kExitOk;
}

int run_gap(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const GridShape grid = parse_grid(c.grid);
  const PhantomObject obj = make_object(c, grid, derive_seed(c.seed, 1));
  std::ostringstream csv;
  csv << std::setprecision(17) << "seed_index,lambda2,hessian_min_eig,gap_bound_ok,hypothesis_met\n";
  io::Json values = io::Json::array();
  bool all_below_one = true;
  for (int s = 0; s < c.seeds; ++s) {
    const MeasurementEnsemble e = build_default_cdp(grid, c.masks, derive_seed(c.seed, 10, static_cast<std::uint64_t>(s)));
    const SpectralGap g = spectral_gap_lambda2(e, obj.x0, grid);
    const CVec zstar = e.apply_adjoint(obj.x0);
    const Magnitudes b(zstar.cwiseAbs());
    double hmin = std::numeric_limits<double>::quiet_NaN();
    if (b.strictly_positive()) hmin = certify_cross_section_minimizer(e, b, zstar, CVec::Zero(e.N()), 0.5).hessian_min_eig;
    const bool bound_ok = hmin >= 1.0 - g.lambda2 - 1e-8;
    all_below_one = all_below_one && g.lambda2 < 1.0;
    csv << s << ',' << g.lambda2 << ',' << hmin << ',' << (bound_ok ? 1 : 0) << ',' << (g.hypothesis_met ? 1 : 0) << '\n';
    io::Json row = io::to_json(g);
    row["hessian_min_eig"] = std::isfinite(hmin) ? io::Json(hmin) : io::Json(nullptr);
    values.push_back(row);
  }
  write(out, "gap.csv", csv.str());
  io::Json s;
  s["command"] = "gap";
  s["grid"] = c.grid;
  s["masks"] = c.masks;
  s["runs"] = values;
  s["all_below_one"] = all_below_one;
  write_json(out, "summary.json", s);
  log << "gap: " << c.seeds << " runs, all lambda2 < 1: " << (all_below_one ? "yes" : "no") << '\n';
  return kExitOk;
}

int run_sweep(const RunConfig& c, const fs::path& out, std::ostream& log) {
  SweepOptions o = c.full_grid ? SweepOptions::full_grid() : SweepOptions{};
  if (!c.full_grid) {
    o.ratios = c.ratios;
    o.betas = c.betas;
  }
  o.n = c.sweep_n;
  o.trials = c.trials;
  o.max_iters = c.sweep_iters;
  o.success_tol = c.success_tol;
  o.stop_tol = c.tol;
  o.seed = c.seed;
  const SweepResult r = gaussian_success_sweep(o);

  std::ostringstream csv;
  csv << std::setprecision(17) << "ratio,param,algo,success_rate,successes,trials\n";
  io::Json cells = io::Json::array();
  for (const auto& cell : r.cells) {
    csv << cell.ratio << ',' << cell.param << ',' << to_string(cell.algo) << ',' << cell.rate() << ','
        << cell.successes << ',' << cell.total << '\n';
    cells.push_back({{"ratio", cell.ratio},
                     {"param", cell.param},
                     {"algo", to_string(cell.algo)},
                     {"successes", cell.successes},
                     {"trials", cell.total}});
  }
  io::Json trials = io::Json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"ratio", t.ratio},
                      {"algo", to_string(t.algo)},
                      {"param", t.param},
                      {"trial", t.trial},
                      {"seed", t.seed},
                      {"iterations", t.iterations},
                      {"residual", t.residual},
                      {"aligned_error", t.aligned_error},
                      {"success", t.success}});
  }
  write(out, "sweep.csv", csv.str());
  write_json(out, "sweep.json", {{"cells", cells}, {"trials", trials}});
  write_json(out, "summary.json", {{"command", "sweep"}, {"cells", cells}});
  log << "sweep: " << r.cells.size() << " cells, " << r.trials.size() << " trial runs\n";
  return kExitOk;
}

int run_cdp(const RunConfig& c, const fs::path& out, std::ostream& log) {
  CdpOptions o;
  o.grid = parse_grid(c.grid);
  o.masks = c.masks;
  o.path_starts = c.paths;
  o.hold = c.hold;
  o.total = c.max_iters;
  o.end = c.end;
  o.noise_level = c.noise_level;
  o.seed = c.seed;
  o.init.weak_fraction = c.weak_fraction;
  o.init.power_iters = c.power_iters;
  o.record_every = c.record_every;
  if (o.total <= o.hold) throw UsageError("cdp needs max_iters > hold");
  const CdpCase which = cdp_case_from_string(c.cdp_case);
  const CdpCaseResult r = cdp_case_suite(which, o);
  const CVec& x0 = r.problem.object.x0;
  const double bnorm = r.problem.b.norm();

  write(out, "object_mag.pgm", io::pgm(r.problem.object.magnitude, o.grid, c.pgm_bits));
  write_image_pair(out, "init", r.problem.x_init, x0, o.grid, c.pgm_bits);
  io::Json paths = io::Json::array();
  bool converged = true;
  for (std::size_t i = 0; i < r.paths.size(); ++i) {
    const CdpPathResult& p = r.paths[i];
    const std::string stem = "path" + std::to_string(i) + "_beta" + format_param(p.start);
    write(out, "trace_" + stem + ".csv", io::trace_csv(p.trace));
    if (p.snapshot.size() > 0) write_image_pair(out, stem + "_snapshot", p.snapshot, x0, o.grid, c.pgm_bits);
    write_image_pair(out, stem + "_final", p.reconstruction, x0, o.grid, c.pgm_bits);
    const DiagnosticsRecord& last = p.trace.back();
    converged = converged && (last.residual <= c.tol || last.deriv_norm <= c.tol * bnorm);
    paths.push_back({{"start", p.start},
                     {"final", record_json(last)},
                     {"deriv_norm_relative", p.final_deriv_norm / bnorm},
                     {"aligned_error", p.aligned_error}});
  }
  std::ostringstream corr;
  corr << std::setprecision(17);
  for (Index i = 0; i < r.correlations.rows(); ++i) {
    for (Index j = 0; j < r.correlations.cols(); ++j) corr << (j ? "," : "") << r.correlations(i, j);
    corr << '\n';
  }
  write(out, "correlations.csv", corr.str());
  io::Json s;
  s["command"] = "cdp";
  s["case"] = c.cdp_case;
  s["noise_level"] = r.problem.noise_level;
  s["kappa"] = r.problem.kappa;
  s["paths"] = paths;
  s["min_correlation"] = r.min_correlation();
  write_json(out, "summary.json", s);
  log << "cdp case " << c.cdp_case << ": min pairwise correlation " << r.min_correlation() << '\n';
  return (c.strict && !converged) ? kExitNotConverged : kExitOk;
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& log) {
  const fs::path out(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw UsageError("cannot create output directory '" + cfg.out_dir + "'");
  if (cfg.command == "solve") return run_solve(cfg, out, log);
  if (cfg.command == "certify") return run_certify(cfg, out, log);
  if (cfg.command == "gap") return run_gap(cfg, out, log);
  if (cfg.command == "sweep") return run_sweep(cfg, out, log);
  if (cfg.command == "cdp") return run_cdp(cfg, out, log);
  throw UsageError("unknown command '" + cfg.command + "'");
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const ParseResult pr = parse_config(argc, argv);
    if (pr.help) {
      out << pr.message;
      return kExitOk;
    }
    if (pr.print_effective_config) {
      out << to_json(pr.config).dump(2) << '\n';
      return kExitOk;
    }
    return execute(pr.config, err);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace saddle_raar::cli
