#include "saddle_raar/analysis.hpp"

#include <cmath>
#include <limits>

#include "saddle_raar/solvers.hpp"

namespace saddle_raar {

namespace {

void require_beta_open(double beta, const char* what) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw RangeError(std::string(what) + ": beta must lie in (0, 1), got " + std::to_string(beta));
  }
}

void require_beta_half_open(double beta, const char* what) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw RangeError(std::string(what) + ": beta must lie in (0, 1], got " + std::to_string(beta));
  }
}

}  // namespace

double eval_F(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda, double beta) {
  require_beta_half_open(beta, "eval_F");
  const CVec r = e.project_complement(z - lambda);
  return 0.5 * beta * r.squaredNorm() - 0.5 * lambda.squaredNorm();
}

CVec grad_F_lambda(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda, double beta) {
  return -(beta * e.project_complement(z - lambda) + lambda);
}

double deriv_norm(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda, double beta) {
  const CVec mix = e.project_complement((1.0 - beta) * lambda + beta * z);
  const CVec a_lambda = e.apply(lambda);
  return std::sqrt(mix.squaredNorm() + a_lambda.squaredNorm());
}

CVec dual_from_primal(const MeasurementEnsemble& e, const CVec& z, double beta) {
  if (beta == 1.0) throw RangeError("dual_from_primal: beta' is infinite at beta = 1");
  require_beta_open(beta, "dual_from_primal");
  return -beta_prime(beta) * e.project_complement(z);
}

double relative_residual(const MeasurementEnsemble& e, const CVec& z, const Magnitudes& b) {
  return e.project_complement(z).norm() / b.norm();
}

CVec q_vector(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda, const Magnitudes& b) {
  require_size(z.size(), e.N(), "q_vector");
  require_size(b.size(), e.N(), "q_vector");
  const CVec r = e.project_complement(z - lambda);
  CVec q = CVec::Zero(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    if (b[i] == 0.0) continue;
    if (z[i] == Complex(0.0)) throw DivisionError("q_vector: z vanishes at index " + std::to_string(i));
    q[i] = r[i] / z[i];
  }
  return q;
}

RVec apply_K(const MeasurementEnsemble& e, const CVec& u, const RVec& xi) {
  const CVec v = u.cwiseProduct(xi.cast<Complex>());
  return (u.conjugate().cwiseProduct(e.project_range(v))).real();
}

RVec penalty_threshold(const MeasurementEnsemble& e, const CVec& u, const Magnitudes& b) {
  const RVec kb = apply_K(e, u, b.values());
  RVec t = RVec::Zero(b.size());
  for (Index i = 0; i < b.size(); ++i)
    if (b[i] > 0.0) t[i] = (b[i] - kb[i]) / b[i];
  return t;
}

double beta_max_from_threshold(double max_threshold) {
  if (max_threshold <= 0.0) return 1.0;
  return 1.0 / (1.0 + max_threshold);
}

Complex align_phase(const CVec& w, const CVec& w_star) {
  const Complex ip = w_star.dot(w);  // w_star^H w
  const double m = std::abs(ip);
  return m > 0.0 ? ip / m : Complex(1.0);
}

double eval_T(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda, const CVec& z_star,
              const CVec& lambda_star, double beta) {
  require_beta_open(beta, "eval_T");
  const Complex alpha = align_phase(z + lambda, z_star + lambda_star);
  const double dz = e.project_complement(z - alpha * z_star).squaredNorm();
  const double dl = e.project_complement(lambda - alpha * lambda_star).squaredNorm();
  const double al = e.apply(lambda).squaredNorm();
  return beta * dz + (1.0 - beta) * dl + al;
}

namespace {

// 1 + 2<z, lambda>/den. <z, lambda> below the rounding error of forming
// lambda = w - z is unresolved and read as 0.
double ratio_with_floor(const CVec& z, const CVec& lambda, double den) {
  double num = 2.0 * inner(z, lambda);
  const double floor = 16.0 * std::numeric_limits<double>::epsilon() * z.cwiseAbs().dot((z + lambda).cwiseAbs());
  if (std::abs(num) <= floor) num = 0.0;
  if (num == 0.0) return 1.0;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 + num / den;
}

}  // namespace

double eval_inequality_ratio(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda, double beta) {
  const double den = beta * e.project_complement(z).squaredNorm() +
                     (1.0 - beta) * e.project_complement(lambda).squaredNorm() + e.apply(lambda).squaredNorm();
  return ratio_with_floor(z, lambda, den);
}

double key_inequality_margin(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda,
                             const CVec& z_star, const CVec& lambda_star, double beta) {
  const Complex alpha = align_phase(z + lambda, z_star + lambda_star);
  const double t = eval_T(e, z, lambda, z_star, lambda_star, beta);
  return t - 2.0 * inner(alpha * z_star - z, lambda - alpha * lambda_star);
}

double aligned_error(const CVec& x, const CVec& x0) {
  const double n0 = x0.norm();
  if (n0 == 0.0) throw InvalidDataError("aligned_error: reference object is zero");
  const Complex alpha = align_phase(x, x0);
  return (x - alpha * x0).norm() / n0;
}

double aligned_correlation(const CVec& x, const CVec& y) {
  const double d = x.norm() * y.norm();
  if (d == 0.0) return 0.0;
  return std::abs(x.dot(y)) / d;
}

DiagnosticsRecord diagnose(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& z, const CVec& lambda,
                           double beta) {
  DiagnosticsRecord rec;
  rec.param = beta;
  const CVec pz = e.project_range(z);
  const CVec a_lambda = e.apply(lambda);
  const CVec pl = e.apply_adjoint(a_lambda);
  const CVec cz = z - pz;
  const CVec cl = lambda - pl;
  rec.residual = cz.norm() / b.norm();
  const CVec mix = (1.0 - beta) * cl + beta * cz;
  const double al2 = a_lambda.squaredNorm();
  rec.deriv_norm = std::sqrt(mix.squaredNorm() + al2);
  const double den = beta * cz.squaredNorm() + (1.0 - beta) * cl.squaredNorm() + al2;
  rec.t_ratio = ratio_with_floor(z, lambda, den);
  rec.objective = 0.5 * beta * (cz - cl).squaredNorm() - 0.5 * lambda.squaredNorm();
  return rec;
}

// ---------------------------------------------------------------------------

FixedPointCertificate certify_fixed_point(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& w,
                                          double beta, double tol) {
  require_beta_open(beta, "certify_fixed_point");
  require_size(w.size(), e.N(), "certify_fixed_point");
  require_size(b.size(), e.N(), "certify_fixed_point");
  FixedPointCertificate cert;
  const double bp = beta_prime(beta);
  const double inv_bp = 1.0 / bp;
  const CVec u = unit_phase(w);
  const RVec absw = w.cwiseAbs();
  const RVec& bv = b.values();

  cert.c = (1.0 - inv_bp) * bv + inv_bp * absw;
  const CVec bu = u.cwiseProduct(bv.cast<Complex>());
  const CVec pbu = e.project_range(bu);
  cert.phase_residual = (pbu - u.cwiseProduct(cert.c.cast<Complex>())).norm();

  const CVec fitted = u.conjugate().cwiseProduct(pbu);
  const double cn = cert.c.norm();
  cert.c_imag_ratio = cn > 0.0 ? fitted.imag().norm() / cn : fitted.imag().norm();

  const CVec gap = u.cwiseProduct((bv - absw).cast<Complex>());
  cert.f1_residual = e.project_range(gap).norm();
  cert.f2_residual = ((bu - pbu) - inv_bp * gap).norm();

  cert.magnitude_margin = cert.c - (1.0 - inv_bp) * bv;
  cert.magnitude_ok = (cert.magnitude_margin.array() >= -tol).all();

  const RVec t = penalty_threshold(e, u, b);
  cert.max_threshold = t.size() ? t.maxCoeff() : 0.0;
  cert.beta_max = beta_max_from_threshold(cert.max_threshold);
  cert.certified = cert.phase_residual <= tol && cert.f1_residual <= tol && cert.f2_residual <= tol &&
                   cert.magnitude_ok;
  return cert;
}

// ---------------------------------------------------------------------------

FejerMonitor::FejerMonitor(const MeasurementEnsemble& e, const Magnitudes& b, CVec z_star, CVec lambda_star)
    : e_(&e), b_(&b), z_star_(std::move(z_star)), lambda_star_(std::move(lambda_star)) {
  w_star_ = z_star_ + lambda_star_;
}

void FejerMonitor::observe(const CVec& w_prev, const CVec& w_next, double beta) {
  Step s;
  s.k = static_cast<int>(steps_.size()) + 1;
  s.beta = beta;
  const CVec z = project_torus(w_prev, *b_);
  const CVec lambda = w_prev - z;
  const Complex a_prev = align_phase(w_prev, w_star_);
  const Complex a_next = align_phase(w_next, w_star_);
  s.dist_prev = (w_prev - a_prev * w_star_).norm();
  s.dist = (w_next - a_next * w_star_).norm();
  s.T = eval_T(*e_, z, lambda, z_star_, lambda_star_, beta);
  s.cross = 2.0 * inner(a_prev * z_star_ - z, lambda - a_prev * lambda_star_);
  steps_.push_back(s);
}

FejerMonitor::Summary FejerMonitor::summarize() const {
  Summary out;
  int start = static_cast<int>(steps_.size());
  while (start > 0 && steps_[static_cast<std::size_t>(start) - 1].margin() > 0.0) --start;
  if (start == static_cast<int>(steps_.size())) return out;
  out.window_start = steps_[static_cast<std::size_t>(start)].k;
  out.window_steps = static_cast<int>(steps_.size()) - start;

  for (std::size_t i = static_cast<std::size_t>(start); i < steps_.size(); ++i) {
    const Step& s = steps_[i];
    out.max_increase = std::max(out.max_increase, s.dist - s.dist_prev);
    if (s.cross > 0.0) out.c0 = std::min(out.c0, s.T / s.cross);
  }
  const double factor = std::isinf(out.c0) ? 1.0 : 1.0 - 1.0 / out.c0;
  const double d0 = steps_[static_cast<std::size_t>(start)].dist_prev;
  out.bound = d0 * d0 / factor;
  double partial = 0.0;
  out.worst_sum_excess = -out.bound;
  for (std::size_t i = static_cast<std::size_t>(start); i < steps_.size(); ++i) {
    partial += steps_[i].T;
    out.worst_sum_excess = std::max(out.worst_sum_excess, partial - out.bound);
  }
  return out;
}

}  // namespace saddle_raar
