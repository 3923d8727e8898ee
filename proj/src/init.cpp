#include "saddle_raar/init.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace saddle_raar {

std::string to_string(InitKind k) { return k == InitKind::NullVector ? "null" : "random"; }

InitKind init_kind_from_string(const std::string& s) {
  if (s == "null" || s == "null-vector") return InitKind::NullVector;
  if (s == "random") return InitKind::Random;
  throw RangeError("unknown init kind '" + s + "' (expected null or random)");
}

void InitSpec::validate() const {
  if (!(weak_fraction > 0.0 && weak_fraction < 1.0)) throw RangeError("weak_fraction must lie in (0, 1)");
  if (power_iters < 1) throw RangeError("power_iters must be >= 1");
  if (!(power_tol > 0.0)) throw RangeError("power_tol must be positive");
}

namespace {

CVec gaussian_vector(Index len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CVec v(len);
  for (Index i = 0; i < len; ++i) {
    const double re = normal(rng);
    v[i] = Complex(re, normal(rng));
  }
  return v;
}

}  // namespace

CVec random_object_vector(Index n, std::uint64_t seed) { return gaussian_vector(n, seed).normalized(); }

CVec random_lifted_vector(Index N, std::uint64_t seed) { return gaussian_vector(N, seed); }

NullVectorResult null_vector(const MeasurementEnsemble& e, const Magnitudes& b, const InitSpec& spec) {
  spec.validate();
  require_size(b.size(), e.N(), "null_vector");
  if (b.norm() == 0.0) throw InvalidDataError("null_vector: all-zero magnitudes");

  const Index big_n = e.N();
  const auto weak = static_cast<Index>(std::floor(spec.weak_fraction * static_cast<double>(big_n)));
  std::vector<Index> order(static_cast<std::size_t>(big_n));
  std::iota(order.begin(), order.end(), Index(0));
  // Ties broken by index so the weak set is deterministic.
  std::stable_sort(order.begin(), order.end(), [&b](Index i, Index j) { return b[i] < b[j]; });
  RVec mask = RVec::Zero(big_n);
  for (Index i = 0; i < weak; ++i) mask[order[static_cast<std::size_t>(i)]] = 1.0;

  auto apply_m = [&](const CVec& x) -> CVec {
    const CVec ax = e.apply_adjoint(x);
    return x - e.apply(mask.cast<Complex>().cwiseProduct(ax));
  };

  NullVectorResult res;
  CVec x = random_object_vector(e.n(), spec.seed);
  for (int it = 1; it <= spec.power_iters; ++it) {
    const CVec mx = apply_m(x);
    res.eigenvalue = x.dot(mx).real();
    res.residual = (mx - res.eigenvalue * x).norm();
    res.iterations = it;
    if (res.residual <= spec.power_tol) {
      res.converged = true;
      break;
    }
    const double nm = mx.norm();
    if (nm == 0.0) break;
    x = mx / nm;
  }
  res.x = std::move(x);
  return res;
}

InitialStates make_initial_state_lifted(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& w0,
                                        double beta) {
  require_size(w0.size(), e.N(), "make_initial_state");
  if (w0.norm() == 0.0) throw InvalidDataError("make_initial_state: zero initial vector");
  InitialStates s;
  s.w0 = w0;
  s.raar = RaarState{w0, 0, beta};
  // lambda_1 = w0 - z_1 makes w'_1 = y_2 + lambda_1 equal S(w0). Only
  // (I-P) lambda_1 enters w'_k, and (I-P) w0 alone is off by (I-P) z_1.
  s.admm.z = project_torus(w0, b);
  s.admm.lambda = w0 - s.admm.z;
  s.admm.y = s.admm.z - s.admm.lambda;
  s.admm.beta = beta;
  s.admm.k = 0;
  return s;
}

InitialStates make_initial_state(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& x_init,
                                 double beta) {
  require_size(x_init.size(), e.n(), "make_initial_state");
  if (x_init.norm() == 0.0) throw InvalidDataError("make_initial_state: zero initial vector");
  return make_initial_state_lifted(e, b, e.apply_adjoint(x_init), beta);
}

DrsState make_drs_state(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& x_init, double rho) {
  require_size(x_init.size(), e.n(), "make_drs_state");
  if (x_init.norm() == 0.0) throw InvalidDataError("make_drs_state: zero initial vector");
  DrsState s;
  s.z = project_torus(e.apply_adjoint(x_init), b);
  s.lambda = CVec::Zero(e.N());
  s.y = e.project_range(s.z);
  s.rho = rho;
  return s;
}

CVec initial_object(const MeasurementEnsemble& e, const Magnitudes& b, const InitSpec& spec) {
  // Unit vectors scaled to ||b|| = ||x0|| (noiseless), the scale of the solution.
  if (spec.kind == InitKind::NullVector) return b.norm() * null_vector(e, b, spec).x;
  return b.norm() * random_object_vector(e.n(), spec.seed);
}

}  // namespace saddle_raar
