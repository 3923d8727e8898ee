#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "saddle_raar/analysis.hpp"
#include "saddle_raar/init.hpp"

using namespace saddle_raar;

TEST_CASE("init kind names") {
  CHECK(init_kind_from_string("null") == InitKind::NullVector);
  CHECK(init_kind_from_string("null-vector") == InitKind::NullVector);
  CHECK(init_kind_from_string("random") == InitKind::Random);
  CHECK(to_string(InitKind::Random) == "random");
  CHECK_THROWS_AS(init_kind_from_string("spectral"), RangeError);
}

TEST_CASE("InitSpec validation") {
  InitSpec s;
  CHECK_NOTHROW(s.validate());
  s.weak_fraction = 1.0;
  CHECK_THROWS_AS(s.validate(), RangeError);
  s.weak_fraction = 0.5;
  s.power_iters = 0;
  CHECK_THROWS_AS(s.validate(), RangeError);
}

TEST_CASE("null vector matches the dense eigenvector of the weak-set energy") {
  const auto e = build_gaussian_ensemble(8, 64, 3);
  const Magnitudes b = noiseless_magnitudes(e, random_object_vector(8, 4));
  InitSpec spec;
  spec.power_iters = 20000;
  spec.power_tol = 1e-12;
  spec.seed = 5;
  const auto r = null_vector(e, b, spec);
  CHECK(r.converged);
  CHECK(r.x.norm() == doctest::Approx(1.0).epsilon(1e-12));

  // Oracle: smallest eigenvector of A diag(1_I) A^* with I the 32 smallest b.
  std::vector<Index> order(64);
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return b[i] < b[j]; });
  const CMat a = e.materialize_adjoint();
  CMat weak = CMat::Zero(32, 8);
  for (Index i = 0; i < 32; ++i) weak.row(i) = a.row(order[static_cast<std::size_t>(i)]);
  Eigen::SelfAdjointEigenSolver<CMat> es(weak.adjoint() * weak);
  const CVec v = es.eigenvectors().col(0);
  CHECK(std::abs(v.dot(r.x)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.eigenvalue == doctest::Approx(1.0 - es.eigenvalues()[0]).epsilon(1e-8));
}

TEST_CASE("null vector beats random starts on a coded diffraction instance") {
  const GridShape grid{16, 16};
  const auto obj = build_rpp(grid, 3);
  const auto e = build_default_cdp(grid, 2, 4);
  const Magnitudes b = noiseless_magnitudes(e, obj.x0);
  InitSpec null_spec;
  null_spec.power_iters = 300;
  const double null_corr = aligned_correlation(initial_object(e, b, null_spec), obj.x0);
  double best_random = 0.0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    InitSpec rs;
    rs.kind = InitKind::Random;
    rs.seed = s;
    best_random = std::max(best_random, aligned_correlation(initial_object(e, b, rs), obj.x0));
  }
  CHECK(null_corr > 0.5);
  CHECK(null_corr > best_random);
}

TEST_CASE("initial objects carry the data scale") {
  const auto e = build_gaussian_ensemble(6, 30, 11);
  const Magnitudes b = noiseless_magnitudes(e, 3.0 * random_object_vector(6, 12));
  InitSpec spec;
  spec.kind = InitKind::Random;
  spec.seed = 13;
  CHECK(initial_object(e, b, spec).norm() == doctest::Approx(b.norm()));
  spec.kind = InitKind::NullVector;
  CHECK(initial_object(e, b, spec).norm() == doctest::Approx(b.norm()));
}

TEST_CASE("random vectors are reproducible") {
  CHECK(random_object_vector(7, 1) == random_object_vector(7, 1));
  CHECK(random_object_vector(7, 1) != random_object_vector(7, 2));
  CHECK(random_object_vector(7, 1).norm() == doctest::Approx(1.0));
  CHECK(random_lifted_vector(9, 3).size() == 9);
}

TEST_CASE("initial states") {
  const auto e = build_gaussian_ensemble(6, 24, 15);
  const CVec x0 = random_object_vector(6, 16);
  const Magnitudes b = noiseless_magnitudes(e, x0);

  // A^* x0 lies on the torus, so the dual starts at zero.
  const auto on = make_initial_state(e, b, x0, 0.7);
  CHECK(on.admm.lambda.norm() < 1e-14);
  CHECK((on.raar.w - e.apply_adjoint(x0)).norm() < 1e-14);
  CHECK(on.raar.beta == 0.7);

  const CVec w0 = random_lifted_vector(24, 17);
  const auto off = make_initial_state_lifted(e, b, w0, 0.6);
  CHECK((off.admm.z - project_torus(w0, b)).norm() == 0.0);
  CHECK((off.admm.z + off.admm.lambda - w0).norm() < 1e-14 * w0.norm());
  CHECK((off.admm.y - (off.admm.z - off.admm.lambda)).norm() == 0.0);

  CHECK_THROWS_AS(make_initial_state(e, b, CVec::Zero(6), 0.5), InvalidDataError);
  CHECK_THROWS_AS(make_initial_state_lifted(e, b, CVec::Zero(24), 0.5), InvalidDataError);
  CHECK_THROWS_AS(make_initial_state(e, b, CVec::Ones(5), 0.5), DimensionError);

  const DrsState d = make_drs_state(e, b, x0, 0.25);
  CHECK(d.lambda.norm() == 0.0);
  CHECK(on_torus(d.z, b));
  CHECK(d.rho == 0.25);
}
