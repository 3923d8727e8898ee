#include <doctest.h>

#include <random>

#include "saddle_raar/kernels.hpp"

using namespace saddle_raar;
namespace ks = saddle_raar::kernels::serial;
namespace ko = saddle_raar::kernels::omp;

namespace {

CVec gaussian(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVec v(n);
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return v;
}

}  // namespace

TEST_CASE("serial kernels against plain Eigen expressions") {
  const Index n = 37;
  const CVec w = gaussian(n, 1), t = gaussian(n, 2), p = gaussian(n, 3);
  const RVec b = RVec::LinSpaced(n, 0.0, 2.0);
  CVec out(n);

  ks::project_torus(as_span(w), as_span(b), as_span(out));
  for (Index i = 0; i < n; ++i) CHECK(std::abs(out[i] - b[i] * w[i] / std::abs(w[i])) < 1e-14);

  ks::raar_combine(0.3, as_span(w), as_span(t), as_span(p), as_span(out));
  CHECK((out - (0.3 * w + 0.4 * t + 0.3 * p)).norm() < 1e-13);

  CHECK(ks::real_dot(as_span(w), as_span(t)) == doctest::Approx(w.dot(t).real()).epsilon(1e-13));
  CHECK(ks::norm_sq(as_span(w)) == doctest::Approx(w.squaredNorm()).epsilon(1e-13));

  const CMat m = CMat::Random(n, 11);
  const CVec x = gaussian(11, 4);
  ks::matvec(m, as_span(x), as_span(out));
  CHECK((out - m * x).norm() < 1e-12);
  CVec back(11);
  ks::adjoint_matvec(m, as_span(w), as_span(back));
  CHECK((back - m.adjoint() * w).norm() < 1e-12);
}

TEST_CASE("torus kernel maps zero entries to phase one") {
  CVec w = CVec::Zero(3);
  const RVec b = RVec::Constant(3, 2.0);
  CVec out(3);
  ks::project_torus(as_span(w), as_span(b), as_span(out));
  CHECK(out == CVec::Constant(3, Complex(2.0, 0.0)));
}

TEST_CASE("OpenMP kernels agree with the serial references above the threshold") {
  const Index n = static_cast<Index>(3 * kernels::kParallelThreshold + 17);
  const CVec w = gaussian(n, 5), t = gaussian(n, 6), p = gaussian(n, 7);
  const RVec b = w.cwiseAbs() + RVec::Ones(n);
  CVec a(n), c(n);

  ks::project_torus(as_span(w), as_span(b), as_span(a));
  ko::project_torus(as_span(w), as_span(b), as_span(c));
  CHECK(a == c);

  ks::raar_combine(0.9, as_span(w), as_span(t), as_span(p), as_span(a));
  ko::raar_combine(0.9, as_span(w), as_span(t), as_span(p), as_span(c));
  CHECK(a == c);

  const double rs = ks::real_dot(as_span(w), as_span(t)), ro = ko::real_dot(as_span(w), as_span(t));
  CHECK(std::abs(rs - ro) <= 1e-12 * std::abs(rs) + 1e-12);
  CHECK(ko::norm_sq(as_span(w)) == doctest::Approx(ks::norm_sq(as_span(w))).epsilon(1e-13));

  const CMat m = CMat::Random(300, 40);
  const CVec x = gaussian(40, 8);
  CVec m1(300), m2(300);
  ks::matvec(m, as_span(x), as_span(m1));
  ko::matvec(m, as_span(x), as_span(m2));
  CHECK((m1 - m2).norm() < 1e-12 * m1.norm());
  const CVec y = gaussian(300, 9);
  CVec a1(40), a2(40);
  ks::adjoint_matvec(m, as_span(y), as_span(a1));
  ko::adjoint_matvec(m, as_span(y), as_span(a2));
  CHECK((a1 - a2).norm() < 1e-12 * a1.norm());
}

TEST_CASE("kernels allow the output to alias an input") {
  const Index n = 64;
  CVec w = gaussian(n, 10);
  const CVec t = gaussian(n, 11), p = gaussian(n, 12);
  const CVec expect = 0.7 * w - 0.4 * t + 0.7 * p;
  ko::raar_combine(0.7, as_span(w), as_span(t), as_span(p), as_span(w));
  CHECK((w - expect).norm() < 1e-13);
}
