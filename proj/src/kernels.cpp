#include "saddle_raar/kernels.hpp"

#include <cmath>

namespace saddle_raar::kernels {

namespace {

inline Complex unit_phase(Complex w) {
  const double r = std::abs(w);
  return r > 0.0 ? w / r : Complex(1.0, 0.0);
}

inline long as_long(std::size_t n) { return static_cast<long>(n); }

}  // namespace

namespace serial {

void project_torus(std::span<const Complex> w, std::span<const double> b, std::span<Complex> out) {
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = b[i] * unit_phase(w[i]);
}

void raar_combine(double beta, std::span<const Complex> w, std::span<const Complex> t,
                  std::span<const Complex> p, std::span<Complex> out) {
  const double c = 1.0 - 2.0 * beta;
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = beta * w[i] + c * t[i] + beta * p[i];
}

double real_dot(std::span<const Complex> x, std::span<const Complex> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
  return s;
}

double norm_sq(std::span<const Complex> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return s;
}

void matvec(const CMat& m, std::span<const Complex> x, std::span<Complex> out) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  for (Index i = 0; i < rows; ++i) out[i] = 0.0;
  for (Index j = 0; j < cols; ++j) {
    const Complex xj = x[j];
    const Complex* col = m.data() + j * rows;
    for (Index i = 0; i < rows; ++i) out[i] += col[i] * xj;
  }
}

void adjoint_matvec(const CMat& m, std::span<const Complex> x, std::span<Complex> out) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  for (Index j = 0; j < cols; ++j) {
    const Complex* col = m.data() + j * rows;
    Complex s = 0.0;
    for (Index i = 0; i < rows; ++i) s += std::conj(col[i]) * x[i];
    out[j] = s;
  }
}

}  // namespace serial

namespace omp {

void project_torus(std::span<const Complex> w, std::span<const double> b, std::span<Complex> out) {
  const long n = as_long(w.size());
#pragma omp parallel for if (w.size() >= kParallelThreshold)
  for (long i = 0; i < n; ++i) out[i] = b[i] * unit_phase(w[i]);
}

void raar_combine(double beta, std::span<const Complex> w, std::span<const Complex> t,
                  std::span<const Complex> p, std::span<Complex> out) {
  const double c = 1.0 - 2.0 * beta;
  const long n = as_long(w.size());
#pragma omp parallel for if (w.size() >= kParallelThreshold)
  for (long i = 0; i < n; ++i) out[i] = beta * w[i] + c * t[i] + beta * p[i];
}

double real_dot(std::span<const Complex> x, std::span<const Complex> y) {
  double s = 0.0;
  const long n = as_long(x.size());
#pragma omp parallel for reduction(+ : s) if (x.size() >= kParallelThreshold)
  for (long i = 0; i < n; ++i) s += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
  return s;
}

double norm_sq(std::span<const Complex> x) {
  double s = 0.0;
  const long n = as_long(x.size());
#pragma omp parallel for reduction(+ : s) if (x.size() >= kParallelThreshold)
  for (long i = 0; i < n; ++i) s += std::norm(x[i]);
  return s;
}

void matvec(const CMat& m, std::span<const Complex> x, std::span<Complex> out) {
  const long rows = static_cast<long>(m.rows());
  const Index cols = m.cols();
  const bool par = static_cast<std::size_t>(m.size()) >= kParallelThreshold * 16;
#pragma omp parallel for if (par)
  for (long i = 0; i < rows; ++i) {
    Complex s = 0.0;
    for (Index j = 0; j < cols; ++j) s += m(i, j) * x[j];
    out[i] = s;
  }
}

void adjoint_matvec(const CMat& m, std::span<const Complex> x, std::span<Complex> out) {
  const Index rows = m.rows();
  const long cols = static_cast<long>(m.cols());
  const bool par = static_cast<std::size_t>(m.size()) >= kParallelThreshold * 16;
#pragma omp parallel for if (par)
  for (long j = 0; j < cols; ++j) {
    const Complex* col = m.data() + j * rows;
    Complex s = 0.0;
    for (Index i = 0; i < rows; ++i) s += std::conj(col[i]) * x[i];
    out[j] = s;
  }
}

}  // namespace omp

}  // namespace saddle_raar::kernels
