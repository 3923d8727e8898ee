#pragma once

// Elementwise and reduction kernels used inside every iteration.
//
// Each kernel has a serial reference in `kernels::serial` and an OpenMP
// version in `kernels::omp` with the same signature. The library calls the
// OpenMP versions; the serial ones are kept for the kernel tests and the
// benchmark. Outputs may alias inputs.

#include <span>

#include "saddle_raar/types.hpp"

namespace saddle_raar::kernels {

/// Vectors shorter than this run serially even in the OpenMP kernels.
inline constexpr std::size_t kParallelThreshold = 4096;

namespace serial {

/// out_i = b_i * w_i / |w_i|, with w_i / |w_i| := 1 where w_i == 0.
void project_torus(std::span<const Complex> w, std::span<const double> b, std::span<Complex> out);

/// out = beta*w + (1 - 2*beta)*t + beta*p.
void raar_combine(double beta, std::span<const Complex> w, std::span<const Complex> t,
                  std::span<const Complex> p, std::span<Complex> out);

/// Re(x^H y).
double real_dot(std::span<const Complex> x, std::span<const Complex> y);

double norm_sq(std::span<const Complex> x);

/// out = M x for a column-major rows x cols matrix.
void matvec(const CMat& m, std::span<const Complex> x, std::span<Complex> out);

/// out = M^H x.
void adjoint_matvec(const CMat& m, std::span<const Complex> x, std::span<Complex> out);

}  // namespace serial

namespace omp {

void project_torus(std::span<const Complex> w, std::span<const double> b, std::span<Complex> out);
void raar_combine(double beta, std::span<const Complex> w, std::span<const Complex> t,
                  std::span<const Complex> p, std::span<Complex> out);
double real_dot(std::span<const Complex> x, std::span<const Complex> y);
double norm_sq(std::span<const Complex> x);
void matvec(const CMat& m, std::span<const Complex> x, std::span<Complex> out);
void adjoint_matvec(const CMat& m, std::span<const Complex> x, std::span<Complex> out);

}  // namespace omp

}  // namespace saddle_raar::kernels
