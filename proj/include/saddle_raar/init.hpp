#pragma once

#include <cstdint>
#include <string>

#include "saddle_raar/solvers.hpp"

namespace saddle_raar {

enum class InitKind { NullVector, Random };

std::string to_string(InitKind k);
InitKind init_kind_from_string(const std::string& s);

struct InitSpec {
  InitKind kind = InitKind::NullVector;
  /// Fraction of measurements (smallest b) forming the weak set; in (0, 1).
  double weak_fraction = 0.5;
  /// Power iterations, >= 1.
  int power_iters = 200;
  double power_tol = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct NullVectorResult {
  /// Unit-norm object vector.
  CVec x;
  /// Rayleigh quotient of x under x -> x - A(1_I A^* x).
  double eigenvalue = 0.0;
  /// ||M x - eigenvalue x||.
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizer of ||1_I (A^* x)|| over unit x, I the weak index set, by power
/// iteration on x -> x - A(1_I A^* x).
NullVectorResult null_vector(const MeasurementEnsemble& e, const Magnitudes& b, const InitSpec& spec);

/// Unit-norm complex Gaussian object vector.
CVec random_object_vector(Index n, std::uint64_t seed);

/// i.i.d. complex Gaussian w0 of length N.
CVec random_lifted_vector(Index N, std::uint64_t seed);

struct InitialStates {
  RaarState raar;
  /// z = [w0]_Z, lambda = w0 - z; y is left equal to z - lambda.
  AdmmState admm;
  CVec w0;
};

/// Starting states from a raw lifted vector w0 (nonzero).
InitialStates make_initial_state_lifted(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& w0,
                                        double beta);

/// Starting states from an object vector: w0 = A^* x_init.
InitialStates make_initial_state(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& x_init,
                                 double beta);

/// DRS start: z = [A^* x_init]_Z, lambda = 0.
DrsState make_drs_state(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& x_init, double rho);

/// Object-space starting vector of kind spec.kind (null vector or random), scaled to norm ||b||.
CVec initial_object(const MeasurementEnsemble& e, const Magnitudes& b, const InitSpec& spec);

}  // namespace saddle_raar
