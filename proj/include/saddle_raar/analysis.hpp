#pragma once

// Max-min objective F(z, lambda; beta) = beta/2 ||A_perp (z - lambda)||^2 - 1/2 ||lambda||^2,
// its run diagnostics, fixed-point and cross-section certificates, and the
// spectral gap of coded diffraction ensembles.

#include <cstdint>
#include <limits>
#include <vector>

#include "saddle_raar/operators.hpp"

namespace saddle_raar {

struct DiagnosticsRecord {
  int k = 0;
  /// beta for RAAR/ADMM, rho for DRS.
  double param = 0.0;
  /// ||(I - P) z|| / ||b||.
  double residual = 0.0;
  /// D_lambda, or the fixed-point defect for DRS.
  double deriv_norm = 0.0;
  /// Inequality ratio; NaN for DRS.
  double t_ratio = 0.0;
  double objective = 0.0;
  std::int64_t wall_ns = 0;
};

// --- Objective and derivatives ---

double eval_F(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda, double beta);

/// Gradient of F in lambda under Re(x^H y): -(beta (I-P)(z - lambda) + lambda).
CVec grad_F_lambda(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda, double beta);

/// D_lambda = (||(I-P)((1-beta) lambda + beta z)||^2 + ||A lambda||^2)^{1/2}.
double deriv_norm(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda, double beta);

/// lambda = -beta' (I - P) z, the maximizer of F(z, .). Requires beta in (0, 1).
CVec dual_from_primal(const MeasurementEnsemble& e, const CVec& z, double beta);

/// ||(I - P) z|| / ||b||.
double relative_residual(const MeasurementEnsemble& e, const CVec& z, const Magnitudes& b);

/// q = z^{-1} (I-P)(z - lambda) on the support of b, 0 elsewhere.
CVec q_vector(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda, const Magnitudes& b);

/// K = Re(diag(conj u) P diag(u)) applied to a real vector.
RVec apply_K(const MeasurementEnsemble& e, const CVec& u, const RVec& xi);

/// Penalty threshold b^{-1} (K_perp b) at phase u (0 off the support).
RVec penalty_threshold(const MeasurementEnsemble& e, const CVec& u, const Magnitudes& b);

/// Largest beta with (1 - beta)/beta >= max threshold; 1 if the max is <= 0.
double beta_max_from_threshold(double max_threshold);

// --- Convergence functionals ---

/// argmin_{|alpha| = 1} ||w - alpha w_star||; 1 when the inner product vanishes.
Complex align_phase(const CVec& w, const CVec& w_star);

/// T(z, lambda) against (z_star, lambda_star) after phase alignment through
/// w = z + lambda.
double eval_T(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda, const CVec& z_star,
              const CVec& lambda_star, double beta);

/// 1 + 2<z, lambda> / (beta ||A_perp z||^2 + (1-beta) ||A_perp lambda||^2 + ||A lambda||^2);
/// +inf when the denominator vanishes. A numerator below the rounding bound
/// 16 eps sum |z_i| |z_i + lambda_i| counts as 0, giving 1.
double eval_inequality_ratio(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda, double beta);

/// T(z, lambda) - 2 <alpha z_star - z, lambda - alpha lambda_star>.
double key_inequality_margin(const MeasurementEnsemble& e, const CVec& z, const CVec& lambda,
                             const CVec& z_star, const CVec& lambda_star, double beta);

/// min_{|alpha|=1} ||x - alpha x0|| / ||x0||.
double aligned_error(const CVec& x, const CVec& x0);

/// |<x, y>| / (||x|| ||y||).
double aligned_correlation(const CVec& x, const CVec& y);

/// All RAAR/ADMM diagnostics at (z, lambda).
DiagnosticsRecord diagnose(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& z, const CVec& lambda,
                           double beta);

// --- Certificates ---

struct FixedPointCertificate {
  /// ||P(b u) - c u||.
  double phase_residual = 0.0;
  /// ||P((b - |w|) u)||.
  double f1_residual = 0.0;
  /// ||(I-P)(b u) - beta'^{-1} (b - |w|) u||.
  double f2_residual = 0.0;
  /// c from |w| and beta.
  RVec c;
  /// ||Im(conj(u) P(b u))|| relative to ||c||; zero at a critical phase.
  double c_imag_ratio = 0.0;
  /// c - (1 - beta'^{-1}) b; nonnegative entrywise when the magnitude condition holds.
  RVec magnitude_margin;
  bool magnitude_ok = false;
  double max_threshold = 0.0;
  /// Admissible betas are (0, beta_max].
  double beta_max = 1.0;
  bool certified = false;
};

FixedPointCertificate certify_fixed_point(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& w,
                                          double beta, double tol);

struct CertifyOptions {
  /// Largest N assembled densely.
  Index dense_cap = 4096;
  /// Largest N handled matrix-free.
  Index matrix_free_cap = Index(1) << 24;
  double lanczos_tol = 1e-8;
  int lanczos_max_steps = 600;
  std::uint64_t seed = 7;
};

struct SaddleCertificate {
  CVec q;
  /// Multiplier fitted to Im(q) with b^2 weights.
  double fitted_rho = 0.0;
  /// ||Im(q) - rho 1||.
  double first_order_defect = 0.0;
  /// Minimum of <xi, (K_perp - diag(Re q)) xi> over unit xi orthogonal to b.
  double hessian_min_eig = 0.0;
  double eig_residual = 0.0;
  /// Symmetry defect ||H - H^T|| / ||H|| of the assembled matrix (dense path).
  double symmetry_defect = 0.0;
  bool strict = false;
  /// Largest beta for which (1-beta) K_perp > 2 diag(q0) on the cross section.
  double beta_bound = 0.0;
  /// Largest beta for which <xi, (K_perp - diag(q0)) xi> > beta ||K_perp xi||^2.
  double beta_bound_norm_form = 0.0;
  bool dense = true;
  bool converged = true;
};

SaddleCertificate certify_cross_section_minimizer(const MeasurementEnsemble& e, const Magnitudes& b,
                                                  const CVec& z, const CVec& lambda, double beta,
                                                  const CertifyOptions& opts = {});

/// Restricted matrix (K_perp - diag(Re q)) on the cross section, expressed in
/// an orthonormal basis of {xi : <xi, b> = 0}. Dense path only.
RMat restricted_hessian(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& z, const CVec& lambda);

struct DrsCertificate {
  double range_defect = 0.0;       // ||P mu||
  double complement_defect = 0.0;  // ||(I-P) z||
  double magnitude_defect = 0.0;   // ||z + rho mu - [z]_Z||
  /// Min over unit c orthogonal to |z| of <c, ((rho+1) I - diag(b/|z|) - rho K) c>.
  double second_order_min_eig = 0.0;
  bool dense = true;
  bool converged = true;
};

DrsCertificate certify_drs_fixed_point(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& z,
                                       const CVec& lambda, double rho, const CertifyOptions& opts = {});

struct SpectralGap {
  double lambda2 = 0.0;
  double top_singular = 0.0;
  /// ||B r1 - y1|| for the analytic top pair built from i x0.
  double top_pair_residual = 0.0;
  int object_rank = 0;
  /// Masked-DFT ensemble, l >= 2, a non-constant mask and rank >= 2.
  bool hypothesis_met = false;
  bool dense = true;
  bool converged = true;
};

SpectralGap spectral_gap_lambda2(const MeasurementEnsemble& e, const CVec& x0, GridShape grid,
                                 const CertifyOptions& opts = {});

// --- Fejer monitor ---

/// Tracks ||w_k - alpha_k w_star|| and the key-inequality terms along a RAAR
/// run against a reference fixed point.
class FejerMonitor {
 public:
  struct Step {
    int k = 0;
    double beta = 0.0;
    double dist_prev = 0.0;  // ||w_{k-1} - alpha_{k-1} w_star||
    double dist = 0.0;       // ||w_k - alpha_k w_star||
    double T = 0.0;          // T(z_k, lambda_k)
    double cross = 0.0;      // 2 <alpha z_star - z_k, lambda_k - alpha lambda_star>
    double margin() const { return T - cross; }
  };

  struct Summary {
    /// First k such that every later step has positive margin; -1 if none.
    int window_start = -1;
    int window_steps = 0;
    /// Largest increase of the aligned distance inside the window.
    double max_increase = 0.0;
    /// Admissible constant of the key inequality over the window.
    double c0 = std::numeric_limits<double>::infinity();
    /// max over partial sums of sum T - bound; <= 0 when the bound holds.
    double worst_sum_excess = 0.0;
    double bound = 0.0;
  };

  FejerMonitor(const MeasurementEnsemble& e, const Magnitudes& b, CVec z_star, CVec lambda_star);

  /// Record the step w_prev -> w_next taken with parameter beta.
  void observe(const CVec& w_prev, const CVec& w_next, double beta);

  const std::vector<Step>& steps() const { return steps_; }
  Summary summarize() const;

 private:
  const MeasurementEnsemble* e_;
  const Magnitudes* b_;
  CVec z_star_, lambda_star_, w_star_;
  std::vector<Step> steps_;
};

}  // namespace saddle_raar
