#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "saddle_raar/analysis.hpp"
#include "saddle_raar/lanczos.hpp"
#include "saddle_raar/solvers.hpp"

namespace saddle_raar {

namespace {

// Orthonormal basis of the complement of `normal`, applied as a congruence:
// returns Q^T M Q where the columns of Q span {xi : <xi, normal> = 0}. Q is the
// trailing block of the Householder reflector sending normal/||normal|| to e1.
RMat restrict_to_complement(const RMat& m, const RVec& normal) {
  const Index n = m.rows();
  RVec v = normal.normalized();
  v[0] -= 1.0;
  const double vv = v.squaredNorm();
  RMat r = m;
  if (vv > 1e-300) {
    const RVec vt_m = (v.transpose() * r).transpose();
    r.noalias() -= (2.0 / vv) * v * vt_m.transpose();
    const RVec r_v = r * v;
    r.noalias() -= (2.0 / vv) * r_v * v.transpose();
  }
  return r.bottomRightCorner(n - 1, n - 1);
}

// K = Re(diag(conj u) P diag(u)) assembled from the dense adjoint.
RMat assemble_K(const MeasurementEnsemble& e, const CVec& u) {
  const CMat m = u.conjugate().asDiagonal() * e.materialize_adjoint();
  const RMat mr = m.real();
  const RMat mi = m.imag();
  RMat k = mr * mr.transpose() + mi * mi.transpose();
  return 0.5 * (k + k.transpose());
}

double min_eig(const RMat& h, double* residual = nullptr) {
  Eigen::SelfAdjointEigenSolver<RMat> es(h);
  if (residual) {
    const RVec v = es.eigenvectors().col(0);
    *residual = (h * v - es.eigenvalues()[0] * v).norm();
  }
  return es.eigenvalues()[0];
}

double fitted_multiplier(const RVec& im_q, const RVec& b) {
  const RVec b2 = b.cwiseAbs2();
  const double den = b2.sum();
  return den > 0.0 ? im_q.dot(b2) / den : 0.0;
}

// Projects out the unit vector `dir` and adds `shift` along it, so that the
// smallest eigenvalue of the result is the smallest one on dir's complement.
SymmetricOperator restricted_operator(SymmetricOperator inner_op, RVec dir, double shift) {
  return [inner_op = std::move(inner_op), dir = std::move(dir), shift](const RVec& x, RVec& y) {
    const double c = dir.dot(x);
    const RVec px = x - c * dir;
    RVec hx(x.size());
    inner_op(px, hx);
    y = hx - dir.dot(hx) * dir + shift * c * dir;
  };
}

}  // namespace

RMat restricted_hessian(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& z, const CVec& lambda) {
  const CVec q = q_vector(e, z, lambda, b);
  const RMat k = assemble_K(e, unit_phase(z));
  RMat h = -k;
  h.diagonal().array() += 1.0 - q.real().array();
  return restrict_to_complement(h, b.values());
}

SaddleCertificate certify_cross_section_minimizer(const MeasurementEnsemble& e, const Magnitudes& b,
                                                  const CVec& z, const CVec& lambda, double beta,
                                                  const CertifyOptions& opts) {
  if (!(beta > 0.0 && beta < 1.0)) throw RangeError("certify_cross_section_minimizer: beta must lie in (0, 1)");
  require_size(z.size(), e.N(), "certify_cross_section_minimizer");
  if (!b.strictly_positive()) throw InvalidDataError("cross-section certificate requires b > 0 entrywise");
  const Index big_n = e.N();
  if (big_n > opts.matrix_free_cap) {
    throw CapacityError("N = " + std::to_string(big_n) + " exceeds the matrix-free certificate cap");
  }

  SaddleCertificate cert;
  cert.q = q_vector(e, z, lambda, b);
  const RVec re_q = cert.q.real();
  const RVec im_q = cert.q.imag();
  cert.fitted_rho = fitted_multiplier(im_q, b.values());
  cert.first_order_defect = (im_q.array() - cert.fitted_rho).matrix().norm();
  const CVec u = unit_phase(z);

  if (big_n <= opts.dense_cap) {
    cert.dense = true;
    const RMat k = assemble_K(e, u);
    RMat h = -k;
    h.diagonal().array() += 1.0 - re_q.array();
    const double hn = h.norm();
    cert.symmetry_defect = hn > 0.0 ? (h - h.transpose()).norm() / hn : 0.0;
    const RMat hr = restrict_to_complement(h, b.values());
    cert.hessian_min_eig = min_eig(hr, &cert.eig_residual);
    cert.converged = true;

    const RVec q0 = q_vector(e, z, CVec::Zero(big_n), b).real();
    RMat kperp = -k;
    kperp.diagonal().array() += 1.0;
    const RMat kperp_r = restrict_to_complement(kperp, b.values());
    if (min_eig(kperp_r) > 0.0) {
      const RMat d0_r = restrict_to_complement(RMat(q0.asDiagonal()), b.values());
      Eigen::GeneralizedSelfAdjointEigenSolver<RMat> pencil(2.0 * d0_r, kperp_r);
      const double gamma = pencil.eigenvalues().maxCoeff();
      cert.beta_bound = std::clamp(1.0 - gamma, 0.0, 1.0);

      RMat h0 = kperp;
      h0.diagonal() -= q0;
      const RMat h0_r = restrict_to_complement(h0, b.values());
      const RMat kk_r = restrict_to_complement(kperp * kperp, b.values());
      Eigen::GeneralizedSelfAdjointEigenSolver<RMat> h2(h0_r, kk_r);
      cert.beta_bound_norm_form = std::clamp(h2.eigenvalues().minCoeff(), 0.0, 1.0);
    }
  } else {
    cert.dense = false;
    const double shift = 2.0 + re_q.cwiseAbs().maxCoeff();
    SymmetricOperator h_op = [&e, &u, &re_q](const RVec& x, RVec& y) {
      y = x - apply_K(e, u, x) - re_q.cwiseProduct(x);
    };
    const LanczosResult lr = lanczos_extreme(restricted_operator(h_op, b.values().normalized(), shift), big_n,
                                             true, opts.lanczos_tol, opts.lanczos_max_steps, opts.seed);
    cert.hessian_min_eig = lr.value;
    cert.eig_residual = lr.residual;
    cert.converged = lr.converged;
    cert.beta_bound = std::numeric_limits<double>::quiet_NaN();
    cert.beta_bound_norm_form = std::numeric_limits<double>::quiet_NaN();
  }
  cert.strict = cert.hessian_min_eig > 0.0;
  return cert;
}

DrsCertificate certify_drs_fixed_point(const MeasurementEnsemble& e, const Magnitudes& b, const CVec& z,
                                       const CVec& lambda, double rho, const CertifyOptions& opts) {
  if (!(rho > 0.0)) throw RangeError("certify_drs_fixed_point: rho must be positive");
  require_size(z.size(), e.N(), "certify_drs_fixed_point");
  DrsCertificate cert;
  const CVec mu = lambda / rho;
  cert.range_defect = e.project_range(mu).norm();
  cert.complement_defect = e.project_complement(z).norm();
  cert.magnitude_defect = (z + rho * mu - project_torus(z, b)).norm();

  const RVec absz = z.cwiseAbs();
  for (Index i = 0; i < absz.size(); ++i)
    if (absz[i] == 0.0) throw DivisionError("certify_drs_fixed_point: z vanishes at index " + std::to_string(i));
  const RVec ratio = b.values().cwiseQuotient(absz);
  const CVec u = unit_phase(z);

  if (e.N() <= opts.dense_cap) {
    RMat h = -rho * assemble_K(e, u);
    h.diagonal().array() += (rho + 1.0) - ratio.array();
    cert.second_order_min_eig = min_eig(restrict_to_complement(h, absz));
  } else {
    cert.dense = false;
    const double shift = 2.0 + rho + ratio.maxCoeff();
    SymmetricOperator h_op = [&e, &u, &ratio, rho](const RVec& x, RVec& y) {
      y = (rho + 1.0) * x - ratio.cwiseProduct(x) - rho * apply_K(e, u, x);
    };
    const LanczosResult lr = lanczos_extreme(restricted_operator(h_op, absz.normalized(), shift), e.N(), true,
                                             opts.lanczos_tol, opts.lanczos_max_steps, opts.seed);
    cert.second_order_min_eig = lr.value;
    cert.converged = lr.converged;
  }
  return cert;
}

SpectralGap spectral_gap_lambda2(const MeasurementEnsemble& e, const CVec& x0, GridShape grid,
                                 const CertifyOptions& opts) {
  require_size(x0.size(), e.n(), "spectral_gap_lambda2");
  const CVec ax = e.apply_adjoint(x0);
  for (Index i = 0; i < ax.size(); ++i) {
    if (ax[i] == Complex(0.0)) {
      throw InvalidDataError("spectral_gap_lambda2: measurement " + std::to_string(i) + " vanishes; phase undefined");
    }
  }
  SpectralGap gap;
  const CVec u0 = unit_phase(ax);
  const Index n = e.n();
  const double nx = x0.norm();

  gap.object_rank = grid.size() == x0.size() ? matricized_rank(x0, grid) : 0;
  bool random_mask = false;
  for (const auto& mu : e.masks())
    if ((mu.array() != mu[0]).any()) random_mask = true;
  gap.hypothesis_met = e.kind() == EnsembleKind::MaskedDft && e.masks().size() >= 2 && random_mask &&
                       gap.object_rank >= 2;

  // Right vector of the unit singular value: [Im(i x0); Re(i x0)] / ||x0||.
  RVec r1(2 * n);
  r1.head(n) = x0.real() / nx;
  r1.tail(n) = -x0.imag() / nx;
  auto apply_b = [&](const RVec& r) -> RVec {
    const CVec v = r.head(n).cast<Complex>() - Complex(0.0, 1.0) * r.tail(n).cast<Complex>();
    return (u0.conjugate().cwiseProduct(e.apply_adjoint(v))).real();
  };
  auto apply_bt = [&](const RVec& y) -> RVec {
    const CVec a = e.apply(u0.cwiseProduct(y.cast<Complex>()));
    RVec out(2 * n);
    out.head(n) = a.real();
    out.tail(n) = -a.imag();
    return out;
  };
  const RVec y1 = ax.cwiseAbs() / ax.cwiseAbs().norm();
  gap.top_pair_residual = (apply_b(r1) - y1).norm();

  if (2 * n <= opts.dense_cap) {
    gap.dense = true;
    const CMat m = u0.conjugate().asDiagonal() * e.materialize_adjoint();
    RMat bb(e.N(), 2 * n);
    bb.leftCols(n) = m.real();
    bb.rightCols(n) = m.imag();
    Eigen::BDCSVD<RMat> svd(bb);
    const RVec& s = svd.singularValues();
    gap.top_singular = s[0];
    gap.lambda2 = s.size() > 1 ? s[1] : 0.0;
  } else {
    gap.dense = false;
    SymmetricOperator gram = [&](const RVec& x, RVec& y) {
      const RVec px = x - r1.dot(x) * r1;
      RVec g = apply_bt(apply_b(px));
      y = g - r1.dot(g) * r1;
    };
    const LanczosResult lr =
        lanczos_extreme(gram, 2 * n, false, opts.lanczos_tol, opts.lanczos_max_steps, opts.seed);
    gap.lambda2 = std::sqrt(std::max(lr.value, 0.0));
    gap.top_singular = apply_b(r1).norm();
    gap.converged = lr.converged;
  }
  return gap;
}

}  // namespace saddle_raar
