#include "saddle_raar/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

namespace saddle_raar {

LanczosResult lanczos_extreme(const SymmetricOperator& op, Index dim, bool smallest, double tol, int max_steps,
                              std::uint64_t seed) {
  LanczosResult res;
  if (dim <= 0) return res;
  const int m_max = static_cast<int>(std::min<Index>(max_steps, dim));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RVec q(dim);
  for (Index i = 0; i < dim; ++i) q[i] = normal(rng);
  q.normalize();

  RMat basis(dim, m_max);
  std::vector<double> alpha, beta;
  RVec w(dim);

  auto ritz = [&](int m, double& value, RVec& coeffs) {
    RVec diag(m), sub(std::max(m - 1, 0));
    for (int i = 0; i < m; ++i) diag[i] = alpha[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < m; ++i) sub[i] = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<RMat> es;
    es.computeFromTridiagonal(diag, sub);
    const Index pick = smallest ? 0 : m - 1;
    value = es.eigenvalues()[pick];
    coeffs = es.eigenvectors().col(pick);
  };

  for (int j = 0; j < m_max; ++j) {
    basis.col(j) = q;
    op(q, w);
    const double a = q.dot(w);
    alpha.push_back(a);
    // Full reorthogonalization, applied twice.
    for (int pass = 0; pass < 2; ++pass) {
      const RVec h = basis.leftCols(j + 1).transpose() * w;
      w -= basis.leftCols(j + 1) * h;
    }
    const double bnorm = w.norm();
    const int m = j + 1;

    const bool last = (m == m_max) || bnorm < 1e-14;
    if (m % 10 != 0 && !last) {
      beta.push_back(bnorm);
      q = w / bnorm;
      continue;
    }
    double value = 0.0;
    RVec coeffs;
    ritz(m, value, coeffs);
    // Ritz residual estimate |beta_m * s_m|; confirmed below with a true product.
    const double estimate = std::abs(bnorm * coeffs[m - 1]);
    if (estimate <= tol * 0.5 || last) {
      RVec v = basis.leftCols(m) * coeffs;
      v.normalize();
      RVec ov(dim);
      op(v, ov);
      res.value = v.dot(ov);
      res.residual = (ov - res.value * v).norm();
      res.vector = std::move(v);
      res.steps = m;
      res.converged = res.residual <= tol;
      if (res.converged || last) return res;
    }
    beta.push_back(bnorm);
    q = w / bnorm;
  }
  return res;
}

}  // namespace saddle_raar
