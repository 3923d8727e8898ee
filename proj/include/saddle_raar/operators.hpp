#pragma once

// Isometric measurement ensembles A (n x N, A A^* = I) and the maps built
// from them. A_perp is never formed: A_perp^* A_perp w is always w - P w with
// P = A^* A.

#include <cstdint>
#include <memory>
#include <vector>

#include "saddle_raar/types.hpp"

namespace saddle_raar {

enum class EnsembleKind { DenseGaussian, MaskedDft };

struct GridShape {
  int rows = 0;
  int cols = 0;
  Index size() const { return static_cast<Index>(rows) * cols; }
  bool operator==(const GridShape&) const = default;
};

namespace detail {
struct FftPlan;
}

/// Immutable after construction; share freely between threads.
class MeasurementEnsemble {
 public:
  EnsembleKind kind() const { return kind_; }
  /// Object dimension.
  Index n() const { return n_; }
  /// Measurement dimension.
  Index N() const { return big_n_; }
  std::uint64_t seed() const { return seed_; }

  /// A^* x.
  CVec apply_adjoint(const CVec& x) const;
  /// A w.
  CVec apply(const CVec& w) const;
  /// P w = A^* A w.
  CVec project_range(const CVec& w) const;
  /// (I - P) w, i.e. A_perp^* A_perp w.
  CVec project_complement(const CVec& w) const;

  /// Dense A^* (N x n). Applies the operator to unit vectors for the DFT kind.
  CMat materialize_adjoint() const;

  // Dense kind.
  const CMat& adjoint_matrix() const { return adjoint_; }

  // Masked-DFT kind.
  GridShape grid() const { return grid_; }
  GridShape padded() const { return padded_; }
  const std::vector<CVec>& masks() const { return masks_; }
  double c0() const { return c0_; }

 private:
  friend MeasurementEnsemble build_gaussian_ensemble(Index, Index, std::uint64_t);
  friend MeasurementEnsemble build_cdp_ensemble(GridShape, std::vector<CVec>, GridShape, std::uint64_t);

  EnsembleKind kind_ = EnsembleKind::DenseGaussian;
  Index n_ = 0;
  Index big_n_ = 0;
  std::uint64_t seed_ = 0;
  CMat adjoint_;
  GridShape grid_{};
  GridShape padded_{};
  std::vector<CVec> masks_;
  double c0_ = 1.0;
  std::shared_ptr<const detail::FftPlan> plan_;
};

/// A^* from a complex Gaussian n x N draw with orthonormalized rows.
MeasurementEnsemble build_gaussian_ensemble(Index n, Index N, std::uint64_t seed);

/// Stacked zero-padded 2-D DFTs of mask-weighted objects, scaled by c0 so that
/// A A^* = I. `seed` is recorded in the descriptor only; the masks are given.
MeasurementEnsemble build_cdp_ensemble(GridShape grid, std::vector<CVec> masks, GridShape padded,
                                       std::uint64_t seed);

/// The "1 1/2 pattern" default: mask 1 is all ones, the rest are i.i.d.
/// uniform on the unit circle.
std::vector<CVec> default_cdp_masks(GridShape grid, int count, std::uint64_t seed);

/// Convenience: default masks and (2 rows, 2 cols) padding.
MeasurementEnsemble build_default_cdp(GridShape grid, int mask_count, std::uint64_t seed);

inline CVec apply_A_adjoint(const MeasurementEnsemble& e, const CVec& x) { return e.apply_adjoint(x); }
inline CVec apply_A(const MeasurementEnsemble& e, const CVec& w) { return e.apply(w); }
inline CVec project_range(const MeasurementEnsemble& e, const CVec& w) { return e.project_range(w); }

/// [w]_Z = b * w/|w| entrywise, with phase 1 where w_i == 0.
CVec project_torus(const CVec& w, const Magnitudes& b);

/// |z_i| = b_i to relative tolerance (absolute where b_i == 0).
bool on_torus(const CVec& z, const Magnitudes& b, double rtol = 1e-12);

/// Entrywise w / |w| with phase 1 at zeros.
CVec unit_phase(const CVec& w);

/// b = |A^* x0|.
Magnitudes noiseless_magnitudes(const MeasurementEnsemble& e, const CVec& x0);

// --- Phantoms ---

struct PhantomObject {
  CVec x0;
  GridShape grid;
  /// |x0|, the unphased phantom p.
  RVec magnitude;
};

/// Modified Shepp-Logan phantom with zero margins, times i.i.d. uniform phases.
PhantomObject build_rpp(GridShape grid, std::uint64_t seed);

/// The unphased phantom image p (row-major).
RVec shepp_logan(GridShape grid);

/// Random magnitudes in [0.5, 1.5) times uniform phases; for grids too small
/// for the phantom.
PhantomObject build_random_object(GridShape grid, std::uint64_t seed);

/// Numerical rank of the row-major image as a rows x cols matrix.
int matricized_rank(const CVec& x, GridShape grid, double rel_tol = 1e-10);

}  // namespace saddle_raar
