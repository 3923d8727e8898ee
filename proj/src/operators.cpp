#include "saddle_raar/operators.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

#include <fftw3.h>

#include "saddle_raar/kernels.hpp"

namespace saddle_raar {

Magnitudes::Magnitudes(RVec values) : b_(std::move(values)) {
  bool any_positive = false;
  for (Index i = 0; i < b_.size(); ++i) {
    if (!std::isfinite(b_[i]) || b_[i] < 0.0) {
      throw InvalidDataError("magnitudes must be finite and nonnegative (entry " + std::to_string(i) + ")");
    }
    any_positive = any_positive || b_[i] > 0.0;
  }
  if (!any_positive) throw InvalidDataError("magnitudes are identically zero");
  norm_ = b_.norm();
}

bool Magnitudes::strictly_positive() const { return (b_.array() > 0.0).all(); }

namespace detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

// Plans are created with FFTW_UNALIGNED and only ever run through the
// new-array execute interface, which FFTW documents as thread-safe.
struct FftPlan {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  FftPlan(int rows, int cols) {
    std::lock_guard lock(planner_mutex());
    std::vector<Complex> a(static_cast<std::size_t>(rows) * cols), b(a.size());
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    forward = fftw_plan_dft_2d(rows, cols, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward = fftw_plan_dft_2d(rows, cols, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void run(fftw_plan p, std::vector<Complex>& in, std::vector<Complex>& out) const {
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------

CVec MeasurementEnsemble::apply_adjoint(const CVec& x) const {
  require_size(x.size(), n_, "apply_adjoint");
  CVec out(big_n_);
  if (kind_ == EnsembleKind::DenseGaussian) {
    kernels::omp::matvec(adjoint_, as_span(x), as_span(out));
    return out;
  }
  const Index block = padded_.size();
  std::vector<Complex> buf(static_cast<std::size_t>(block)), freq(buf.size());
  for (std::size_t j = 0; j < masks_.size(); ++j) {
    std::fill(buf.begin(), buf.end(), Complex(0.0));
    const CVec& mu = masks_[j];
    for (int r = 0; r < grid_.rows; ++r) {
      for (int c = 0; c < grid_.cols; ++c) {
        const Index i = static_cast<Index>(r) * grid_.cols + c;
        buf[static_cast<std::size_t>(r) * padded_.cols + c] = mu[i] * x[i];
      }
    }
    plan_->run(plan_->forward, buf, freq);
    Complex* dst = out.data() + static_cast<Index>(j) * block;
    for (Index k = 0; k < block; ++k) dst[k] = c0_ * freq[static_cast<std::size_t>(k)];
  }
  return out;
}

CVec MeasurementEnsemble::apply(const CVec& w) const {
  require_size(w.size(), big_n_, "apply");
  CVec out = CVec::Zero(n_);
  if (kind_ == EnsembleKind::DenseGaussian) {
    kernels::omp::adjoint_matvec(adjoint_, as_span(w), as_span(out));
    return out;
  }
  const Index block = padded_.size();
  std::vector<Complex> buf(static_cast<std::size_t>(block)), img(buf.size());
  for (std::size_t j = 0; j < masks_.size(); ++j) {
    const Complex* src = w.data() + static_cast<Index>(j) * block;
    std::copy(src, src + block, buf.begin());
    plan_->run(plan_->backward, buf, img);
    const CVec& mu = masks_[j];
    for (int r = 0; r < grid_.rows; ++r) {
      for (int c = 0; c < grid_.cols; ++c) {
        const Index i = static_cast<Index>(r) * grid_.cols + c;
        out[i] += c0_ * std::conj(mu[i]) * img[static_cast<std::size_t>(r) * padded_.cols + c];
      }
    }
  }
  return out;
}

CVec MeasurementEnsemble::project_range(const CVec& w) const { return apply_adjoint(apply(w)); }

CVec MeasurementEnsemble::project_complement(const CVec& w) const { return w - project_range(w); }

CMat MeasurementEnsemble::materialize_adjoint() const {
  if (kind_ == EnsembleKind::DenseGaussian) return adjoint_;
  CMat m(big_n_, n_);
  CVec e = CVec::Zero(n_);
  for (Index j = 0; j < n_; ++j) {
    e[j] = 1.0;
    m.col(j) = apply_adjoint(e);
    e[j] = 0.0;
  }
  return m;
}

// ---------------------------------------------------------------------------

MeasurementEnsemble build_gaussian_ensemble(Index n, Index N, std::uint64_t seed) {
  if (n < 1 || N < 1) throw DimensionError("ensemble dimensions must be positive");
  if (N < n) {
    throw DimensionError("gaussian ensemble needs N >= n (got n=" + std::to_string(n) + ", N=" +
                         std::to_string(N) + ")");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  // Column j of the N x n draw is row j of A, conjugated.
  CMat draw(N, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < N; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      draw(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<CMat> qr(draw);
  MeasurementEnsemble e;
  e.kind_ = EnsembleKind::DenseGaussian;
  e.n_ = n;
  e.big_n_ = N;
  e.seed_ = seed;
  e.adjoint_ = qr.householderQ() * CMat::Identity(N, n);
  return e;
}

MeasurementEnsemble build_cdp_ensemble(GridShape grid, std::vector<CVec> masks, GridShape padded,
                                       std::uint64_t seed) {
  if (grid.rows < 1 || grid.cols < 1) throw DimensionError("grid must be at least 1x1");
  if (masks.empty()) throw InvalidMaskError("at least one mask is required");
  for (std::size_t j = 0; j < masks.size(); ++j) {
    require_size(masks[j].size(), grid.size(), "mask");
    for (Index i = 0; i < masks[j].size(); ++i) {
      if (std::abs(std::abs(masks[j][i]) - 1.0) > 1e-12) {
        throw InvalidMaskError("mask " + std::to_string(j) + " entry " + std::to_string(i) +
                               " is not unit modulus");
      }
    }
  }
  if (padded.rows < 2 * grid.rows - 1 || padded.cols < 2 * grid.cols - 1) {
    throw AliasingError("padded grid " + std::to_string(padded.rows) + "x" + std::to_string(padded.cols) +
                        " is smaller than the autocorrelation support " + std::to_string(2 * grid.rows - 1) +
                        "x" + std::to_string(2 * grid.cols - 1));
  }

  MeasurementEnsemble e;
  e.kind_ = EnsembleKind::MaskedDft;
  e.grid_ = grid;
  e.padded_ = padded;
  e.n_ = grid.size();
  e.big_n_ = static_cast<Index>(masks.size()) * padded.size();
  e.seed_ = seed;
  e.masks_ = std::move(masks);
  e.plan_ = std::make_shared<detail::FftPlan>(padded.rows, padded.cols);

  // Unnormalized DFT: ||Phi v||^2 = (padded size) ||v||^2, so the stack of l
  // patterns is an isometry after scaling by 1/sqrt(l * padded size).
  e.c0_ = 1.0 / std::sqrt(static_cast<double>(e.masks_.size()) * static_cast<double>(padded.size()));

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  CVec probe(e.n_);
  for (Index i = 0; i < e.n_; ++i) probe[i] = Complex(normal(rng), normal(rng));
  const double ratio = e.apply_adjoint(probe).norm() / probe.norm();
  if (std::abs(ratio - 1.0) > 1e-10) e.c0_ /= ratio;
  return e;
}

std::vector<CVec> default_cdp_masks(GridShape grid, int count, std::uint64_t seed) {
  if (count < 1) throw InvalidMaskError("mask count must be positive");
  std::vector<CVec> masks;
  masks.push_back(CVec::Ones(grid.size()));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int j = 1; j < count; ++j) {
    CVec mu(grid.size());
    for (Index i = 0; i < mu.size(); ++i) mu[i] = std::polar(1.0, angle(rng));
    masks.push_back(std::move(mu));
  }
  return masks;
}

MeasurementEnsemble build_default_cdp(GridShape grid, int mask_count, std::uint64_t seed) {
  return build_cdp_ensemble(grid, default_cdp_masks(grid, mask_count, seed), {2 * grid.rows, 2 * grid.cols},
                            seed);
}

CVec project_torus(const CVec& w, const Magnitudes& b) {
  require_size(b.size(), w.size(), "project_torus");
  CVec out(w.size());
  kernels::omp::project_torus(as_span(w), as_span(b.values()), as_span(out));
  return out;
}

bool on_torus(const CVec& z, const Magnitudes& b, double rtol) {
  if (z.size() != b.size()) return false;
  for (Index i = 0; i < z.size(); ++i) {
    const double err = std::abs(std::abs(z[i]) - b[i]);
    if (b[i] == 0.0 ? z[i] != Complex(0.0) : err > rtol * b[i]) return false;
  }
  return true;
}

CVec unit_phase(const CVec& w) {
  CVec u(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    const double r = std::abs(w[i]);
    u[i] = r > 0.0 ? w[i] / r : Complex(1.0);
  }
  return u;
}

Magnitudes noiseless_magnitudes(const MeasurementEnsemble& e, const CVec& x0) {
  return Magnitudes(e.apply_adjoint(x0).cwiseAbs());
}

int matricized_rank(const CVec& x, GridShape grid, double rel_tol) {
  require_size(x.size(), grid.size(), "matricized_rank");
  CMat img(grid.rows, grid.cols);
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) img(r, c) = x[static_cast<Index>(r) * grid.cols + c];
  Eigen::JacobiSVD<CMat> svd(img);
  const RVec& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++rank;
  return rank;
}

}  // namespace saddle_raar
