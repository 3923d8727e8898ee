#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "saddle_raar/operators.hpp"

namespace saddle_raar {

namespace {

struct Ellipse {
  double intensity, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan (Toft) table on [-1, 1]^2.
constexpr std::array<Ellipse, 10> kSheppLogan{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
}};

constexpr int kMinPhantomSide = 16;

}  // namespace

RVec shepp_logan(GridShape grid) {
  if (grid.rows < kMinPhantomSide || grid.cols < kMinPhantomSide) {
    throw DimensionError("phantom grid must be at least 16x16");
  }
  const int mr = (grid.rows + 7) / 8;
  const int mc = (grid.cols + 7) / 8;
  const int inner_rows = grid.rows - 2 * mr;
  const int inner_cols = grid.cols - 2 * mc;

  RVec p = RVec::Zero(grid.size());
  for (int r = 0; r < inner_rows; ++r) {
    const double y = 1.0 - (2.0 * r + 1.0) / inner_rows;
    for (int c = 0; c < inner_cols; ++c) {
      const double x = (2.0 * c + 1.0) / inner_cols - 1.0;
      double v = 0.0;
      for (const auto& e : kSheppLogan) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = x - e.x0;
        const double dy = y - e.y0;
        const double xr = dx * std::cos(phi) + dy * std::sin(phi);
        const double yr = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) v += e.intensity;
      }
      p[static_cast<Index>(r + mr) * grid.cols + (c + mc)] = std::max(v, 0.0);
    }
  }
  return p;
}

PhantomObject build_rpp(GridShape grid, std::uint64_t seed) {
  PhantomObject obj;
  obj.grid = grid;
  obj.magnitude = shepp_logan(grid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  obj.x0.resize(grid.size());
  for (Index i = 0; i < grid.size(); ++i) obj.x0[i] = std::polar(obj.magnitude[i], angle(rng));
  return obj;
}

PhantomObject build_random_object(GridShape grid, std::uint64_t seed) {
  if (grid.rows < 1 || grid.cols < 1) throw DimensionError("grid must be at least 1x1");
  PhantomObject obj;
  obj.grid = grid;
  obj.magnitude.resize(grid.size());
  obj.x0.resize(grid.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (Index i = 0; i < grid.size(); ++i) {
    obj.magnitude[i] = mag(rng);
    obj.x0[i] = std::polar(obj.magnitude[i], angle(rng));
  }
  return obj;
}

}  // namespace saddle_raar
