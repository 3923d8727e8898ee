// Serial reference kernels vs their OpenMP versions, and a trial sweep run
// on one worker vs all workers. `--quick` shrinks everything to a smoke run.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <omp.h>

#include "saddle_raar/experiments.hpp"
#include "saddle_raar/kernels.hpp"

using namespace saddle_raar;

namespace {

double time_ms(int reps, const std::function<void()>& f) {
  f();
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / reps;
}

CVec random_cvec(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVec v(n);
  for (Index i = 0; i < n; ++i) v[i] = Complex(g(rng), g(rng));
  return v;
}

void row(const char* name, Index size, double serial_ms, double omp_ms, double max_diff) {
  std::printf("%-16s %10ld %12.4f %12.4f %8.2fx %10.1e\n", name, static_cast<long>(size), serial_ms, omp_ms,
              omp_ms > 0.0 ? serial_ms / omp_ms : 0.0, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const std::vector<Index> sizes = quick ? std::vector<Index>{1 << 12, 1 << 14} : std::vector<Index>{1 << 14, 1 << 17, 1 << 20};
  const int reps = quick ? 3 : 50;
  std::mt19937_64 rng(42);

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-16s %10s %12s %12s %9s %10s\n", "kernel", "size", "serial_ms", "omp_ms", "speedup", "max_diff");
  bool agree = true;
  for (Index n : sizes) {
    const CVec w = random_cvec(n, rng), t = random_cvec(n, rng), p = random_cvec(n, rng);
    const RVec b = w.cwiseAbs() + RVec::Ones(n);
    CVec o1(n), o2(n);

    const double s1 = time_ms(reps, [&] { kernels::serial::project_torus(as_span(w), as_span(b), as_span(o1)); });
    const double m1 = time_ms(reps, [&] { kernels::omp::project_torus(as_span(w), as_span(b), as_span(o2)); });
    double d = (o1 - o2).cwiseAbs().maxCoeff();
    agree = agree && d == 0.0;
    row("project_torus", n, s1, m1, d);

    const double s2 = time_ms(reps, [&] { kernels::serial::raar_combine(0.9, as_span(w), as_span(t), as_span(p), as_span(o1)); });
    const double m2 = time_ms(reps, [&] { kernels::omp::raar_combine(0.9, as_span(w), as_span(t), as_span(p), as_span(o2)); });
    d = (o1 - o2).cwiseAbs().maxCoeff();
    agree = agree && d == 0.0;
    row("raar_combine", n, s2, m2, d);

    double r1 = 0.0, r2 = 0.0;
    const double s3 = time_ms(reps, [&] { r1 = kernels::serial::real_dot(as_span(w), as_span(t)); });
    const double m3 = time_ms(reps, [&] { r2 = kernels::omp::real_dot(as_span(w), as_span(t)); });
    d = std::abs(r1 - r2) / std::max(std::abs(r1), 1.0);
    agree = agree && d < 1e-10;
    row("real_dot", n, s3, m3, d);
  }

  {
    const Index rows = quick ? 256 : 2048, cols = rows / 4;
    const CMat m = CMat::Random(rows, cols);
    const CVec x = random_cvec(cols, rng);
    CVec o1(rows), o2(rows);
    const double s = time_ms(reps, [&] { kernels::serial::matvec(m, as_span(x), as_span(o1)); });
    const double o = time_ms(reps, [&] { kernels::omp::matvec(m, as_span(x), as_span(o2)); });
    const double d = (o1 - o2).cwiseAbs().maxCoeff();
    agree = agree && d < 1e-10;
    row("matvec", rows * cols, s, o, d);
  }

  {
    SweepOptions so;
    so.n = quick ? 16 : 100;
    so.trials = quick ? 4 : 16;
    so.max_iters = quick ? 200 : 2000;
    auto timed = [&](int threads, SweepResult& out) {
      so.threads = threads;
      const auto t0 = std::chrono::steady_clock::now();
      out = gaussian_success_sweep(so);
      return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    };
    SweepResult a, b;
    const double s = timed(1, a);
    const double o = timed(trial_threads(), b);
    bool same = a.trials.size() == b.trials.size();
    for (std::size_t i = 0; same && i < a.trials.size(); ++i) same = a.trials[i].aligned_error == b.trials[i].aligned_error;
    agree = agree && same;
    row("sweep_trials", so.trials, s, o, same ? 0.0 : 1.0);
  }

  std::printf("serial and parallel results %s\n", agree ? "agree" : "DIFFER");
  return agree ? 0 : 1;
}
