#include "fgforge/grid.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "fgforge/parallel.hpp"

namespace fgforge {
namespace {

// One in-place 1d c2c plan pair per grid size. Plan creation is not thread
// safe, so it is guarded; fftw_execute_dft on private buffers is safe.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex g_plan_mu;

PlanPair plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lk(g_plan_mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
  PlanPair p;
  p.fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(buf);
  cache[n] = p;
  return p;
}

struct Scratch {
  fftw_complex* buf = nullptr;
  int n = 0;
  ~Scratch() {
    if (buf) fftw_free(buf);
  }
  void ensure(int n_) {
    if (n >= n_) return;
    if (buf) fftw_free(buf);
    buf = fftw_alloc_complex(static_cast<std::size_t>(n_));
    n = n_;
  }
};

int signed_mode(int m, int n) {
  return (m <= n / 2) ? m : m - n;
}

}  // namespace

double eval_modes(std::span<const FourierMode> modes, double constant_part,
                  double x1, double x2, double x3) {
  double v = constant_part;
  for (const auto& m : modes) {
    double phase = m.k[0] * x1 + m.k[1] * x2 + m.k[2] * x3;
    v += m.amp_cos * std::cos(phase) + m.amp_sin * std::sin(phase);
  }
  return v;
}

double eval_modes_deriv(std::span<const FourierMode> modes, int axis,
                        double x1, double x2, double x3) {
  double v = 0.0;
  for (const auto& m : modes) {
    double phase = m.k[0] * x1 + m.k[1] * x2 + m.k[2] * x3;
    double ka = m.k[axis - 1];
    v += ka * (-m.amp_cos * std::sin(phase) + m.amp_sin * std::cos(phase));
  }
  return v;
}

ScalarField sample_modes(GridSpec grid, std::span<const FourierMode> modes,
                         double constant_part) {
  ScalarField f(grid);
  int n = grid.n;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i1) {
    double x1 = grid.coord(static_cast<int>(i1));
    for (int i2 = 0; i2 < n; ++i2) {
      double x2 = grid.coord(i2);
      for (int i3 = 0; i3 < n; ++i3) {
        f.at(static_cast<int>(i1), i2, i3) =
            eval_modes(modes, constant_part, x1, x2, grid.coord(i3));
      }
    }
  });
  return f;
}

ScalarField spectral_derivative(const ScalarField& f, int axis) {
  if (axis < 1 || axis > 3) {
    throw ConstraintViolation("spectral_derivative axis must be 1..3");
  }
  const int n = f.grid().n;
  const PlanPair plans = plans_for(n);
  ScalarField out(f.grid());

  // Precomputed ik factors; Nyquist zeroed.
  std::vector<double> kfac(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    int k = signed_mode(m, n);
    if (m == n / 2) k = 0;
    kfac[static_cast<std::size_t>(m)] = static_cast<double>(k);
  }

  // Line-by-line transform along the chosen axis. The two outer loop
  // indices enumerate the lines.
  const std::size_t lines = static_cast<std::size_t>(n) * n;
  std::size_t stride;
  if (axis == 1)
    stride = static_cast<std::size_t>(n) * n;
  else if (axis == 2)
    stride = static_cast<std::size_t>(n);
  else
    stride = 1;

  auto line_base = [&](std::size_t line) -> std::size_t {
    std::size_t a = line / n, b = line % n;
    // (a, b) are the two fixed indices in cyclic order after the axis.
    switch (axis) {
      case 1: return a * static_cast<std::size_t>(n) + b;  // (i2, i3) fixed
      case 2: return a * static_cast<std::size_t>(n) * n + b;  // (i1, i3)
      default:
        return (a * static_cast<std::size_t>(n) + b) * n;  // (i1, i2)
    }
  };

  parallel_ranges(lines, [&](std::size_t lb, std::size_t le) {
    thread_local Scratch scratch;
    scratch.ensure(n);
    fftw_complex* buf = scratch.buf;
    for (std::size_t line = lb; line < le; ++line) {
      const std::size_t base = line_base(line);
      for (int m = 0; m < n; ++m) {
        buf[m][0] = f[base + stride * m];
        buf[m][1] = 0.0;
      }
      fftw_execute_dft(plans.fwd, buf, buf);
      for (int m = 0; m < n; ++m) {
        // multiply by ik: (re, im) -> (-k*im, k*re)
        double re = buf[m][0], im = buf[m][1];
        buf[m][0] = -kfac[m] * im;
        buf[m][1] = kfac[m] * re;
      }
      fftw_execute_dft(plans.bwd, buf, buf);
      const double inv_n = 1.0 / n;
      for (int m = 0; m < n; ++m) {
        out[base + stride * m] = buf[m][0] * inv_n;
      }
    }
  });
  return out;
}

}  // namespace fgforge
