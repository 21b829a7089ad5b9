// Shared builders for the test suite: deterministic random band-limited
// fields and metrics, and cross-resolution comparison helpers.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fgforge/grid.hpp"
#include "fgforge/rng.hpp"
#include "fgforge/series.hpp"
#include "fgforge/sym.hpp"

namespace fgforge::testutil {

// Mode lists are resolution-independent, so the same list can be sampled
// on grids of different size when a test compares resolutions.
inline std::vector<FourierMode> random_modes(Rng& rng, int kmax, double amp,
                                             int count) {
  std::vector<FourierMode> modes;
  modes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    FourierMode m;
    m.k = {rng.uniform_int(-kmax, kmax), rng.uniform_int(-kmax, kmax),
           rng.uniform_int(-kmax, kmax)};
    m.amp_cos = amp * rng.sym();
    m.amp_sin = amp * rng.sym();
    modes.push_back(m);
  }
  return modes;
}

inline ScalarField random_field(GridSpec grid, Rng& rng, int kmax, double amp,
                                int count = 4) {
  return sample_modes(grid, random_modes(rng, kmax, amp, count), 0.0);
}

// delta plus a band-limited perturbation small enough to stay positive
// definite.
inline SymForm random_metric(GridSpec grid, Rng& rng, int kmax, double amp,
                             int modes_per_component = 3) {
  SymForm g = SymForm::delta(grid);
  for (int c = 0; c < 6; ++c) {
    g.c[static_cast<std::size_t>(c)] +=
        random_field(grid, rng, kmax, amp, modes_per_component);
  }
  return g;
}

// Sup difference over the points the coarse grid shares with the fine one.
inline double common_point_diff(const ScalarField& coarse,
                                const ScalarField& fine) {
  const int n = coarse.grid().n;
  const int r = fine.grid().n / n;
  double m = 0.0;
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i3 = 0; i3 < n; ++i3) {
        m = std::max(m, std::abs(coarse.at(i1, i2, i3) -
                                 fine.at(r * i1, r * i2, r * i3)));
      }
    }
  }
  return m;
}

inline double common_point_diff(const SymForm& coarse, const SymForm& fine) {
  double m = 0.0;
  for (int c = 0; c < 6; ++c) {
    m = std::max(m, common_point_diff(coarse.c[static_cast<std::size_t>(c)],
                                      fine.c[static_cast<std::size_t>(c)]));
  }
  return m;
}

}  // namespace fgforge::testutil
