#pragma once

#include <vector>

#include "fgforge/geometry.hpp"

namespace fgforge {

// Hyperbolic cusp over the flat torus: g_t = delta at every order. Exactly
// Einstein, so every residual coefficient vanishes.
BulkMetric cusp_metric(GridSpec grid);

// Cone over the flat torus: g_t = (1 - t^2/4)^2 delta, an exact polynomial.
// Not Einstein, but its sectional curvatures have the closed form
// K(radial, i) = -1 and K(i, j) = -coth(r)^2 with
// coth(r) = (1 + t^2/4) / (1 - t^2/4), which pins the curvature evaluation
// at finite t. Stored zeros out to pad_order let series inverses carry
// enough tail for evaluation away from t = 0.
BulkMetric cone_metric(GridSpec grid, int pad_order = 32);

// One-dimensional Taylor profile of the planar black brane
//   g = dr^2/V + V dx1^2 + r^2 (dx2^2 + dx3^2),  V = r^2 - 2m/r,
// rewritten in the geodesic compactification g = t^{-2}(dt^2 + g_t). The
// coefficients are spatially constant, so the profile is an independent
// oracle for the order-by-order solver: g11[k] and gperp[k] hold the
// t^k-coefficients of the two distinct diagonal entries of g_t.
// ode_residual_sup reports how well V satisfies the two Einstein ordinary
// differential equations -V''/2 - V'/r = -3 and -V'/r - V/r^2 = -3 at
// sampled radii (analytically exact).
struct AdsSchwarzschildOracle {
  double m = 0.0;
  int order = 0;
  std::vector<double> g11;
  std::vector<double> gperp;
  double ode_residual_sup = 0.0;
};

AdsSchwarzschildOracle ads_schwarzschild_profile(double m, int order);

// The oracle profile sampled as a (spatially constant) bulk metric.
BulkMetric ads_schwarzschild_metric(GridSpec grid, double m, int order);

// Third-order coefficient of the profile as boundary data for the solver.
SymForm ads_schwarzschild_sigma(GridSpec grid, double m);

}  // namespace fgforge
