#pragma once

#include <vector>

#include "fgforge/geometry.hpp"

namespace fgforge {

// Result of rewriting a compactified metric in the normal form
// dt_hat^2 + g_(t_hat) of its geodesic defining function.
struct RegaugeResult {
  // t_hat = t * omega.
  Series<ScalarField> omega;
  // Tangential metric coefficients in the t_hat gauge.
  Series<SymForm> tangential;
  // Per-order sup norms of |d t_hat|^2 - 1 in the rescaled compactification
  // (independent check of the order-by-order solve), orders 0..K.
  std::vector<double> eikonal_residual;
  // Worst violation of the flowed normal form: the metric evaluated on the
  // flow velocity should be exactly dt_hat^2 (no cross terms).
  double normal_form_sup = 0.0;
};

// General path: ghat is a regular compactified metric (ghat_00(0) = 1,
// ghat_0i(0) = 0) of the AH metric t^{-2} ghat. Computes the geodesic
// defining function t_hat = t * omega for the boundary representative
// ghat|_{t=0} and re-expands the metric in t_hat-normal coordinates.
// Every component of ghat must be trusted through `order` (exact inputs
// need stored coefficients through `order`; pad with zeros).
RegaugeResult regauge_metric(const Metric4Series& ghat, int order);

// Compactification u^2 (dt^2 + g_t) of the product-gauge AH metric
// t^{-2}(dt^2 + g_t), where u is a regular series with u(0) = 1 (same
// boundary representative). Solves for the geodesic defining function of
// the underlying AH metric and re-expands; with u = 1 the input is already
// in normal form and the output equals it. order < 0 derives the working
// order from the trusted ceiling of g_t (which must then be finite).
RegaugeResult geodesic_normalize(const Series<SymForm>& g_t,
                                 const Series<ScalarField>& u,
                                 int order = -1);

}  // namespace fgforge
