#include "fgforge/references.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "fgforge/errors.hpp"

namespace fgforge {

namespace {

// Dense univariate Taylor polynomials, poly[k] = coefficient of t^k. All
// operations truncate at degree n.
using Poly1 = std::vector<double>;

Poly1 pmul(const Poly1& a, const Poly1& b, int n) {
  Poly1 out(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i <= n && i < static_cast<int>(a.size()); ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; i + j <= n && j < static_cast<int>(b.size()); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

Poly1 precip(const Poly1& a, int n) {
  Poly1 out(static_cast<std::size_t>(n) + 1, 0.0);
  out[0] = 1.0 / a[0];
  for (int k = 1; k <= n; ++k) {
    double acc = 0.0;
    for (int i = 1; i <= k && i < static_cast<int>(a.size()); ++i) {
      acc += a[i] * out[k - i];
    }
    out[k] = -acc / a[0];
  }
  return out;
}

// a(w(t)) truncated at t^n; requires w[0] == 0.
Poly1 pcompose(const Poly1& a, const Poly1& w, int n) {
  Poly1 out(static_cast<std::size_t>(n) + 1, 0.0);
  if (!a.empty()) out[0] = a[0];
  Poly1 wpow(static_cast<std::size_t>(n) + 1, 0.0);
  wpow[0] = 1.0;
  for (int i = 1; i < static_cast<int>(a.size()) && i <= n; ++i) {
    wpow = pmul(wpow, w, n);
    if (a[i] == 0.0) continue;
    for (int k = 0; k <= n; ++k) out[k] += a[i] * wpow[k];
  }
  return out;
}

// exp(s) with s[0] == 0 via the derivative recurrence k e_k = sum i s_i e_{k-i}.
Poly1 pexp(const Poly1& s, int n) {
  Poly1 out(static_cast<std::size_t>(n) + 1, 0.0);
  out[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double acc = 0.0;
    for (int i = 1; i <= k && i < static_cast<int>(s.size()); ++i) {
      acc += static_cast<double>(i) * s[i] * out[k - i];
    }
    out[k] = acc / static_cast<double>(k);
  }
  return out;
}

}  // namespace

BulkMetric cusp_metric(GridSpec grid) {
  BulkMetric bm;
  bm.eps = +1;
  bm.g = Series<SymForm>::monomial(SymForm::delta(grid), 0);
  return bm;
}

BulkMetric cone_metric(GridSpec grid, int pad_order) {
  if (pad_order < 4) {
    throw ConstraintViolation("cone pad_order must be at least 4");
  }
  Series<SymForm> g(SymForm(grid), 0, pad_order + 1, kExactCeil);
  g.stored_mut(0) = SymForm::delta(grid);
  SymForm d2 = SymForm::delta(grid);
  d2 *= -0.5;
  g.stored_mut(2) = d2;
  SymForm d4 = SymForm::delta(grid);
  d4 *= 1.0 / 16.0;
  g.stored_mut(4) = d4;
  BulkMetric bm;
  bm.eps = +1;
  bm.g = std::move(g);
  return bm;
}

AdsSchwarzschildOracle ads_schwarzschild_profile(double m, int order) {
  if (order < 0) {
    throw ConstraintViolation("profile order must be nonnegative");
  }
  const int n = order;
  AdsSchwarzschildOracle out;
  out.m = m;
  out.order = n;

  // The geodesic radial coordinate satisfies dt/t = dw / (w sqrt(1 - 2m w^3))
  // in terms of w = 1/r, so log(t/w) is the integral of the (1-u)^{-1/2}
  // binomial series with u = 2m w^3:
  //   t = w * exp( sum_j c_j (2m)^j w^{3j} / (3j) ),  c_j = c_{j-1} (2j-1)/(2j).
  // Everything before the final division by t is carried one order past n,
  // because the t^n coefficient of w/t is the t^(n+1) coefficient of w.
  const int nw = n + 1;
  Poly1 s(static_cast<std::size_t>(nw) + 1, 0.0);
  double c = 1.0;
  double p = 1.0;
  for (int j = 1; 3 * j <= nw; ++j) {
    c *= (2.0 * j - 1.0) / (2.0 * j);
    p *= 2.0 * m;
    s[3 * j] = c * p / (3.0 * j);
  }
  const Poly1 e = pexp(s, nw);

  // Invert t = w e(w) by fixed-point iteration w <- t / e(w); each pass is
  // correct to at least one more order, so nw+1 passes settle all of them.
  Poly1 w(static_cast<std::size_t>(nw) + 1, 0.0);
  w[1] = 1.0;
  for (int it = 0; it <= nw; ++it) {
    const Poly1 ew = pcompose(e, w, nw);
    const Poly1 r = precip(ew, nw);
    Poly1 next(static_cast<std::size_t>(nw) + 1, 0.0);
    for (int k = 0; k + 1 <= nw; ++k) next[k + 1] = r[k];
    w = next;
  }

  // g_t = diag( (t/w)^2 - 2m w t^2, (t/w)^2, (t/w)^2 ).
  Poly1 f(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 0; k + 1 <= nw; ++k) f[k] = w[k + 1];
  const Poly1 g = precip(f, n);
  const Poly1 g2 = pmul(g, g, n);
  out.gperp = g2;
  out.g11 = g2;
  for (int k = 2; k <= n; ++k) out.g11[k] -= 2.0 * m * w[k - 2];

  double sup = 0.0;
  for (double r : {1.5, 2.0, 3.0, 5.0}) {
    const double v = r * r - 2.0 * m / r;
    const double vp = 2.0 * r + 2.0 * m / (r * r);
    const double vpp = 2.0 - 4.0 * m / (r * r * r);
    sup = std::max(sup, std::fabs(-0.5 * vpp - vp / r + 3.0));
    sup = std::max(sup, std::fabs(-vp / r - v / (r * r) + 3.0));
  }
  out.ode_residual_sup = sup;
  return out;
}

BulkMetric ads_schwarzschild_metric(GridSpec grid, double m, int order) {
  const AdsSchwarzschildOracle prof = ads_schwarzschild_profile(m, order);
  Series<SymForm> g(SymForm(grid), 0, order + 1, order);
  for (int k = 0; k <= order; ++k) {
    SymForm& coeff = g.stored_mut(k);
    coeff.comp(0, 0) = ScalarField::constant(grid, prof.g11[k]);
    coeff.comp(1, 1) = ScalarField::constant(grid, prof.gperp[k]);
    coeff.comp(2, 2) = ScalarField::constant(grid, prof.gperp[k]);
  }
  BulkMetric bm;
  bm.eps = +1;
  bm.g = std::move(g);
  return bm;
}

SymForm ads_schwarzschild_sigma(GridSpec grid, double m) {
  SymForm s(grid);
  s.comp(0, 0) = ScalarField::constant(grid, -4.0 * m / 3.0);
  s.comp(1, 1) = ScalarField::constant(grid, 2.0 * m / 3.0);
  s.comp(2, 2) = ScalarField::constant(grid, 2.0 * m / 3.0);
  return s;
}

}  // namespace fgforge
