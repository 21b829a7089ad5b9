#include "fgforge/normalize.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fgforge/errors.hpp"

namespace fgforge {

namespace {

SF dx(const SF& f, int axis) {
  SF out = f;
  for (int k = f.floor(); k <= f.stored_top(); ++k) {
    out.stored_mut(k) = spectral_derivative(f.stored(k), axis);
  }
  return out;
}

ScalarField pmul(const ScalarField& a, const ScalarField& b) {
  ScalarField out(a.grid());
  out.madd(a, b);
  return out;
}

// Pads the stored range with zeros up to order `top` (trust unchanged).
SF pad_stored(const SF& a, int top) {
  if (a.stored_top() >= top) return a;
  SF out(ScalarField(a.proto().grid()), a.floor(), top - a.floor() + 1,
         a.trusted_ceil());
  for (int k = a.floor(); k <= a.stored_top(); ++k) {
    out.stored_mut(k) = a.stored(k);
  }
  return out;
}

// Reciprocal of a series whose order-0 coefficient is the constant 1
// (checked by the callers), stored through `upto`.
SF recip_unit(const SF& a, int upto) {
  const GridSpec grid = a.proto().grid();
  const bool exact_const =
      a.trusted_ceil() == kExactCeil && a.stored_top() == 0;
  const int ceil = exact_const ? kExactCeil
                               : std::min(a.trusted_ceil(), upto);
  const int top = std::min(upto, exact_const ? upto : ceil);
  SF out(ScalarField(grid), 0, top + 1, ceil);
  out.stored_mut(0) = ScalarField::constant(grid, 1.0);
  for (int k = 1; k <= top; ++k) {
    ScalarField acc(grid);
    for (int i = 1; i <= std::min(k, a.stored_top()); ++i) {
      acc.madd(a.at(i), out.stored(k - i));
    }
    acc.scale(-1.0);
    out.stored_mut(k) = std::move(acc);
  }
  return out;
}

// exp of a series with zero order-0 coefficient, via k e_k = sum i s_i e_{k-i}.
SF series_exp(const SF& s, int upto) {
  const GridSpec grid = s.proto().grid();
  const int ceil = std::min(s.trusted_ceil(), upto);
  SF out(ScalarField(grid), 0, upto + 1, ceil);
  out.stored_mut(0) = ScalarField::constant(grid, 1.0);
  for (int k = 1; k <= upto; ++k) {
    ScalarField acc(grid);
    for (int i = 1; i <= std::min(k, s.stored_top()); ++i) {
      ScalarField prod = pmul(s.at(i), out.stored(k - i));
      acc.add_scaled(static_cast<double>(i) / static_cast<double>(k), prod);
    }
    out.stored_mut(k) = std::move(acc);
  }
  return out;
}

std::array<SF, 4> gradient4(const SF& f) {
  return {tderiv(f), dx(f, 1), dx(f, 2), dx(f, 3)};
}

// <df, dh> with respect to the inverse metric components.
SF inv_pairing(const std::array<SF, 10>& ginv, const std::array<SF, 4>& df,
               const std::array<SF, 4>& dh) {
  SF acc = mul(ginv[sym4_index(0, 0)], mul(df[0], dh[0]));
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      if (mu == 0 && nu == 0) continue;
      acc += mul(ginv[sym4_index(mu, nu)], mul(df[mu], dh[nu]));
    }
  }
  return acc;
}

// Solves 2<grad rho, d psi> + rho |d psi|^2 = rho^{-1}(1 - |d rho|^2), all
// in the metric gh, order by order for psi with psi = O(t). Then
// t_hat = rho * exp(psi) has unit gradient in the compactification
// (t_hat/t)^2 * t^{-2} gh.
SF solve_log_factor(const Metric4Series& gh, const SF& rho, int order) {
  const GridSpec grid = gh.grid;
  const std::array<SF, 4> drho = gradient4(rho);

  const SF lead = inv_pairing(gh.ginv, drho, drho);
  SF norm_defect = SF::monomial(ScalarField::constant(grid, 1.0), 0);
  norm_defect -= lead;
  if (norm_defect.at(0).sup_norm() > 1e-9) {
    throw ConstraintViolation(
        "defining function does not have unit boundary gradient");
  }
  // The linear solve below divides by the order-0 factor of
  // 2 <grad rho, d psi>, which must be the constant 1.
  SF lin0 = mul(gh.ginv[sym4_index(0, 0)], drho[0]);
  for (int i = 1; i <= 3; ++i) {
    lin0 += mul(gh.ginv[sym4_index(0, i)], drho[i]);
  }
  if (sup_diff(lin0.at(0), ScalarField::constant(grid, 1.0)) > 1e-9) {
    throw ConstraintViolation(
        "compactification has non-unit leading normal factor");
  }

  // rhs = (1 - |d rho|^2) / rho, a regular series since the defect is O(t).
  const int dtop = norm_defect.stored_top();
  SF defect_shift(ScalarField(grid), 0, std::max(dtop, 1),
                  norm_defect.trusted_ceil() - 1);
  for (int k = 1; k <= dtop; ++k) {
    defect_shift.stored_mut(k - 1) = norm_defect.stored(k);
  }
  const SF rhs = mul(defect_shift, recip_unit(tshift(rho, -1), order));

  SF psi(ScalarField(grid), 1, order, order);
  for (int m = 1; m <= order; ++m) {
    const std::array<SF, 4> dpsi = gradient4(psi);
    SF resid = inv_pairing(gh.ginv, drho, dpsi);
    resid *= 2.0;
    resid += mul(rho, inv_pairing(gh.ginv, dpsi, dpsi));
    resid -= rhs;
    psi.stored_mut(m).add_scaled(-1.0 / (2.0 * m), resid.at(m - 1));
  }
  return psi;
}

// Multi-index derivative tables for composing a t-series of fields with the
// flow map (tau, x + xi): F(tau, x + xi) = sum_{k,a} d^a F_k / a! tau^k xi^a.
struct ComposeTable {
  std::vector<std::array<int, 3>> alphas;
  // entry per (k, alpha) pair enumerated by flat index lists below
  std::vector<std::vector<ScalarField>> deriv;  // deriv[k][alpha_index]
};

// Ordered by total degree so that per-order tables can stop at a prefix.
std::vector<std::array<int, 3>> enumerate_alphas(int max_abs) {
  std::vector<std::array<int, 3>> out;
  for (int abs = 0; abs <= max_abs; ++abs) {
    for (int a1 = 0; a1 <= abs; ++a1) {
      for (int a2 = 0; a1 + a2 <= abs; ++a2) {
        out.push_back({a1, a2, abs - a1 - a2});
      }
    }
  }
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

ComposeTable build_table(const SF& f, int order,
                         const std::vector<std::array<int, 3>>& alphas) {
  ComposeTable tab;
  tab.alphas = alphas;
  tab.deriv.resize(order + 1);
  const int ftop = std::min(order, std::min(f.trusted_ceil(), kExactCeil));
  for (int k = 0; k <= order; ++k) {
    tab.deriv[k].reserve(alphas.size());
    for (const auto& a : alphas) {
      const int abs_a = a[0] + a[1] + a[2];
      if (k + 2 * abs_a > order) break;
      ScalarField d = (k <= ftop) ? f.at(k)
                                  : ScalarField(f.proto().grid());
      for (int ax = 0; ax < 3; ++ax) {
        for (int rep = 0; rep < a[ax]; ++rep) {
          d = spectral_derivative(d, ax + 1);
        }
      }
      d.scale(1.0 / (factorial(a[0]) * factorial(a[1]) * factorial(a[2])));
      tab.deriv[k].push_back(std::move(d));
    }
  }
  return tab;
}

// Powers of tau and the xi monomials for the current flow iterate, all
// truncated at `order` with that trusted ceiling.
struct FlowMonomials {
  std::vector<SF> taupow;
  std::vector<SF> xialpha;  // aligned with the alpha enumeration
};

FlowMonomials build_monomials(const SF& tau, const std::array<SF, 3>& xi,
                              int order,
                              const std::vector<std::array<int, 3>>& alphas) {
  const GridSpec grid = tau.proto().grid();
  FlowMonomials m;
  m.taupow.reserve(order + 1);
  m.taupow.push_back(SF::monomial(ScalarField::constant(grid, 1.0), 0, order));
  for (int k = 1; k <= order; ++k) {
    m.taupow.push_back(truncate(mul(m.taupow.back(), tau), order));
  }
  std::array<std::vector<SF>, 3> xp;
  for (int ax = 0; ax < 3; ++ax) {
    xp[ax].push_back(m.taupow[0]);
    for (int p = 1; 2 * p <= order; ++p) {
      xp[ax].push_back(truncate(mul(xp[ax].back(), xi[ax]), order));
    }
  }
  m.xialpha.reserve(alphas.size());
  for (const auto& a : alphas) {
    if (2 * (a[0] + a[1] + a[2]) > order) {
      m.xialpha.push_back(m.taupow[0]);
      continue;
    }
    SF v = xp[0][a[0]];
    if (a[1] > 0) v = truncate(mul(v, xp[1][a[1]]), order);
    if (a[2] > 0) v = truncate(mul(v, xp[2][a[2]]), order);
    m.xialpha.push_back(std::move(v));
  }
  return m;
}

SF compose(const ComposeTable& tab, const FlowMonomials& mono, int order,
           GridSpec grid) {
  SF out(ScalarField(grid), 0, order + 1, order);
  for (int k = 0; k <= order; ++k) {
    for (std::size_t ai = 0; ai < tab.deriv[k].size(); ++ai) {
      const auto& a = tab.alphas[ai];
      const int abs_a = a[0] + a[1] + a[2];
      const ScalarField& coeff = tab.deriv[k][ai];
      if (coeff.sup_norm() == 0.0) continue;
      SF term = (abs_a == 0)
                    ? mono.taupow[k]
                    : truncate(mul(mono.taupow[k], mono.xialpha[ai]), order);
      for (int j = std::max(term.floor(), 0); j <= term.stored_top(); ++j) {
        if (j > order) break;
        out.stored_mut(j).madd(coeff, term.stored(j));
      }
    }
  }
  return out;
}

// Series integration from 0: (integ S)_{j+1} = S_j / (j + 1).
SF integ(const SF& s, int order) {
  const GridSpec grid = s.proto().grid();
  SF out(ScalarField(grid), 1, order, order);
  for (int j = 0; j < order; ++j) {
    if (j > std::min(s.trusted_ceil(), s.stored_top())) break;
    out.stored_mut(j + 1).add_scaled(1.0 / (j + 1), s.at(j));
  }
  return out;
}

RegaugeResult normalize_core(const Metric4Series& ghat, const SF& rho_over_t,
                             int order) {
  const GridSpec grid = ghat.grid;
  for (int idx = 0; idx < 10; ++idx) {
    if (ghat.g[idx].trusted_ceil() < order ||
        ghat.ginv[idx].trusted_ceil() < order) {
      throw ConstraintViolation("regauge order exceeds trusted input order");
    }
  }
  if (rho_over_t.trusted_ceil() < order) {
    throw ConstraintViolation("regauge order exceeds trusted input order");
  }

  const SF rho = tshift(pad_stored(rho_over_t, order), 1);
  const SF psi = solve_log_factor(ghat, rho, order);
  const SF omega_hat = series_exp(psi, order);

  RegaugeResult out;
  out.omega = truncate(mul(rho_over_t, omega_hat), order);

  // Rescaled compactification exp(2 psi) ghat, in which t_hat is geodesic.
  const SF conf = truncate(mul(omega_hat, omega_hat), order);
  std::array<SF, 10> comps;
  for (int idx = 0; idx < 10; ++idx) {
    comps[idx] = pad_stored(truncate(mul(conf, ghat.g[idx]), order), order);
  }
  const Metric4Series ggeo = make_metric4(std::move(comps), grid);

  const SF that = tshift(out.omega, 1);
  const std::array<SF, 4> dthat = gradient4(that);

  // Independent eikonal check of |d t_hat|^2 - 1 in ggeo.
  SF eik = inv_pairing(ggeo.ginv, dthat, dthat);
  eik -= SF::monomial(ScalarField::constant(grid, 1.0), 0);
  out.eikonal_residual.resize(order + 1, 0.0);
  for (int k = 0; k <= std::min(order, eik.trusted_ceil()); ++k) {
    out.eikonal_residual[k] = eik.at(k).sup_norm();
  }

  // Flow velocity grad t_hat in ggeo, expressed in the old coordinates.
  std::array<SF, 4> vel;
  for (int mu = 0; mu < 4; ++mu) {
    vel[mu] = mul(ggeo.ginv[sym4_index(mu, 0)], dthat[0]);
    for (int nu = 1; nu < 4; ++nu) {
      vel[mu] += mul(ggeo.ginv[sym4_index(mu, nu)], dthat[nu]);
    }
    vel[mu] = truncate(vel[mu], order);
  }

  const auto alphas = enumerate_alphas(order / 2);
  std::array<ComposeTable, 4> vtab;
  for (int mu = 0; mu < 4; ++mu) {
    vtab[mu] = build_table(vel[mu], order, alphas);
  }

  // Picard iteration for the flow map (tau(that,x), x + xi(that,x)).
  SF tau(ScalarField(grid), 1, order, order);
  tau.stored_mut(1) = ScalarField::constant(grid, 1.0);
  std::array<SF, 3> xi = {SF(ScalarField(grid), 1, order, order),
                          SF(ScalarField(grid), 1, order, order),
                          SF(ScalarField(grid), 1, order, order)};
  for (int it = 0; it <= order + 1; ++it) {
    const FlowMonomials mono = build_monomials(tau, xi, order, alphas);
    SF tau_next = integ(compose(vtab[0], mono, order, grid), order);
    std::array<SF, 3> xi_next;
    for (int i = 0; i < 3; ++i) {
      xi_next[i] = integ(compose(vtab[i + 1], mono, order, grid), order);
    }
    tau = std::move(tau_next);
    xi = std::move(xi_next);
  }

  // Metric components along the flow, and the coordinate differentials.
  const FlowMonomials mono = build_monomials(tau, xi, order, alphas);
  std::array<SF, 10> gx;
  for (int idx = 0; idx < 10; ++idx) {
    gx[idx] = compose(build_table(ggeo.g[idx], order, alphas), mono, order,
                      grid);
  }
  // dX[mu][i]: derivative of X^mu with respect to the new spatial
  // coordinate x_i (identity part included).
  std::array<std::array<SF, 3>, 4> dX;
  for (int i = 0; i < 3; ++i) {
    dX[0][i] = dx(tau, i + 1);
    for (int m = 0; m < 3; ++m) {
      dX[m + 1][i] = dx(xi[m], i + 1);
      if (m == i) {
        dX[m + 1][i] += SF::monomial(ScalarField::constant(grid, 1.0), 0,
                                     order);
      }
    }
  }

  Series<SymForm> tang(SymForm(grid), 0, order + 1, order);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      SF acc(ScalarField(grid), 0, 1, order);
      for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu) {
          acc += truncate(
              mul(gx[sym4_index(mu, nu)], mul(dX[mu][i], dX[nu][j])), order);
        }
      }
      for (int k = 0; k <= std::min(order, acc.stored_top()); ++k) {
        tang.stored_mut(k).comp(i, j) = acc.at(k);
      }
    }
  }
  out.tangential = std::move(tang);

  // Normal-form diagnostics: g(dX/dthat, dX/dthat) = 1 and
  // g(dX/dthat, dX/dx_i) = 0 for the flowed coordinates.
  std::array<SF, 4> xdot;
  xdot[0] = tderiv(tau);
  for (int m = 0; m < 3; ++m) xdot[m + 1] = tderiv(xi[m]);
  SF n00(ScalarField(grid), 0, 1, order);
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      n00 += truncate(mul(gx[sym4_index(mu, nu)], mul(xdot[mu], xdot[nu])),
                      order);
    }
  }
  n00 -= SF::monomial(ScalarField::constant(grid, 1.0), 0);
  double worst = n00.sup_over(0, std::min(order, n00.trusted_ceil()));
  for (int i = 0; i < 3; ++i) {
    SF n0i(ScalarField(grid), 0, 1, order);
    for (int mu = 0; mu < 4; ++mu) {
      for (int nu = 0; nu < 4; ++nu) {
        n0i += truncate(
            mul(gx[sym4_index(mu, nu)], mul(xdot[mu], dX[nu][i])), order);
      }
    }
    worst = std::max(worst, n0i.sup_over(0, std::min(order,
                                                     n0i.trusted_ceil())));
  }
  out.normal_form_sup = worst;
  return out;
}

}  // namespace

RegaugeResult regauge_metric(const Metric4Series& ghat, int order) {
  if (order < 1) throw ConstraintViolation("regauge order must be positive");
  const SF one =
      SF::monomial(ScalarField::constant(ghat.grid, 1.0), 0);
  return normalize_core(ghat, one, order);
}

RegaugeResult geodesic_normalize(const Series<SymForm>& g_t,
                                 const Series<ScalarField>& u, int order) {
  const GridSpec grid = g_t.proto().grid();
  if (u.floor() != 0 ||
      sup_diff(u.at(0), ScalarField::constant(grid, 1.0)) > 1e-12) {
    throw ConstraintViolation(
        "conformal factor u must have leading coefficient 1");
  }
  if (order < 0) {
    const int ceil = g_t.trusted_ceil();
    if (ceil == kExactCeil) {
      throw ConstraintViolation(
          "order must be given explicitly for exact inputs");
    }
    order = ceil;
  }
  const BulkMetric bm = make_bulk_metric(+1, g_t);
  const Metric4Series base = compact_metric(bm);
  const SF upad = pad_stored(u, order);
  const SF u2 = mul(upad, upad);
  std::array<SF, 10> comps;
  for (int idx = 0; idx < 10; ++idx) {
    comps[idx] = pad_stored(truncate(mul(u2, base.g[idx]), order), order);
  }
  Metric4Series ghat = make_metric4(std::move(comps), grid);
  return normalize_core(ghat, upad, order);
}

}  // namespace fgforge
