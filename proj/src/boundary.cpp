#include "fgforge/boundary.hpp"

#include <cmath>

#include "fgforge/errors.hpp"
#include "fgforge/parallel.hpp"

namespace fgforge {

namespace {

// Spatial axes are 1..3 in spectral_derivative; boundary indices are 0..2.
ScalarField d3(const ScalarField& f, int a) {
  return spectral_derivative(f, a + 1);
}

}  // namespace

Boundary3Curvature boundary_curvature(const SymForm& gamma) {
  GridSpec grid = gamma.grid();
  check_positive_definite(gamma, "boundary metric");

  Boundary3Curvature bc;
  bc.grid = grid;
  bc.metric = gamma;
  bc.ginv = sym3_inverse_pointwise(gamma);

  std::array<SymForm, 3> dg;
  for (int a = 0; a < 3; ++a) {
    for (int k = 0; k < 6; ++k) dg[a].c[k] = d3(gamma.c[k], a);
  }
  parallel_for(18, [&](std::size_t t) {
    int a = static_cast<int>(t) / 6, idx = static_cast<int>(t) % 6;
    int b = kSym3Pairs[idx][0], c = kSym3Pairs[idx][1];
    ScalarField acc(grid);
    for (int d = 0; d < 3; ++d) {
      ScalarField inner = dg[b].comp(d, c);
      inner += dg[c].comp(d, b);
      inner -= dg[d].comp(b, c);
      acc.madd(bc.ginv.comp(a, d), inner);
    }
    acc *= 0.5;
    bc.chr[t] = std::move(acc);
  });

  // S_b = Gamma^a_{ab}
  std::array<ScalarField, 3> S;
  for (int b = 0; b < 3; ++b) {
    ScalarField acc(grid);
    for (int a = 0; a < 3; ++a) acc += bc.chr[a * 6 + sym3_index(a, b)];
    S[b] = std::move(acc);
  }
  parallel_for(6, [&](std::size_t t) {
    int idx = static_cast<int>(t);
    int b = kSym3Pairs[idx][0], d = kSym3Pairs[idx][1];
    ScalarField acc(grid);
    for (int a = 0; a < 3; ++a) acc += d3(bc.chr[a * 6 + sym3_index(d, b)], a);
    acc.add_scaled(-0.5, d3(S[b], d));
    acc.add_scaled(-0.5, d3(S[d], b));
    for (int e = 0; e < 3; ++e) {
      acc.madd(S[e], bc.chr[e * 6 + sym3_index(d, b)]);
      for (int a = 0; a < 3; ++a) {
        ScalarField prod(grid);
        prod.madd(bc.chr[a * 6 + sym3_index(d, e)],
                  bc.chr[e * 6 + sym3_index(a, b)]);
        acc -= prod;
      }
    }
    bc.ricci3.c[idx] = std::move(acc);
  });

  ScalarField scal(grid);
  for (int idx = 0; idx < 6; ++idx) {
    ScalarField w(grid);
    w.madd(bc.ginv.c[idx], bc.ricci3.c[idx]);
    w *= kSym3Weight[idx];
    scal += w;
  }
  bc.scalar3 = std::move(scal);
  return bc;
}

std::array<ScalarField, 3> divergence3(const Boundary3Curvature& bc,
                                       const SymForm& h) {
  GridSpec grid = bc.grid;
  std::array<ScalarField, 3> out;
  for (int a = 0; a < 3; ++a) {
    ScalarField acc(grid);
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        ScalarField nab = d3(h.comp(c, a), b);
        for (int e = 0; e < 3; ++e) {
          ScalarField corr(grid);
          corr.madd(bc.chr[e * 6 + sym3_index(b, c)], h.comp(e, a));
          corr.madd(bc.chr[e * 6 + sym3_index(b, a)], h.comp(c, e));
          nab -= corr;
        }
        acc.madd(bc.ginv.comp(b, c), nab);
      }
    acc *= -1.0;
    out[a] = std::move(acc);
  }
  return out;
}

ScalarField trace3(const Boundary3Curvature& bc, const SymForm& h) {
  ScalarField acc(bc.grid);
  for (int idx = 0; idx < 6; ++idx) {
    ScalarField w(bc.grid);
    w.madd(bc.ginv.c[idx], h.c[idx]);
    w *= kSym3Weight[idx];
    acc += w;
  }
  return acc;
}

BoundaryIdentityReport boundary_identities_check(const BulkMetric& bm) {
  CurvatureBundle cb = curvature4(bm);
  Boundary3Curvature bc = boundary_curvature(bm.g.at(0));

  const ScalarField s0 = cb.scal.at(0);
  BoundaryIdentityReport rep;

  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      ScalarField lhs = cb.ric[sym4_index(i + 1, j + 1)].at(0);
      lhs.add_scaled(-2.0, bc.ricci3.comp(i, j));
      ScalarField coef = s0;
      coef.add_scaled(-3.0, bc.scalar3);
      ScalarField term(bm.grid());
      term.madd(coef, bc.metric.comp(i, j));
      ScalarField corrected = lhs;
      corrected.add_scaled(-1.0 / 6.0, term);
      rep.tangential_sup = std::max(rep.tangential_sup, corrected.sup_norm());

      ScalarField coef_v = s0;
      coef_v.add_scaled(-1.5, bc.scalar3);
      ScalarField term_v(bm.grid());
      term_v.madd(coef_v, bc.metric.comp(i, j));
      ScalarField variant = lhs;
      variant.add_scaled(-1.0 / 6.0, term_v);
      rep.tangential_variant_sup =
          std::max(rep.tangential_variant_sup, variant.sup_norm());
    }

  for (int i = 1; i <= 3; ++i) {
    rep.mixed_sup =
        std::max(rep.mixed_sup, cb.ric[sym4_index(0, i)].at(0).sup_norm());
  }

  ScalarField normal = cb.ric[sym4_index(0, 0)].at(0);
  normal.add_scaled(-0.25, bc.scalar3);
  rep.normal_sup = normal.sup_norm();

  rep.mean_curvature_sup = 0.5 * bm.g.at(1).sup_norm();
  return rep;
}

}  // namespace fgforge
