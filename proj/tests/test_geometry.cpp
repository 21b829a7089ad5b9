#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "fgforge/boundary.hpp"
#include "fgforge/errors.hpp"
#include "fgforge/expansion.hpp"
#include "fgforge/geometry.hpp"
#include "fgforge/grid.hpp"
#include "fgforge/references.hpp"
#include "fgforge/rng.hpp"
#include "fgforge/sym.hpp"
#include "test_util.hpp"

using namespace fgforge;
using testutil::random_field;
using testutil::random_metric;

namespace {

// Random product-form metric dt^2 + g_t, an exact cubic polynomial in t.
// Zero-padding the storage keeps the trust windows of derived curvature
// series wide, and the constant cubic term gives the t-direction genuine
// third-derivative content.
BulkMetric random_bulk(GridSpec grid, Rng& rng, double amp) {
  Series<SymForm> g(SymForm(grid), 0, 9, kExactCeil);
  g.stored_mut(0) = random_metric(grid, rng, 1, amp, 1);
  for (int k = 1; k <= 2; ++k) {
    SymForm coeff(grid);
    for (int c = 0; c < 6; ++c) {
      coeff.c[static_cast<std::size_t>(c)] =
          random_field(grid, rng, 1, amp, 1);
    }
    g.stored_mut(k) = std::move(coeff);
  }
  SymForm cubic(grid);
  for (int c = 0; c < 6; ++c) {
    cubic.c[static_cast<std::size_t>(c)] =
        ScalarField::constant(grid, 0.1 + 0.2 * rng.unit());
  }
  g.stored_mut(3) = std::move(cubic);
  return make_bulk_metric(+1, std::move(g));
}

// Pointwise 4-metric samples of a product-form metric at numeric t.
struct Slice4 {
  std::array<ScalarField, 10> g;
  std::array<ScalarField, 10> ginv;
};

Slice4 sample_slice(const BulkMetric& bm, double t) {
  GridSpec grid = bm.grid();
  SymForm gt = bm.g.evaluate(t);
  SymForm gtinv = sym3_inverse_pointwise(gt);
  Slice4 s;
  for (auto& f : s.g) f = ScalarField(grid);
  for (auto& f : s.ginv) f = ScalarField(grid);
  s.g[0] = ScalarField::constant(grid, static_cast<double>(bm.eps));
  s.ginv[0] = ScalarField::constant(grid, 1.0 / bm.eps);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      s.g[static_cast<std::size_t>(sym4_index(i + 1, j + 1))] =
          gt.comp(i, j);
      s.ginv[static_cast<std::size_t>(sym4_index(i + 1, j + 1))] =
          gtinv.comp(i, j);
    }
  }
  return s;
}

// Partial derivative of a slice component: axis 0 is a central finite
// difference in t with step h, axes 1..3 are spectral.
using SliceDeriv = std::array<std::array<ScalarField, 10>, 4>;

SliceDeriv slice_derivatives(const BulkMetric& bm, double t, double h) {
  Slice4 plus = sample_slice(bm, t + h);
  Slice4 minus = sample_slice(bm, t - h);
  Slice4 here = sample_slice(bm, t);
  SliceDeriv d;
  for (int idx = 0; idx < 10; ++idx) {
    ScalarField dt = plus.g[static_cast<std::size_t>(idx)];
    dt -= minus.g[static_cast<std::size_t>(idx)];
    dt *= 1.0 / (2.0 * h);
    d[0][static_cast<std::size_t>(idx)] = std::move(dt);
    for (int axis = 1; axis <= 3; ++axis) {
      d[static_cast<std::size_t>(axis)][static_cast<std::size_t>(idx)] =
          spectral_derivative(here.g[static_cast<std::size_t>(idx)], axis);
    }
  }
  return d;
}

// Christoffel symbols of the pointwise 4-metric at numeric t, stored as
// chr[a][sym4_index(b, c)].
std::array<std::array<ScalarField, 10>, 4> slice_christoffel(
    const BulkMetric& bm, double t, double h) {
  GridSpec grid = bm.grid();
  Slice4 s = sample_slice(bm, t);
  SliceDeriv d = slice_derivatives(bm, t, h);
  std::array<std::array<ScalarField, 10>, 4> chr;
  for (auto& row : chr)
    for (auto& f : row) f = ScalarField(grid);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = b; c < 4; ++c) {
        ScalarField acc(grid);
        for (int e = 0; e < 4; ++e) {
          ScalarField sym =
              d[static_cast<std::size_t>(b)]
               [static_cast<std::size_t>(sym4_index(e, c))] +
              d[static_cast<std::size_t>(c)]
               [static_cast<std::size_t>(sym4_index(e, b))] -
              d[static_cast<std::size_t>(e)]
               [static_cast<std::size_t>(sym4_index(b, c))];
          acc.madd(s.ginv[static_cast<std::size_t>(sym4_index(a, e))], sym);
        }
        acc *= 0.5;
        chr[static_cast<std::size_t>(a)]
           [static_cast<std::size_t>(sym4_index(b, c))] = std::move(acc);
      }
    }
  }
  return chr;
}

// Ricci tensor at t = 0 via finite differences in t: an oracle for the
// series curvature engine that never touches series arithmetic for the
// t-direction.
Sym4F fd_ricci_at_zero(const BulkMetric& bm, double h) {
  GridSpec grid = bm.grid();
  auto chr0 = slice_christoffel(bm, 0.0, h);
  auto chrp = slice_christoffel(bm, h, h);
  auto chrm = slice_christoffel(bm, -h, h);

  // dchr[e][a][bc] = partial_e Gamma^a_{bc} at t = 0.
  std::array<std::array<std::array<ScalarField, 10>, 4>, 4> dchr;
  for (int a = 0; a < 4; ++a) {
    for (int idx = 0; idx < 10; ++idx) {
      ScalarField dt = chrp[static_cast<std::size_t>(a)]
                           [static_cast<std::size_t>(idx)];
      dt -= chrm[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx)];
      dt *= 1.0 / (2.0 * h);
      dchr[0][static_cast<std::size_t>(a)][static_cast<std::size_t>(idx)] =
          std::move(dt);
      for (int axis = 1; axis <= 3; ++axis) {
        dchr[static_cast<std::size_t>(axis)][static_cast<std::size_t>(a)]
            [static_cast<std::size_t>(idx)] = spectral_derivative(
            chr0[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx)],
            axis);
      }
    }
  }

  Sym4F ric(grid);
  for (int b = 0; b < 4; ++b) {
    for (int c = b; c < 4; ++c) {
      ScalarField acc(grid);
      for (int a = 0; a < 4; ++a) {
        acc += dchr[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)]
                   [static_cast<std::size_t>(sym4_index(b, c))];
        acc -= dchr[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)]
                   [static_cast<std::size_t>(sym4_index(a, b))];
        for (int e = 0; e < 4; ++e) {
          acc.madd(chr0[static_cast<std::size_t>(a)]
                       [static_cast<std::size_t>(sym4_index(a, e))],
                   chr0[static_cast<std::size_t>(e)]
                       [static_cast<std::size_t>(sym4_index(b, c))]);
          ScalarField cross =
              chr0[static_cast<std::size_t>(a)]
                  [static_cast<std::size_t>(sym4_index(c, e))] *
              chr0[static_cast<std::size_t>(e)]
                  [static_cast<std::size_t>(sym4_index(a, b))];
          acc.add_scaled(-1.0, cross);
        }
      }
      ric.comp(b, c) = std::move(acc);
    }
  }
  return ric;
}

double slice_sup_diff(const Sym4F& a, const std::array<SF, 10>& series,
                      int order) {
  double m = 0.0;
  for (int idx = 0; idx < 10; ++idx) {
    m = std::max(m, sup_diff(a.c[static_cast<std::size_t>(idx)],
                             series[static_cast<std::size_t>(idx)].at(order)));
  }
  return m;
}

// Gradient (one 4d form series) of a scalar series: t-derivative exact,
// spatial derivatives spectral.
std::array<SF, 4> scalar_gradient(const SF& f) {
  std::array<SF, 4> d;
  d[0] = tderiv(f);
  for (int axis = 1; axis <= 3; ++axis) {
    SF out(ScalarField(f.proto().grid()), f.floor(),
           f.stored_top() - f.floor() + 1, f.trusted_ceil());
    for (int k = f.floor(); k <= f.stored_top(); ++k) {
      out.stored_mut(k) = spectral_derivative(f.stored(k), axis);
    }
    out.trim();
    d[static_cast<std::size_t>(axis)] = std::move(out);
  }
  return d;
}

double per_order_sup(const std::array<SF, 4>& a, int order) {
  double m = 0.0;
  for (const SF& c : a) m = std::max(m, c.at(order).sup_norm());
  return m;
}

}  // namespace

TEST_CASE("flat product metric has vanishing curvature") {
  BulkMetric bm = cusp_metric(GridSpec::make(8));
  CurvatureBundle cb = curvature4(bm);
  for (int idx = 0; idx < 10; ++idx) {
    const SF& r = cb.ric[static_cast<std::size_t>(idx)];
    for (int k = r.floor(); k <= r.stored_top(); ++k) {
      CHECK(r.at(k).sup_norm() == 0.0);
    }
  }
  CHECK(cb.scal.sup_over(0, cb.scal.stored_top()) == 0.0);
  CHECK(cb.first_bianchi_sup == 0.0);
  CHECK(cb.weyl_trace_sup <= 1e-15);
}

TEST_CASE("series ricci matches a finite-difference oracle at t = 0") {
  GridSpec grid = GridSpec::make(16);
  Rng rng(707);
  BulkMetric bm = random_bulk(grid, rng, 0.05);
  CurvatureBundle cb = curvature4(bm);

  double h1 = 1e-2, h2 = 5e-3;
  double e1 = slice_sup_diff(fd_ricci_at_zero(bm, h1), cb.ric, 0);
  double e2 = slice_sup_diff(fd_ricci_at_zero(bm, h2), cb.ric, 0);
  double order = std::log2(e1 / e2);
  CHECK(e2 <= 1e-3);
  CHECK(e2 >= 1e-9);
  CHECK(order >= 1.9);
  CHECK(order <= 2.1);
}

TEST_CASE("cone metric reproduces the closed-form sectional curvatures") {
  BulkMetric cone = cone_metric(GridSpec::make(8));
  for (double t : {0.2, 0.4}) {
    std::array<ScalarField, 6> K = sectional_curvatures(cone, t);
    double coth = (1.0 + t * t / 4.0) / (1.0 - t * t / 4.0);
    for (int p = 0; p < 3; ++p) {
      CHECK(sup_diff(K[static_cast<std::size_t>(p)],
                     ScalarField::constant(cone.grid(), -1.0)) <= 1e-9);
    }
    for (int p = 3; p < 6; ++p) {
      CHECK(sup_diff(K[static_cast<std::size_t>(p)],
                     ScalarField::constant(cone.grid(), -coth * coth)) <=
            1e-9);
    }
  }
}

TEST_CASE("einstein residual of the cusp vanishes at every order") {
  BulkMetric bm = cusp_metric(GridSpec::make(16));
  Series<Sym4F> ehat = einstein_residual(bm);
  CHECK(ehat.sup_over(0, ehat.stored_top()) <= 1e-12);
}

TEST_CASE("corrupting the second coefficient surfaces at residual order 0") {
  GridSpec grid = GridSpec::make(8);
  Series<SymForm> g(SymForm(grid), 0, 3, 8);
  g.stored_mut(0) = SymForm::delta(grid);
  SymForm bump = SymForm::delta(grid);
  bump *= 0.1;
  g.stored_mut(2) = std::move(bump);
  BulkMetric bm = make_bulk_metric(+1, std::move(g));
  Series<Sym4F> ehat = einstein_residual(bm);
  CHECK(residual_order(ehat, 0).sup_norm() >= 1e-3);
}

TEST_CASE("bach tensor of the compactified cusp vanishes") {
  CurvatureBundle cb = curvature4(cusp_metric(GridSpec::make(8)));
  std::array<SF, 10> b = bach_tensor(cb);
  for (const SF& c : b) {
    for (int k = c.floor(); k <= c.stored_top(); ++k) {
      CHECK(c.at(k).sup_norm() <= 1e-10);
    }
  }
}

TEST_CASE("bach flatness survives conformal rescaling") {
  GridSpec grid = GridSpec::make(16);

  auto conformal_cusp = [&](const SF& phi) {
    SF phi2 = mul(phi, phi);
    std::array<SF, 10> comps;
    for (int idx = 0; idx < 10; ++idx) {
      auto [a, b] = std::pair{kSym4Pairs[idx][0], kSym4Pairs[idx][1]};
      if (a == b) {
        comps[static_cast<std::size_t>(idx)] = phi2;
      } else {
        comps[static_cast<std::size_t>(idx)] =
            SF::monomial(ScalarField(grid), 0);
      }
    }
    return make_metric4(std::move(comps), grid);
  };

  SUBCASE("constant-in-x factor 1 + 0.1 t") {
    SF phi(ScalarField(grid), 0, 2, 8);
    phi.stored_mut(0) = ScalarField::constant(grid, 1.0);
    phi.stored_mut(1) = ScalarField::constant(grid, 0.1);
    CurvatureBundle cb = curvature_of(conformal_cusp(phi));
    std::array<SF, 10> b = bach_tensor(cb);
    for (const SF& c : b) {
      for (int k = c.floor(); k <= std::min(c.stored_top(), 4); ++k) {
        CHECK(c.at(k).sup_norm() <= 1e-9);
      }
    }
  }

  SUBCASE("analytic factor 1 + t psi(x)") {
    std::vector<FourierMode> pm{{{1, 0, 0}, 0.05, 0.0}};
    SF phi(ScalarField(grid), 0, 2, 8);
    phi.stored_mut(0) = ScalarField::constant(grid, 1.0);
    phi.stored_mut(1) = sample_modes(grid, pm, 0.0);
    CurvatureBundle cb = curvature_of(conformal_cusp(phi));
    std::array<SF, 10> b = bach_tensor(cb);
    for (const SF& c : b) {
      for (int k = c.floor(); k <= std::min(c.stored_top(), 4); ++k) {
        CHECK(c.at(k).sup_norm() <= 1e-9);
      }
    }
  }
}

TEST_CASE("bach tensor of an einstein expansion vanishes through its trusted "
          "orders") {
  BulkMetric bm = ads_schwarzschild_metric(GridSpec::make(8), 0.5, 8);
  CurvatureBundle cb = curvature4(bm);
  std::array<SF, 10> b = bach_tensor(cb);
  int btop = 3;
  for (const SF& c : b) {
    if (c.trusted_ceil() < kExactCeil) btop = std::min(btop, c.trusted_ceil());
  }
  for (const SF& c : b) {
    for (int k = 0; k <= btop; ++k) {
      CHECK(c.at(k).sup_norm() <= 1e-10);
    }
  }
}

TEST_CASE("engine identities hold on a general series 4-metric") {
  GridSpec grid = GridSpec::make(16);
  Rng rng(808);
  std::array<SF, 10> comps;
  for (int idx = 0; idx < 10; ++idx) {
    auto [a, b] = std::pair{kSym4Pairs[idx][0], kSym4Pairs[idx][1]};
    SF s(ScalarField(grid), 0, 7, kExactCeil);
    ScalarField lead = random_field(grid, rng, 1, 0.01, 1);
    if (a == b) lead += ScalarField::constant(grid, 1.0);
    s.stored_mut(0) = std::move(lead);
    s.stored_mut(1) = random_field(grid, rng, 1, 0.01, 1);
    s.stored_mut(2) = random_field(grid, rng, 1, 0.01, 1);
    comps[static_cast<std::size_t>(idx)] = std::move(s);
  }
  CurvatureBundle cb = curvature_of(make_metric4(std::move(comps), grid));
  CHECK(cb.first_bianchi_sup <= 1e-11);
  CHECK(cb.weyl_trace_sup <= 1e-10);
  CHECK(cb.ricci_consistency_sup <= 1e-10);
}

TEST_CASE("divergence, trace, and bianchi operator") {
  GridSpec grid = GridSpec::make(16);
  Rng rng(909);
  BulkMetric bm = random_bulk(grid, rng, 0.01);
  CurvatureBundle cb = curvature4(bm);
  const int top = 2;

  SUBCASE("the metric itself is bianchi-flat") {
    std::array<SF, 4> beta = bianchi_op(cb, cb.metric.g);
    for (int m = 0; m <= top; ++m) {
      CHECK(per_order_sup(beta, m) <= 1e-11);
    }
    SF tr = trace_op(cb, cb.metric.g);
    CHECK(sup_diff(tr.at(0), ScalarField::constant(grid, 4.0)) <= 1e-11);
  }

  SUBCASE("contracted bianchi identity") {
    std::array<SF, 4> div_ric = divergence_op(cb, cb.ric);
    std::array<SF, 4> ds = scalar_gradient(cb.scal);
    for (int m = 0; m <= top; ++m) {
      double worst = 0.0;
      for (int a = 0; a < 4; ++a) {
        ScalarField lhs = div_ric[static_cast<std::size_t>(a)].at(m);
        lhs.add_scaled(0.5, ds[static_cast<std::size_t>(a)].at(m));
        worst = std::max(worst, lhs.sup_norm());
      }
      CHECK(worst <= 1e-10);
    }
  }

  SUBCASE("divergence of a scalar multiple of the metric") {
    SF f(ScalarField(grid), 0, 2, kExactCeil);
    f.stored_mut(0) = random_field(grid, rng, 2, 0.5, 2);
    f.stored_mut(1) = random_field(grid, rng, 2, 0.5, 2);
    std::array<SF, 10> fg;
    for (int idx = 0; idx < 10; ++idx) {
      fg[static_cast<std::size_t>(idx)] =
          mul(f, cb.metric.g[static_cast<std::size_t>(idx)]);
    }
    std::array<SF, 4> div = divergence_op(cb, fg);
    std::array<SF, 4> df = scalar_gradient(f);
    for (int m = 0; m <= top; ++m) {
      double worst = 0.0;
      for (int a = 0; a < 4; ++a) {
        ScalarField lhs = div[static_cast<std::size_t>(a)].at(m);
        lhs.add_scaled(1.0, df[static_cast<std::size_t>(a)].at(m));
        worst = std::max(worst, lhs.sup_norm());
      }
      CHECK(worst <= 1e-11);
    }
  }
}

TEST_CASE("boundary curvature of flat and constant metrics vanishes") {
  GridSpec grid = GridSpec::make(8);

  Boundary3Curvature flat = boundary_curvature(SymForm::delta(grid));
  CHECK(flat.ricci3.sup_norm() == 0.0);
  CHECK(flat.scalar3.sup_norm() == 0.0);

  SymForm aniso(grid);
  aniso.comp(0, 0) = ScalarField::constant(grid, 2.0);
  aniso.comp(1, 1) = ScalarField::constant(grid, 0.5);
  aniso.comp(2, 2) = ScalarField::constant(grid, 1.5);
  Boundary3Curvature bc = boundary_curvature(aniso);
  CHECK(bc.ricci3.sup_norm() == 0.0);
  CHECK(bc.scalar3.sup_norm() == 0.0);
}

TEST_CASE("boundary curvature matches the conformally flat closed form") {
  GridSpec grid = GridSpec::make(16);
  Rng rng(111);
  std::vector<FourierMode> pm{{{1, 0, 0}, 0.1, 0.0},
                              {{0, 1, 0}, 0.0, 0.05},
                              {{1, 0, 1}, 0.03, 0.0}};
  ScalarField psi = sample_modes(grid, pm, 0.0);

  ScalarField e2psi(grid);
  for (std::size_t i = 0; i < e2psi.size(); ++i) {
    e2psi[i] = std::exp(2.0 * psi[i]);
  }
  SymForm gamma(grid);
  for (int i = 0; i < 3; ++i) gamma.comp(i, i) = e2psi;
  Boundary3Curvature bc = boundary_curvature(gamma);

  std::array<ScalarField, 3> dpsi;
  for (int axis = 1; axis <= 3; ++axis) {
    dpsi[static_cast<std::size_t>(axis - 1)] =
        spectral_derivative(psi, axis);
  }
  ScalarField lap(grid), grad2(grid);
  for (int axis = 1; axis <= 3; ++axis) {
    lap += spectral_derivative(dpsi[static_cast<std::size_t>(axis - 1)],
                               axis);
    grad2.madd(dpsi[static_cast<std::size_t>(axis - 1)],
               dpsi[static_cast<std::size_t>(axis - 1)]);
  }

  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      ScalarField want =
          spectral_derivative(dpsi[static_cast<std::size_t>(i)], j + 1);
      want *= -1.0;
      want.madd(dpsi[static_cast<std::size_t>(i)],
                dpsi[static_cast<std::size_t>(j)]);
      if (i == j) {
        want -= lap;
        want -= grad2;
      }
      worst = std::max(worst, sup_diff(bc.ricci3.comp(i, j), want));
    }
  }
  CHECK(worst <= 1e-9);

  ScalarField want_s = lap;
  want_s *= -4.0;
  want_s.add_scaled(-2.0, grad2);
  ScalarField em2psi(grid);
  for (std::size_t i = 0; i < em2psi.size(); ++i) {
    em2psi[i] = std::exp(-2.0 * psi[i]);
  }
  want_s *= em2psi;
  CHECK(sup_diff(bc.scalar3, want_s) <= 1e-9);
}

TEST_CASE("boundary curvature satisfies the contracted bianchi identity") {
  GridSpec grid = GridSpec::make(16);
  Rng rng(222);
  SymForm gamma = random_metric(grid, rng, 1, 0.01);
  Boundary3Curvature bc = boundary_curvature(gamma);
  std::array<ScalarField, 3> div_ric = divergence3(bc, bc.ricci3);
  double worst = 0.0;
  for (int axis = 1; axis <= 3; ++axis) {
    ScalarField lhs = div_ric[static_cast<std::size_t>(axis - 1)];
    lhs.add_scaled(0.5, spectral_derivative(bc.scalar3, axis));
    worst = std::max(worst, lhs.sup_norm());
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("boundary identities at t = 0") {
  SUBCASE("cusp: everything vanishes") {
    BoundaryIdentityReport r =
        boundary_identities_check(cusp_metric(GridSpec::make(8)));
    CHECK(r.tangential_sup <= 1e-11);
    CHECK(r.tangential_variant_sup <= 1e-11);
    CHECK(r.mixed_sup <= 1e-11);
    CHECK(r.normal_sup <= 1e-11);
    CHECK(r.mean_curvature_sup <= 1e-11);
  }

  SUBCASE("flat-boundary expansion") {
    BulkMetric bm = ads_schwarzschild_metric(GridSpec::make(8), 0.5, 6);
    BoundaryIdentityReport r = boundary_identities_check(bm);
    CHECK(r.tangential_sup <= 1e-9);
    CHECK(r.mixed_sup <= 1e-9);
    CHECK(r.normal_sup <= 1e-9);
    CHECK(r.mean_curvature_sup <= 1e-9);
  }

  SUBCASE("curved boundary separates the two candidate readings") {
    GridSpec grid = GridSpec::make(16);
    Rng rng(333);
    SymForm gamma = random_metric(grid, rng, 1, 0.05);
    SymForm g2 = compute_g2(boundary_curvature(gamma));
    Series<SymForm> g(SymForm(grid), 0, 3, 2);
    g.stored_mut(0) = std::move(gamma);
    g.stored_mut(2) = std::move(g2);
    BoundaryIdentityReport r =
        boundary_identities_check(make_bulk_metric(+1, std::move(g)));
    CHECK(r.tangential_sup <= 1e-8);
    CHECK(r.tangential_variant_sup >= 1e-3);
    CHECK(r.mixed_sup <= 1e-8);
    CHECK(r.normal_sup <= 1e-8);
    CHECK(r.mean_curvature_sup == 0.0);
  }
}

TEST_CASE("residual and decay fits on reference metrics") {
  BulkMetric ads = ads_schwarzschild_metric(GridSpec::make(8), 0.5, 6);
  double rfit = residual_order_fit(ads, {0.1, 0.05, 0.025});
  CHECK(rfit >= 3.5);

  double sfit = sectional_decay_fit(ads, {0.1, 0.05});
  CHECK(sfit >= 2.0);

  BulkMetric cusp = cusp_metric(GridSpec::make(8));
  CHECK(std::isinf(sectional_decay_fit(cusp, {0.1, 0.05})));
}
