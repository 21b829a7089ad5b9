#include <cmath>
#include <string>
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
using testutil::common_point_diff;
using testutil::random_metric;

namespace {

SymForm trace_injection(GridSpec grid, double eps_norm) {
  SymForm s(grid);
  for (int i = 0; i < 3; ++i) {
    s.comp(i, i) = ScalarField::constant(grid, eps_norm / 3.0);
  }
  return s;
}

SymForm divergence_injection(GridSpec grid, double eps_norm) {
  std::vector<FourierMode> mode{{{1, 0, 0}, eps_norm, 0.0}};
  ScalarField f = sample_modes(grid, mode, 0.0);
  SymForm s(grid);
  s.comp(0, 0) = f;
  s.comp(1, 1) = ScalarField(grid);
  s.comp(1, 1).add_scaled(-1.0, f);
  return s;
}

double rel_diff(const ScalarField& field, double want) {
  ScalarField d = field;
  d -= ScalarField::constant(field.grid(), want);
  return d.sup_norm() / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("transverse-traceless validation") {
  GridSpec grid = GridSpec::make(8);
  SymForm delta = SymForm::delta(grid);

  SUBCASE("zero datum passes") {
    CHECK_NOTHROW(validate_tt(delta, SymForm(grid), 1e-10));
  }

  SUBCASE("the metric itself has trace 3") {
    try {
      validate_tt(delta, delta, 1e-10);
      FAIL("expected a constraint violation");
    } catch (const ConstraintViolation& e) {
      CHECK(e.norm == doctest::Approx(3.0));
      CHECK(std::string(e.what()).find("trace") != std::string::npos);
    }
  }

  SUBCASE("the black-brane datum passes on the flat boundary") {
    CHECK_NOTHROW(
        validate_tt(delta, ads_schwarzschild_sigma(grid, 0.5), 1e-10));
  }

  SUBCASE("pure-trace and pure-divergence injections report their size") {
    for (double eps_norm : {1e-2, 1e-4}) {
      try {
        validate_tt(delta, trace_injection(grid, eps_norm), 1e-10);
        FAIL("expected a trace violation");
      } catch (const ConstraintViolation& e) {
        CHECK(e.norm >= 0.5 * eps_norm);
        CHECK(e.norm <= 2.0 * eps_norm);
      }
      try {
        validate_tt(delta, divergence_injection(grid, eps_norm), 1e-10);
        FAIL("expected a divergence violation");
      } catch (const ConstraintViolation& e) {
        CHECK(e.norm >= 0.5 * eps_norm);
        CHECK(e.norm <= 2.0 * eps_norm);
        CHECK(std::string(e.what()).find("divergence") != std::string::npos);
      }
    }
  }
}

TEST_CASE("second-order coefficient closed form") {
  GridSpec grid = GridSpec::make(16);

  SUBCASE("flat boundary gives zero") {
    SymForm g2 = compute_g2(boundary_curvature(SymForm::delta(grid)));
    CHECK(g2.sup_norm() == 0.0);
  }

  SUBCASE("conformally flat boundary matches the direct formula") {
    std::vector<FourierMode> pm{{{1, 0, 0}, 0.1, 0.0}, {{0, 1, 0}, 0.0, 0.07}};
    ScalarField psi = sample_modes(grid, pm, 0.0);
    ScalarField e2psi(grid);
    for (std::size_t i = 0; i < e2psi.size(); ++i)
      e2psi[i] = std::exp(2.0 * psi[i]);
    SymForm gamma(grid);
    for (int i = 0; i < 3; ++i) gamma.comp(i, i) = e2psi;

    Boundary3Curvature bc = boundary_curvature(gamma);
    SymForm g2 = compute_g2(bc);

    SymForm want = bc.ricci3;
    for (int idx = 0; idx < 6; ++idx) {
      ScalarField term(grid);
      term.madd(bc.scalar3, gamma.c[static_cast<std::size_t>(idx)]);
      want.c[static_cast<std::size_t>(idx)].add_scaled(-0.25, term);
      want.c[static_cast<std::size_t>(idx)] *= -1.0;
    }
    CHECK(sup_diff(g2, want) == 0.0);

    ScalarField tr = trace3(bc, g2);
    tr.add_scaled(0.25, bc.scalar3);
    CHECK(tr.sup_norm() <= 1e-12);
  }
}

TEST_CASE("flat boundary with zero datum expands to the cusp") {
  GridSpec grid = GridSpec::make(16);
  BoundaryData bd;
  bd.gamma = SymForm::delta(grid);
  bd.sigma = SymForm(grid);
  bd.order = 8;

  FGExpansion exp = expand(bd);
  for (int k = 1; k <= 8; ++k) {
    CHECK(exp.metric.g.at(k).sup_norm() <= 1e-12);
  }
  Series<Sym4F> ehat = einstein_residual(exp.metric);
  for (int m = 0; m <= 5; ++m) {
    CHECK(residual_order(ehat, m).sup_norm() <= 1e-12);
  }
  CHECK(exp.residual_sup <= 1e-12);
  CHECK(exp.steps.size() == 7);
  for (const SolveStep& s : exp.steps) {
    if (s.order == 3) continue;
    CHECK(s.min_singular_ratio >= 0.1);
  }
}

TEST_CASE("expansion reproduces the black-brane profile") {
  AdsSchwarzschildOracle oracle = ads_schwarzschild_profile(0.5, 8);

  SUBCASE("the profile solves its own ordinary differential equations") {
    CHECK(oracle.ode_residual_sup <= 1e-12);
    CHECK(oracle.g11[0] == doctest::Approx(1.0));
    CHECK(oracle.gperp[0] == doctest::Approx(1.0));
    CHECK(std::abs(oracle.g11[1]) <= 1e-14);
    CHECK(std::abs(oracle.g11[2]) <= 1e-14);
    CHECK(oracle.g11[3] == doctest::Approx(-2.0 / 3.0));
    CHECK(oracle.gperp[3] == doctest::Approx(1.0 / 3.0));
    CHECK(oracle.g11[6] == doctest::Approx(13.0 * 0.25 / 18.0));
  }

  SUBCASE("order-by-order solve lands on the profile") {
    GridSpec grid = GridSpec::make(8);
    BoundaryData bd;
    bd.gamma = SymForm::delta(grid);
    bd.sigma = ads_schwarzschild_sigma(grid, 0.5);
    bd.order = 6;

    FGExpansion exp = expand(bd);
    for (int k = 0; k <= 6; ++k) {
      const SymForm& gk = exp.metric.g.at(k);
      CHECK(rel_diff(gk.comp(0, 0),
                     oracle.g11[static_cast<std::size_t>(k)]) <= 1e-8);
      CHECK(rel_diff(gk.comp(1, 1),
                     oracle.gperp[static_cast<std::size_t>(k)]) <= 1e-8);
      CHECK(rel_diff(gk.comp(2, 2),
                     oracle.gperp[static_cast<std::size_t>(k)]) <= 1e-8);
      CHECK(gk.comp(0, 1).sup_norm() <= 1e-12);
      CHECK(gk.comp(0, 2).sup_norm() <= 1e-12);
      CHECK(gk.comp(1, 2).sup_norm() <= 1e-12);
    }
    CHECK(exp.residual_sup <= 1e-9);
  }
}

TEST_CASE("order 3 is rank deficient for the direct solver") {
  GridSpec grid = GridSpec::make(8);
  BulkMetric cusp = cusp_metric(grid);

  CHECK_THROWS_AS(solve_order(cusp, 3), SingularIndicial);

  SolveStep diag;
  SymForm g2 = solve_order(cusp, 2, {}, &diag);
  CHECK(g2.sup_norm() <= 1e-12);
  CHECK(diag.min_singular_ratio >= 0.1);

  SymForm g4 = solve_order(cusp, 4);
  CHECK(g4.sup_norm() <= 1e-12);
}

TEST_CASE("constraint injections abort the expansion with the measured "
          "norm") {
  GridSpec grid = GridSpec::make(8);
  for (double eps_norm : {1e-2, 1e-4}) {
    BoundaryData bd;
    bd.gamma = SymForm::delta(grid);
    bd.order = 4;

    bd.sigma = trace_injection(grid, eps_norm);
    try {
      expand(bd);
      FAIL("expected a trace violation");
    } catch (const ConstraintViolation& e) {
      CHECK(e.norm >= 0.5 * eps_norm);
      CHECK(e.norm <= 2.0 * eps_norm);
      CHECK(std::string(e.what()).find("trace") != std::string::npos);
    }

    bd.sigma = divergence_injection(grid, eps_norm);
    try {
      expand(bd);
      FAIL("expected a divergence violation");
    } catch (const ConstraintViolation& e) {
      CHECK(e.norm >= 0.5 * eps_norm);
      CHECK(e.norm <= 2.0 * eps_norm);
      CHECK(std::string(e.what()).find("divergence") != std::string::npos);
    }
  }
}

TEST_CASE("wick rotation") {
  GridSpec grid = GridSpec::make(8);
  BulkMetric ads = ads_schwarzschild_metric(grid, 0.5, 8);
  BulkMetric rot = wick_rotate(ads);

  SUBCASE("alternating factors and signature flip") {
    CHECK(rot.eps == -1);
    for (int k = 0; k <= 8; ++k) {
      double factor = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
      SymForm want = ads.g.at(k);
      want *= factor;
      CHECK(sup_diff(rot.g.at(k), want) == 0.0);
    }
    BulkMetric back = wick_rotate(rot);
    CHECK(back.eps == +1);
    for (int k = 0; k <= 8; ++k) {
      CHECK(sup_diff(back.g.at(k), ads.g.at(k)) == 0.0);
    }
  }

  SUBCASE("rotated expansion solves the opposite-signature equations") {
    Series<Sym4F> ehat = einstein_residual(rot);
    for (int m = 0; m <= 3; ++m) {
      CHECK(residual_order(ehat, m).sup_norm() <= 1e-8);
    }
    // The sign rule preserves the equations only until the third-order
    // datum interferes with itself: its square enters the order-6
    // coefficient with an unflipped sign, so residual order 4 is O(1).
    CHECK(residual_order(ehat, 4).sup_norm() >= 1.0);
  }

  SUBCASE("rotated cusp stays exactly einstein") {
    BulkMetric cusp_rot = wick_rotate(cusp_metric(grid));
    CHECK(cusp_rot.eps == -1);
    Series<Sym4F> ehat = einstein_residual(cusp_rot);
    for (int m = 0; m <= 5; ++m) {
      CHECK(residual_order(ehat, m).sup_norm() <= 1e-11);
    }
  }
}

TEST_CASE("curved boundary expansion") {
  GridSpec grid = GridSpec::make(16);
  Rng rng(515);
  BoundaryData bd;
  bd.gamma = random_metric(grid, rng, 1, 0.03, 2);
  bd.sigma = SymForm(grid);
  bd.order = 4;
  bd.tt_tol = 1e-8;

  FGExpansion exp = expand(bd);

  SUBCASE("the solved second-order coefficient picks the full ricci form") {
    CHECK(exp.g2.selected == "ricci_minus_quarter_scalar");
    CHECK(exp.g2.full_reading_sup <= 1e-8);
    CHECK(exp.g2.half_reading_sup >= 1e-3);
  }

  SUBCASE("odd orders below the datum vanish and the datum is inserted") {
    CHECK(exp.metric.g.at(1).sup_norm() == 0.0);
    CHECK(sup_diff(exp.metric.g.at(3), bd.sigma) <= 1e-8);
  }

  SUBCASE("the residual contract holds") {
    CHECK(exp.residual_sup <= 1e-9);
    CHECK(exp.residual_checked_through == 1);
  }
}

TEST_CASE("expansion is deterministic and stable under grid refinement") {
  Rng rng(616);
  std::vector<FourierMode> m11{{{1, 0, 0}, 0.02, 0.0}};
  std::vector<FourierMode> m22{{{0, 1, 0}, 0.0, 0.015}};
  std::vector<FourierMode> m12{{{0, 0, 1}, 0.01, 0.0}};

  auto boundary_on = [&](GridSpec grid) {
    BoundaryData bd;
    bd.gamma = SymForm::delta(grid);
    bd.gamma.comp(0, 0) += sample_modes(grid, m11, 0.0);
    bd.gamma.comp(1, 1) += sample_modes(grid, m22, 0.0);
    bd.gamma.comp(0, 1) = sample_modes(grid, m12, 0.0);
    bd.sigma = SymForm(grid);
    bd.order = 4;
    return bd;
  };

  GridSpec coarse = GridSpec::make(16);
  FGExpansion a = expand(boundary_on(coarse));
  FGExpansion b = expand(boundary_on(coarse));
  for (int k = 0; k <= 4; ++k) {
    CHECK(sup_diff(a.metric.g.at(k), b.metric.g.at(k)) == 0.0);
  }

  FGExpansion fine = expand(boundary_on(GridSpec::make(32)));
  for (int k = 0; k <= 4; ++k) {
    double worst = 0.0;
    for (int c = 0; c < 6; ++c) {
      worst = std::max(
          worst, common_point_diff(a.metric.g.at(k).c[static_cast<std::size_t>(c)],
                                   fine.metric.g.at(k).c[static_cast<std::size_t>(c)]));
    }
    CHECK(worst <= 1e-9);
  }
}
