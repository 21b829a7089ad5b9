#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fgforge/errors.hpp"
#include "fgforge/geometry.hpp"
#include "fgforge/grid.hpp"
#include "fgforge/parallel.hpp"
#include "fgforge/rng.hpp"
#include "fgforge/series.hpp"
#include "fgforge/sym.hpp"
#include "test_util.hpp"

using namespace fgforge;
using testutil::common_point_diff;
using testutil::random_field;
using testutil::random_modes;

namespace {

Series<ScalarField> constant_series(GridSpec grid,
                                    const std::vector<double>& coeffs,
                                    int ceil) {
  Series<ScalarField> s(ScalarField(grid), 0,
                        static_cast<int>(coeffs.size()), ceil);
  for (int k = 0; k < static_cast<int>(coeffs.size()); ++k) {
    s.stored_mut(k) = ScalarField::constant(grid, coeffs[k]);
  }
  return s;
}

// Identity 4-metric as exact constant component series.
std::array<SF, 10> identity4(GridSpec grid) {
  std::array<SF, 10> g;
  for (int idx = 0; idx < 10; ++idx) {
    auto [a, b] = std::pair{kSym4Pairs[idx][0], kSym4Pairs[idx][1]};
    double v = (a == b) ? 1.0 : 0.0;
    g[static_cast<std::size_t>(idx)] =
        SF::monomial(ScalarField::constant(grid, v), 0);
  }
  return g;
}

Series<MatF<4>> to_matrix_series(const std::array<SF, 10>& g, GridSpec grid) {
  int floor = g[0].floor(), top = g[0].stored_top(),
      ceil = g[0].trusted_ceil();
  for (int idx = 1; idx < 10; ++idx) {
    floor = std::min(floor, g[static_cast<std::size_t>(idx)].floor());
    top = std::max(top, g[static_cast<std::size_t>(idx)].stored_top());
    ceil = std::min(ceil, g[static_cast<std::size_t>(idx)].trusted_ceil());
  }
  top = std::min(top, ceil);
  Series<MatF<4>> out(MatF<4>(grid), floor, top - floor + 1, ceil);
  for (int m = floor; m <= top; ++m) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        out.stored_mut(m).at(a, b) =
            g[static_cast<std::size_t>(sym4_index(a, b))].at(m);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("spectral derivative of constants and single modes") {
  GridSpec grid = GridSpec::make(16);

  ScalarField c = ScalarField::constant(grid, 2.5);
  for (int axis = 1; axis <= 3; ++axis) {
    CHECK(spectral_derivative(c, axis).sup_norm() == 0.0);
  }

  std::vector<FourierMode> cosx1{{{1, 0, 0}, 1.0, 0.0}};
  std::vector<FourierMode> msinx1{{{1, 0, 0}, 0.0, -1.0}};
  ScalarField f = sample_modes(grid, cosx1, 0.0);
  ScalarField expected = sample_modes(grid, msinx1, 0.0);
  CHECK(sup_diff(spectral_derivative(f, 1), expected) <= 1e-12);
  CHECK(spectral_derivative(f, 2).sup_norm() <= 1e-13);
  CHECK(spectral_derivative(f, 3).sup_norm() <= 1e-13);
}

TEST_CASE("spectral derivative matches the closed-form mode derivative") {
  GridSpec grid = GridSpec::make(16);
  Rng rng(101);
  std::vector<FourierMode> modes = random_modes(rng, 4, 1.0, 6);
  ScalarField f = sample_modes(grid, modes, 0.7);
  for (int axis = 1; axis <= 3; ++axis) {
    ScalarField df = spectral_derivative(f, axis);
    double worst = 0.0;
    for (int i1 = 0; i1 < grid.n; ++i1) {
      for (int i2 = 0; i2 < grid.n; ++i2) {
        for (int i3 = 0; i3 < grid.n; ++i3) {
          double exact = eval_modes_deriv(modes, axis, grid.coord(i1),
                                          grid.coord(i2), grid.coord(i3));
          worst = std::max(worst, std::abs(df.at(i1, i2, i3) - exact));
        }
      }
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("mixed partial derivatives commute on band-limited data") {
  GridSpec grid = GridSpec::make(16);
  Rng rng(202);
  ScalarField f = random_field(grid, rng, 4, 1.0, 6);
  ScalarField d12 = spectral_derivative(spectral_derivative(f, 1), 2);
  ScalarField d21 = spectral_derivative(spectral_derivative(f, 2), 1);
  CHECK(sup_diff(d12, d21) <= 1e-12);
}

TEST_CASE("product rule against a doubled-grid oracle") {
  GridSpec coarse = GridSpec::make(16);
  GridSpec fine = GridSpec::make(32);
  Rng rng(303);
  std::vector<FourierMode> fmodes = random_modes(rng, 4, 1.0, 5);
  std::vector<FourierMode> gmodes = random_modes(rng, 4, 1.0, 5);

  ScalarField f = sample_modes(coarse, fmodes, 0.3);
  ScalarField g = sample_modes(coarse, gmodes, -0.2);
  ScalarField lhs = spectral_derivative(f * g, 1);
  ScalarField by_parts =
      f * spectral_derivative(g, 1) + g * spectral_derivative(f, 1);

  // The product doubles the bandwidth, so the coarse-grid results carry
  // aliasing; the fine grid resolves the product exactly.
  ScalarField f2 = sample_modes(fine, fmodes, 0.3);
  ScalarField g2 = sample_modes(fine, gmodes, -0.2);
  ScalarField oracle = spectral_derivative(f2 * g2, 1);

  CHECK(common_point_diff(lhs, oracle) <= 1e-10);
  CHECK(common_point_diff(by_parts, oracle) <= 1e-10);
}

TEST_CASE("derived fields are stable under resolution doubling") {
  Rng rng(404);
  std::vector<FourierMode> fmodes = random_modes(rng, 2, 0.5, 4);
  std::vector<FourierMode> gmodes = random_modes(rng, 2, 0.5, 4);
  auto derived = [&](GridSpec grid) {
    ScalarField f = sample_modes(grid, fmodes, 1.0);
    ScalarField g = sample_modes(grid, gmodes, 0.5);
    return spectral_derivative(f * g, 2) + f * f * g;
  };
  CHECK(common_point_diff(derived(GridSpec::make(16)),
                          derived(GridSpec::make(32))) <= 1e-9);
}

TEST_CASE("series products and sums satisfy the ring laws") {
  GridSpec grid = GridSpec::make(8);

  SUBCASE("one times one") {
    SF one = constant_series(grid, {1.0}, 8);
    SF p = mul(one, one);
    CHECK(p.at(0).sup_norm() == 1.0);
    CHECK(p.sup_over(1, p.stored_top()) == 0.0);
  }

  SUBCASE("(1 + t)(1 - t) = 1 - t^2") {
    SF a = constant_series(grid, {1.0, 1.0}, 8);
    SF b = constant_series(grid, {1.0, -1.0}, 8);
    SF p = mul(a, b);
    CHECK(sup_diff(p.at(0), ScalarField::constant(grid, 1.0)) == 0.0);
    CHECK(p.at(1).sup_norm() == 0.0);
    CHECK(sup_diff(p.at(2), ScalarField::constant(grid, -1.0)) == 0.0);
  }

  SUBCASE("associativity and distributivity on random series") {
    Rng rng(505);
    auto rand_series = [&](int len) {
      SF s(ScalarField(grid), 0, len, 8);
      for (int k = 0; k < len; ++k) {
        s.stored_mut(k) = random_field(grid, rng, 2, 1.0, 3);
      }
      return s;
    };
    SF a = rand_series(4), b = rand_series(4), c = rand_series(4);
    SF ab_c = mul(mul(a, b), c);
    SF a_bc = mul(a, mul(b, c));
    SF dist_l = mul(a, b + c);
    SF dist_r = mul(a, b) + mul(a, c);
    int top = std::min(ab_c.stored_top(), a_bc.stored_top());
    for (int k = 0; k <= top; ++k) {
      CHECK(sup_diff(ab_c.at(k), a_bc.at(k)) <= 1e-12);
    }
    for (int k = 0; k <= std::min(dist_l.stored_top(), dist_r.stored_top());
         ++k) {
      CHECK(sup_diff(dist_l.at(k), dist_r.at(k)) <= 1e-12);
    }
  }
}

TEST_CASE("series calculus: t-derivative, shift, truncation, trust window") {
  GridSpec grid = GridSpec::make(8);
  SF s = constant_series(grid, {0.0, 0.0, 3.0}, 10);

  SF ds = tderiv(s);
  CHECK(sup_diff(ds.at(1), ScalarField::constant(grid, 6.0)) == 0.0);
  CHECK(ds.trusted_ceil() == 9);

  SF shifted = tshift(s, 2);
  CHECK(sup_diff(shifted.at(4), ScalarField::constant(grid, 3.0)) == 0.0);
  CHECK(shifted.trusted_ceil() == 12);

  SF cut = truncate(s, 1);
  CHECK(cut.trusted_ceil() == 1);
  CHECK_THROWS_AS((void)cut.at(2), Error);

  // Reading above the trusted ceiling is a hard error, not a zero.
  CHECK_THROWS_AS((void)s.at(11), Error);
  // Reading inside the window above the stored top is an exact zero.
  CHECK(s.at(10).sup_norm() == 0.0);
}

TEST_CASE("series product trust propagation") {
  GridSpec grid = GridSpec::make(8);
  SF exact = constant_series(grid, {1.0, 2.0}, kExactCeil);
  SF capped = constant_series(grid, {1.0, 1.0, 1.0}, 4);
  SF p = mul(exact, capped);
  CHECK(p.trusted_ceil() == 4);
  SF q = mul(exact, exact);
  CHECK(q.trusted_ceil() == kExactCeil);
}

TEST_CASE("series evaluation") {
  GridSpec grid = GridSpec::make(8);

  SF one_t2 = constant_series(grid, {1.0, 0.0, 1.0}, 8);
  CHECK(sup_diff(one_t2.evaluate(0.0), ScalarField::constant(grid, 1.0)) ==
        0.0);

  const int K = 9;
  std::vector<double> ones(static_cast<std::size_t>(K) + 1, 1.0);
  SF geo = constant_series(grid, ones, K);
  double t = 0.5;
  double closed = (1.0 - std::pow(t, K + 1)) / (1.0 - t);
  CHECK(sup_diff(geo.evaluate(t), ScalarField::constant(grid, closed)) <=
        1e-14);

  CHECK(ScalarField(grid).sup_norm() == 0.0);
}

TEST_CASE("laurent regularity gate") {
  GridSpec grid = GridSpec::make(8);

  SUBCASE("regular series passes unchanged") {
    SF s = constant_series(grid, {1.0, 2.0}, 6);
    SF out = laurent_assert_regular(s, 1e-12, "test");
    CHECK(out.floor() == 0);
    CHECK(sup_diff(out.at(1), ScalarField::constant(grid, 2.0)) == 0.0);
  }

  SUBCASE("negative orders below tolerance are stripped") {
    SF s(ScalarField(grid), -2, 5, 6);
    s.stored_mut(-1) = ScalarField::constant(grid, 1e-15);
    s.stored_mut(0) = ScalarField::constant(grid, 4.0);
    SF out = laurent_assert_regular(s, 1e-12, "test");
    CHECK(out.floor() >= 0);
    CHECK(sup_diff(out.at(0), ScalarField::constant(grid, 4.0)) == 0.0);
  }

  SUBCASE("a surviving pole is a hard failure carrying order and norm") {
    SF s(ScalarField(grid), -2, 4, 6);
    s.stored_mut(-1) = ScalarField::constant(grid, 1e-3);
    try {
      laurent_assert_regular(s, 1e-12, "test");
      FAIL("expected CancellationFailure");
    } catch (const CancellationFailure& e) {
      CHECK(e.order == -1);
      CHECK(e.norm == doctest::Approx(1e-3));
    }
  }
}

TEST_CASE("matrix series inverse") {
  GridSpec grid = GridSpec::make(8);

  SUBCASE("identity inverts to identity") {
    std::array<SF, 10> inv = metric4_inverse(identity4(grid), grid);
    for (int idx = 0; idx < 10; ++idx) {
      auto [a, b] = std::pair{kSym4Pairs[idx][0], kSym4Pairs[idx][1]};
      double want = (a == b) ? 1.0 : 0.0;
      CHECK(sup_diff(inv[static_cast<std::size_t>(idx)].at(0),
                     ScalarField::constant(grid, want)) <= 1e-15);
    }
  }

  SUBCASE("(1 - t) Id inverts to the geometric series") {
    std::array<SF, 10> g = identity4(grid);
    for (int idx = 0; idx < 10; ++idx) {
      auto [a, b] = std::pair{kSym4Pairs[idx][0], kSym4Pairs[idx][1]};
      SF s(ScalarField(grid), 0, 2, 6);
      s.stored_mut(0) = ScalarField::constant(grid, (a == b) ? 1.0 : 0.0);
      s.stored_mut(1) = ScalarField::constant(grid, (a == b) ? -1.0 : 0.0);
      g[static_cast<std::size_t>(idx)] = std::move(s);
    }
    std::array<SF, 10> inv = metric4_inverse(g, grid);
    for (int k = 0; k <= 6; ++k) {
      for (int idx = 0; idx < 10; ++idx) {
        auto [a, b] = std::pair{kSym4Pairs[idx][0], kSym4Pairs[idx][1]};
        double want = (a == b) ? 1.0 : 0.0;
        CHECK(sup_diff(inv[static_cast<std::size_t>(idx)].at(k),
                       ScalarField::constant(grid, want)) <= 1e-13);
      }
    }
  }

  SUBCASE("random positive leading term plus linear term multiplies back") {
    Rng rng(606);
    std::array<SF, 10> g = identity4(grid);
    for (int idx = 0; idx < 10; ++idx) {
      auto [a, b] = std::pair{kSym4Pairs[idx][0], kSym4Pairs[idx][1]};
      SF s(ScalarField(grid), 0, 2, 6);
      ScalarField lead = random_field(grid, rng, 2, 0.1, 2);
      if (a == b) lead += ScalarField::constant(grid, 1.0);
      s.stored_mut(0) = std::move(lead);
      s.stored_mut(1) = random_field(grid, rng, 2, 0.5, 2);
      g[static_cast<std::size_t>(idx)] = std::move(s);
    }
    std::array<SF, 10> inv = metric4_inverse(g, grid);
    Series<MatF<4>> prod =
        mul(to_matrix_series(g, grid), to_matrix_series(inv, grid));
    for (int k = 0; k <= prod.trusted_ceil(); ++k) {
      MatF<4> p = prod.at(k);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          double want = (k == 0 && a == b) ? 1.0 : 0.0;
          CHECK(sup_diff(p.at(a, b), ScalarField::constant(grid, want)) <=
                1e-11);
        }
      }
    }
  }

  SUBCASE("singular leading term reports the worst grid point") {
    std::array<SF, 10> g = identity4(grid);
    g[0] = SF::monomial(ScalarField(grid), 0);
    CHECK_THROWS_AS(metric4_inverse(g, grid), SingularMetric);
  }
}

TEST_CASE("parallel ranges cover every index exactly once") {
  std::vector<int> hits(10000, 0);
  parallel_ranges(hits.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) hits[i] += 1;
  });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("deterministic rng is stable across runs") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.u64() == b.u64());
  }
  Rng c(42);
  double first = c.unit();
  CHECK(first >= 0.0);
  CHECK(first < 1.0);
}
