#include "fgforge/expansion.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fgforge/parallel.hpp"
#include "fgforge/rng.hpp"

namespace fgforge {

namespace {

std::string fmt_norm(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

// Random band-limited scalar field used by the affinity audit.
ScalarField random_probe_field(GridSpec grid, Rng& rng) {
  std::vector<FourierMode> modes;
  for (int m = 0; m < 3; ++m) {
    FourierMode fm;
    fm.k = {rng.uniform_int(-2, 2), rng.uniform_int(-2, 2),
            rng.uniform_int(-2, 2)};
    fm.amp_cos = rng.sym();
    fm.amp_sin = rng.sym();
    modes.push_back(fm);
  }
  return sample_modes(grid, modes, rng.sym());
}

struct OrderSolve {
  SymForm gk;
  SolveStep step;
};

// Probes the affine model of the order-k residual map around `base` (orders
// below k in place, order-k slot zero) and solves the pointwise 10x6 system
// in least squares. Right-hand side components outside the column space
// (the constraint rows, which no insertion can reach at this order) are
// reported in obstruction_norm, not forced.
OrderSolve probe_and_solve(const Series<SymForm>& base, int k, int eps,
                           const ExpandOptions& opt, Rng& rng,
                           bool allow_rank_deficient) {
  const GridSpec grid = base.proto().grid();
  const std::size_t np = grid.points();
  ResidualOptions ropt;
  ropt.laurent_tol = opt.laurent_tol;
  auto residual_at = [&](const Series<SymForm>& g) -> Sym4F {
    return einstein_residual(BulkMetric{eps, truncate(g, k)}, ropt).at(k);
  };

  OrderSolve os{SymForm(grid), {}};
  SolveStep& step = os.step;
  step.order = k;

  Sym4F b = residual_at(base);

  // Probe the pointwise map: column m is the response to a unit constant
  // insertion of stored component m at order k.
  std::array<Sym4F, 6> cols;
  for (int m = 0; m < 6; ++m) {
    Series<SymForm> probe = base;
    probe.stored_mut(k).c[m] = ScalarField::constant(grid, 1.0);
    cols[m] = residual_at(probe);
    cols[m] -= b;
  }

  // Affinity audit: the probed model must reproduce the residual of one
  // constant and one spatially varying insertion, in all ten components.
  {
    SymForm vc(grid), vf(grid);
    for (int m = 0; m < 6; ++m) {
      vc.c[m] = ScalarField::constant(grid, rng.sym());
      vf.c[m] = random_probe_field(grid, rng);
    }
    for (const SymForm* v : {&vc, &vf}) {
      Sym4F predicted = b;
      for (int m = 0; m < 6; ++m) {
        for (int idx = 0; idx < 10; ++idx) {
          predicted.c[idx].madd(v->c[m], cols[m].c[idx]);
        }
      }
      Series<SymForm> probe = base;
      probe.stored_mut(k) += *v;
      Sym4F actual = residual_at(probe);
      step.affinity_error =
          std::max(step.affinity_error, sup_diff(predicted, actual));
    }
    if (step.affinity_error > 1e-9) {
      throw CancellationFailure(
          k, step.affinity_error,
          "order-" + std::to_string(k) +
              " residual map deviates from pointwise affine (sup " +
              fmt_norm(step.affinity_error) + ")");
    }
  }

  // Solve the pointwise least-squares system over all ten residual
  // components. The tangential rows alone go exactly singular in the
  // trace channel at order six; the normal row carries the trace
  // information there. Order 3 is rank-deficient by construction: take
  // the minimum-norm solution and record how much of the right-hand
  // side the column space cannot match.
  ScalarField ratio_field(grid);
  ScalarField obstruction_field(grid);
  SymForm& gk = os.gk;
  parallel_ranges(np, [&](std::size_t pb, std::size_t pe) {
    Eigen::Matrix<double, 10, 6> A;
    Eigen::Matrix<double, 10, 1> rhs;
    for (std::size_t p = pb; p < pe; ++p) {
      for (int r = 0; r < 10; ++r) {
        int a = kSym4Pairs[r][0], c = kSym4Pairs[r][1];
        for (int m = 0; m < 6; ++m) A(r, m) = cols[m].comp(a, c)[p];
        rhs(r) = -b.comp(a, c)[p];
      }
      Eigen::JacobiSVD<Eigen::Matrix<double, 10, 6>> svd(
          A, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      double smax = sv(0);
      ratio_field[p] = (smax > 0.0) ? sv(5) / smax : 0.0;
      Eigen::Matrix<double, 6, 1> inv_sv;
      for (int r = 0; r < 6; ++r) {
        inv_sv(r) =
            (sv(r) > opt.rank_threshold * smax) ? 1.0 / sv(r) : 0.0;
      }
      Eigen::Matrix<double, 6, 1> x =
          svd.matrixV() * inv_sv.asDiagonal() *
          (svd.matrixU().leftCols<6>().transpose() * rhs);
      obstruction_field[p] = (A * x - rhs).cwiseAbs().maxCoeff();
      for (int m = 0; m < 6; ++m) gk.c[m][p] = x(m);
    }
  });
  double min_ratio = std::numeric_limits<double>::infinity();
  for (double v : ratio_field.data()) min_ratio = std::min(min_ratio, v);
  step.min_singular_ratio = min_ratio;
  step.obstruction_norm = obstruction_field.sup_norm();

  if (!allow_rank_deficient && min_ratio < opt.rank_threshold) {
    throw SingularIndicial(
        k, "pointwise system at order " + std::to_string(k) +
               " is singular (min singular-value ratio " +
               fmt_norm(min_ratio) + ")");
  }
  return os;
}

}  // namespace

void validate_tt(const SymForm& gamma, const SymForm& sigma, double tol) {
  Boundary3Curvature bc = boundary_curvature(gamma);
  double tr_sup = trace3(bc, sigma).sup_norm();
  if (tr_sup > tol) {
    throw ConstraintViolation(
        "third-order datum has nonzero trace: sup " + fmt_norm(tr_sup) +
            " exceeds tolerance " + fmt_norm(tol),
        tr_sup);
  }
  auto div = divergence3(bc, sigma);
  double div_sup = 0.0;
  for (const auto& f : div) div_sup = std::max(div_sup, f.sup_norm());
  if (div_sup > tol) {
    throw ConstraintViolation(
        "third-order datum has nonzero divergence: sup " + fmt_norm(div_sup) +
            " exceeds tolerance " + fmt_norm(tol),
        div_sup);
  }
}

SymForm compute_g2(const Boundary3Curvature& bc) {
  SymForm g2 = bc.ricci3;
  for (int idx = 0; idx < 6; ++idx) {
    ScalarField term(bc.grid);
    term.madd(bc.scalar3, bc.metric.c[idx]);
    g2.c[idx].add_scaled(-0.25, term);
    g2.c[idx] *= -1.0;
  }
  return g2;
}

G2Resolution resolve_g2(const SymForm& gamma, const SymForm& g2_actual) {
  Boundary3Curvature bc = boundary_curvature(gamma);
  SymForm full = compute_g2(bc);
  SymForm half = bc.ricci3;
  for (int idx = 0; idx < 6; ++idx) {
    ScalarField term(bc.grid);
    term.madd(bc.scalar3, bc.metric.c[idx]);
    half.c[idx].add_scaled(-0.25, term);
    half.c[idx] *= -0.5;
  }
  G2Resolution out;
  out.full_reading_sup = sup_diff(g2_actual, full);
  out.half_reading_sup = sup_diff(g2_actual, half);
  out.selected = (out.full_reading_sup <= out.half_reading_sup)
                     ? "ricci_minus_quarter_scalar"
                     : "half_ricci_minus_eighth_scalar";
  return out;
}

FGExpansion expand(const BoundaryData& bd, const ExpandOptions& opt) {
  const GridSpec grid = bd.gamma.grid();
  const int K = bd.order;
  if (K < 3) {
    throw ConstraintViolation("expansion order must be at least 3, got " +
                              std::to_string(K));
  }
  if (opt.eps != 1 && opt.eps != -1) {
    throw ConstraintViolation("signature eps must be +1 or -1");
  }
  check_positive_definite(bd.gamma, "boundary metric");
  validate_tt(bd.gamma, bd.sigma, bd.tt_tol);

  ResidualOptions ropt;
  ropt.laurent_tol = opt.laurent_tol;
  Rng rng(0x66676667u);

  // Working series through order K; unsolved orders are zero placeholders,
  // which is exactly the base point of the affine order-k residual map.
  Series<SymForm> cur(SymForm(grid), 0, K + 1, K);
  cur.stored_mut(0) = bd.gamma;

  FGExpansion out{BulkMetric{opt.eps, cur}, {}, {}, 0.0, 0};

  auto residual_at = [&](const Series<SymForm>& g, int k) -> Sym4F {
    return einstein_residual(BulkMetric{opt.eps, truncate(g, k)}, ropt).at(k);
  };

  const double tol3 = std::max(opt.residual_tol, 10.0 * bd.tt_tol);
  for (int k = 2; k <= K; ++k) {
    Series<SymForm> base = truncate(cur, k);
    OrderSolve os = probe_and_solve(base, k, opt.eps, opt, rng, k == 3);
    SolveStep step = std::move(os.step);

    if (k == 3) {
      if (step.obstruction_norm > tol3) {
        throw ConstraintViolation(
            "order-3 right-hand side has components outside the solvable "
            "range: sup " + fmt_norm(step.obstruction_norm),
            step.obstruction_norm);
      }
      os.gk += bd.sigma;
    }
    cur.stored_mut(k) = std::move(os.gk);
    step.coefficient_sup = cur.stored(k).sup_norm();
    step.residual_sup_after = residual_at(cur, k).sup_norm();
    if (k == 3 && step.residual_sup_after > tol3) {
      throw ConstraintViolation(
          "third-order datum leaves an order-3 residual: sup " +
              fmt_norm(step.residual_sup_after),
          step.residual_sup_after);
    }
    out.steps.push_back(std::move(step));
  }

  out.g2 = resolve_g2(bd.gamma, cur.stored(2));

  out.metric = BulkMetric{opt.eps, cur};
  auto ehat = einstein_residual(out.metric, ropt);
  out.residual_checked_through = K - 3;
  out.residual_sup = ehat.sup_over(2, K - 1);
  if (out.residual_sup > opt.residual_tol) {
    throw CancellationFailure(
        K - 3, out.residual_sup,
        "final residual through order " + std::to_string(K - 3) +
            " has sup " + fmt_norm(out.residual_sup) +
            " (tolerance " + fmt_norm(opt.residual_tol) + ")");
  }
  return out;
}

SymForm solve_order(const BulkMetric& partial, int k, const ExpandOptions& opt,
                    SolveStep* diag) {
  if (k < 2) {
    throw ConstraintViolation("solve_order needs k >= 2, got " +
                              std::to_string(k));
  }
  const GridSpec grid = partial.grid();
  Series<SymForm> base(SymForm(grid), 0, k + 1,
                       std::max(partial.g.trusted_ceil(), k));
  const int top = std::min(partial.g.stored_top(), k - 1);
  for (int m = 0; m <= top; ++m) base.stored_mut(m) = partial.g.at(m);
  Rng rng(0x66676667u);
  OrderSolve os = probe_and_solve(base, k, partial.eps, opt, rng, false);
  if (diag) *diag = os.step;
  return std::move(os.gk);
}

BulkMetric wick_rotate(const BulkMetric& bm) {
  Series<SymForm> g = bm.g;
  for (int k = g.floor(); k <= g.stored_top(); ++k) {
    int flips = (k / 2) % 2;
    if (flips) g.stored_mut(k) *= -1.0;
  }
  return BulkMetric{-bm.eps, std::move(g)};
}

}  // namespace fgforge
