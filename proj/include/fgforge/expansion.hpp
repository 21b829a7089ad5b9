#pragma once

#include <string>
#include <vector>

#include "fgforge/boundary.hpp"
#include "fgforge/geometry.hpp"

namespace fgforge {

// Boundary data for the expansion: the conformal representative gamma and
// the free third-order coefficient sigma, which must be trace-free and
// divergence-free with respect to gamma up to tt_tol.
struct BoundaryData {
  SymForm gamma;
  SymForm sigma;
  int order = 6;
  double tt_tol = 1e-10;
};

// Throws ConstraintViolation (carrying the measured norm) unless sigma is
// transverse-traceless with respect to gamma.
void validate_tt(const SymForm& gamma, const SymForm& sigma, double tol);

// Closed-form second-order coefficient -(Ric_gamma - (s_gamma/4) gamma).
SymForm compute_g2(const Boundary3Curvature& bc);

// Diagnostics for one order of the solve.
struct SolveStep {
  int order = 0;
  // Sup mismatch between the probed affine model of the order-k residual
  // map and two direct evaluations (one constant, one spatially varying
  // insertion). Large values mean the map is not pointwise affine and the
  // solve would be invalid, so they abort the run.
  double affinity_error = 0.0;
  // Min over grid points of sigma_min/sigma_max of the pointwise 10x6
  // system. Near zero only at order 3, where the kernel carries the free
  // datum.
  double min_singular_ratio = 0.0;
  // Sup of the part of the right-hand side that the least-squares solve
  // cannot match. At order 3 this is the constraint obstruction and is
  // gated; elsewhere it only carries aliasing noise and is diagnostic.
  double obstruction_norm = 0.0;
  double coefficient_sup = 0.0;
  // Residual coefficient at this order after insertion (solver accuracy).
  double residual_sup_after = 0.0;
};

// Mismatch of the solved second-order coefficient against two candidate
// closed forms; `selected` names the smaller one. The expected winner is
// the full-Ricci form -(Ric - (s/4) gamma); the half-Ricci variant
// -(1/2)Ric + (s/8) gamma coincides with it only for Ricci-flat gamma.
struct G2Resolution {
  double full_reading_sup = 0.0;
  double half_reading_sup = 0.0;
  std::string selected;
};

// Compares a second-order coefficient against both candidate closed forms
// for the given boundary metric and names the closer one.
G2Resolution resolve_g2(const SymForm& gamma, const SymForm& g2_actual);

struct FGExpansion {
  BulkMetric metric;
  std::vector<SolveStep> steps;
  G2Resolution g2;
  // Sup over residual orders 0..order-3 of the final coefficient norms
  // (asserted <= residual_tol) and the range that was checked.
  double residual_sup = 0.0;
  int residual_checked_through = 0;
};

struct ExpandOptions {
  int eps = +1;
  double residual_tol = 1e-9;
  double rank_threshold = 1e-8;
  double laurent_tol = 1e-10;
};

FGExpansion expand(const BoundaryData& bd, const ExpandOptions& opt = {});

// Solves for the order-k coefficient given a metric whose coefficients are
// known through order k-1. Probes the affine order-k residual map with
// constant fields, then inverts it pointwise in least squares. Throws
// SingularIndicial at any rank-deficient order; k = 3 always lands there,
// because the third-order coefficient is free data rather than determined.
SymForm solve_order(const BulkMetric& partial, int k,
                    const ExpandOptions& opt = {}, SolveStep* diag = nullptr);

// Maps a solved expansion to the opposite signature: coefficient k picks
// up the factor (-1)^(k/2 rounded down) and eps flips sign.
BulkMetric wick_rotate(const BulkMetric& bm);

}  // namespace fgforge
