#pragma once

#include "fgforge/geometry.hpp"

namespace fgforge {

// Linearization of the Einstein operator about an asymptotically hyperbolic
// background g = t^{-2} gbar.
//
// Perturbations are stored in the compactified frame: a Perturbation with
// components k describes the metric variation kappa = t^{-2} k of g.  The
// declared weight is the t-order of the first nonvanishing coefficient of k.
//
// All operators return t^2 times the named tensor, again in compactified
// components, so their outputs live in the same frame as einstein_residual:
// for a background with residual Ehat(s) = einstein_residual(g + s k),
//   2 * d/ds Ehat(s) |_{s=0}  =  linearized_einstein(bg, p).
struct Perturbation {
  Series<Sym4F> k;
  int weight = 0;
};

// Sentinel for a series with no coefficient above tolerance.
inline constexpr int kOrderInfinite = 1 << 27;

// First stored order whose coefficient sup-norm exceeds tol, or
// kOrderInfinite when every stored coefficient is below it.
int leading_order(const Series<Sym4F>& s, double tol = 1e-12);

// Throws ConstraintViolation when the declared weight disagrees with the
// first nonvanishing coefficient of k (tolerance 1e-12), or when k has no
// such coefficient at all.
void validate_weight(const Perturbation& p);

// Background data for the linearized operators: the Laurent-series
// Christoffel symbols and lowered curvature of the singular metric
// g = t^{-2} gbar, plus the compactified metric used for traces.
// Requires the hyperbolic sign convention (eps = +1); the closed forms
// below use Ric(g) = -3g.
struct AhBackground {
  GridSpec grid;
  Metric4Series compact;
  std::array<SF, 10> g;
  std::array<SF, 10> ginv;
  std::array<SF, 40> chr;
  std::array<SF, 21> riem;
};

AhBackground ah_background(const BulkMetric& bm);

// t^2 L_E(kappa) with L_E = D*D - 2 Rcirc - 2 delta* beta, the derivative
// of kappa -> 2(Ric(g + s kappa) + 3(g + s kappa)) on an Einstein
// background.  D*D is the connection Laplacian -g^{cd} nabla_c nabla_d,
// (Rcirc kappa)_ab = R_{acbd} kappa^{cd}, beta(h) = div h + (1/2) d tr h,
// and delta* is the symmetrized covariant derivative.
Series<Sym4F> linearized_einstein(const AhBackground& bg,
                                  const Perturbation& p);

// t^2 (D*D - 2 Rcirc) kappa, the operator with the gauge term removed.
Series<Sym4F> gauged_operator(const AhBackground& bg, const Perturbation& p);

// t^2 (-2 delta* beta) kappa, the gauge term itself, so that
// linearized_einstein = gauged_operator + bianchi_gauge_term holds
// identically.
Series<Sym4F> bianchi_gauge_term(const AhBackground& bg,
                                 const Perturbation& p);

// Trace against the singular metric of a dressed operator value: for an
// input t^2 X this returns tr_g X = gbar^{ab} (t^2 X)_{ab}.  Applied to a
// perturbation's components it yields tr_g kappa.
SF ah_trace(const AhBackground& bg, const Series<Sym4F>& dressed);

// Scalar Laplacian Delta_g f = g^{cd}(d_c d_d f - Gamma^e_{cd} d_e f) of the
// singular metric; regular inputs give regular outputs because the 1/t
// Christoffel terms pair with the t^2 in g^{cd}.
SF ah_scalar_laplacian(const AhBackground& bg, const SF& f);

// Leading t-orders of the tangential (ij) and normal (00, 0i) blocks of a
// component series, each kOrderInfinite when the block is below tol through
// the stored range.
struct DecayReport {
  int tangential_order = kOrderInfinite;
  int normal_order = kOrderInfinite;
};

DecayReport decay_diagnostic(const Series<Sym4F>& s, double tol = 1e-12);

// Embeds a tangential two-tensor series as a 4d perturbation with vanishing
// normal components.
Perturbation embed_tangential(const Series<SymForm>& h, int weight);

// Symmetric difference quotient of the einstein residual in the direction
// p.k: [Ehat(g + s k) - Ehat(g - s k)] / (2 s).  The perturbation must be
// tangential (vanishing 00 and 0i components); its tangential block is added
// to the bulk metric directly.
Series<Sym4F> residual_fd(const BulkMetric& bm, const Perturbation& p,
                          double s, const ResidualOptions& opt = {});

}  // namespace fgforge
