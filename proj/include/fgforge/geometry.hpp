// Curvature engine for metrics of the form eps*dt^2 + g_t(x) dx^i dx^j on
// [0,T) x T^3, with g_t a power series in t. All curvature outputs are
// series whose trusted ceilings are derived from the input's.
#pragma once

#include <array>

#include "fgforge/series.hpp"
#include "fgforge/sym.hpp"

namespace fgforge {

using SF = Series<ScalarField>;

// Antisymmetric index pairs (a < b) for lowered curvature storage.
inline constexpr int kPair4[6][2] = {{0, 1}, {0, 2}, {0, 3},
                                     {1, 2}, {1, 3}, {2, 3}};
constexpr int pair4_index(int a, int b) {
  // a < b required.
  return 3 * a - a * (a - 1) / 2 + (b - a - 1);
}
// Storage index for symmetric pair-of-pairs (p <= q) of 6 values.
constexpr int pairpair_index(int p, int q) {
  return (p <= q) ? 6 * p - p * (p - 1) / 2 + (q - p)
                  : 6 * q - q * (q - 1) / 2 + (p - q);
}

// Compactified product-form metric. eps = +1 is Riemannian dt^2 + g_t,
// eps = -1 is Lorentzian -dt^2 + g_t. g has floor 0; g.at(0) is the
// boundary metric and must be positive definite.
struct BulkMetric {
  int eps = +1;
  Series<SymForm> g;

  const GridSpec& grid() const { return g.proto().grid(); }
  int order() const { return g.trusted_ceil(); }
};

// Validates shape, finiteness, and positivity of the boundary term.
BulkMetric make_bulk_metric(int eps, Series<SymForm> g);

// Series conversions between tensor-of-series and series-of-tensors.
std::array<SF, 6> split_components(const Series<SymForm>& s);
Series<SymForm> join_components(const std::array<SF, 6>& c);
std::array<SF, 10> split_components4(const Series<Sym4F>& s);
Series<Sym4F> join_components4(const std::array<SF, 10>& c);

// Full 4-metric components of the compactified metric, plus its inverse
// series (computed order by order from the pointwise inverse at t = 0).
struct Metric4Series {
  GridSpec grid;
  std::array<SF, 10> g;
  std::array<SF, 10> ginv;
};
Metric4Series compact_metric(const BulkMetric& bm);

// General symmetric series 4-metric (regular, invertible at t = 0).
Metric4Series make_metric4(std::array<SF, 10> comps, GridSpec grid);

// Inverse of a general symmetric 4x4 metric series with invertible leading
// term. Throws SingularMetric when the t = 0 matrix is degenerate.
std::array<SF, 10> metric4_inverse(const std::array<SF, 10>& g,
                                   GridSpec grid);

// Christoffel symbols Gamma^a_{bc}, stored as chr[a * 10 + sym4_index(b,c)].
std::array<SF, 40> christoffel4(const Metric4Series& m);

// Ricci tensor directly from Christoffel symbols (no Riemann storage).
std::array<SF, 10> ricci4(const std::array<SF, 40>& chr, GridSpec grid);

SF scalar_curvature(const std::array<SF, 10>& ric,
                    const std::array<SF, 10>& ginv, GridSpec grid);

// Lowered Riemann tensor R_{abcd}, stored by antisymmetric pairs:
// riem[pairpair_index(pair4_index(a,b), pair4_index(c,d))].
std::array<SF, 21> riemann4(const Metric4Series& m,
                            const std::array<SF, 40>& chr);

// Weyl tensor, same storage as riemann4.
std::array<SF, 21> weyl4(const Metric4Series& m,
                         const std::array<SF, 21>& riem,
                         const std::array<SF, 10>& ric, const SF& scal);

struct CurvatureBundle {
  GridSpec grid;
  int eps = +1;
  Metric4Series metric;
  std::array<SF, 40> chr;
  std::array<SF, 10> ric;
  SF scal;
  std::array<SF, 21> riem;
  std::array<SF, 21> weyl;
  // Sup norms of identities that the storage scheme does not enforce.
  double first_bianchi_sup = 0.0;
  double weyl_trace_sup = 0.0;
  double ricci_consistency_sup = 0.0;
};

// Computes the full curvature package of a general series 4-metric and
// evaluates the internal consistency checks.
CurvatureBundle curvature_of(Metric4Series m);

// Convenience wrapper for the compactified product-form metric.
CurvatureBundle curvature4(const BulkMetric& bm);

// Bach tensor assembled as B_ab = (delta^D d^D P)_ab + W_{acbd} Ric^{cd}
// with P = Ric - (s/6) g, where d^D is the exterior covariant derivative
// on cotangent-valued 1-forms and delta^D its formal adjoint. Conformally
// Einstein metrics are Bach-flat; the sign pairing of the two terms is
// pinned by that property on a non-conformally-flat example.
std::array<SF, 10> bach_tensor(const CurvatureBundle& cb);

// Divergence (delta h)_a = -g^{bc} D_b h_{ca}, metric trace g^{ab} h_ab,
// and the Bianchi operator beta(h) = delta h + (1/2) d(tr h), all taken
// with respect to the metric carried by the bundle.
std::array<SF, 4> divergence_op(const CurvatureBundle& cb,
                                const std::array<SF, 10>& h);
SF trace_op(const CurvatureBundle& cb, const std::array<SF, 10>& h);
std::array<SF, 4> bianchi_op(const CurvatureBundle& cb,
                             const std::array<SF, 10>& h);

struct ResidualOptions {
  // Tolerance for the Laurent coefficients (orders -2 and -1 of the
  // undressed residual) that must cancel.
  double laurent_tol = 1e-10;
};

// Einstein residual of the AH metric g = t^{-2}(eps dt^2 + g_t), dressed by
// t^2: returns E(t) = t^2 (Ric_g + 3 eps g), so eps = +1 targets Ric = -3g
// and eps = -1 targets Ric = +3g. Floor 0; the residual at order m is
// E.at(m + 2); trusted through order() - 2 in residual counting.
Series<Sym4F> einstein_residual(const BulkMetric& bm,
                                const ResidualOptions& opt = {});

// Residual-order accessors (order m of the undressed residual).
Sym4F residual_order(const Series<Sym4F>& ehat, int m);
int residual_trusted_order(const Series<Sym4F>& ehat);

// Sectional curvatures of the AH metric at parameter value t > 0 for the
// six coordinate planes, ordered like kPair4. Riemannian metrics only.
std::array<ScalarField, 6> sectional_curvatures(const BulkMetric& bm,
                                                double t);

// Reinterprets the stored coefficients as an exact polynomial metric whose
// higher coefficients are identically zero, working to the given ceiling.
// Curvature of that polynomial evaluated at numeric t is then accurate past
// the truncation order, which is what the decay audits below measure.
BulkMetric as_exact_polynomial(const BulkMetric& bm, int work_ceiling);

// Least-squares slope of log ||Ric_g + 3 eps g|| against log t over the
// sample values, computed from the exact polynomial reinterpretation with
// `headroom` extra orders. This is the observed vanishing order of the
// Einstein residual of the truncated metric.
double residual_order_fit(const BulkMetric& bm, const std::vector<double>& ts,
                          int headroom = 6);

// Decay audit for sup over coordinate planes of |K + 1| at the sample t
// values: returns the fitted slope (quadratic or faster for expansions of
// Einstein metrics), or +infinity when the sups are below `floor_tol`.
double sectional_decay_fit(const BulkMetric& bm, const std::vector<double>& ts,
                           double floor_tol = 1e-13);

}  // namespace fgforge
