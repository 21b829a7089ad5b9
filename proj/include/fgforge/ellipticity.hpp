#pragma once

#include <array>
#include <complex>
#include <vector>

namespace fgforge {

using Cplx = std::complex<double>;

// Polynomial in one complex variable z; c[k] multiplies z^k.
struct Poly {
  std::vector<Cplx> c;

  // Highest index with |coefficient| > tol, or -1 for the zero polynomial.
  int degree(double tol = 0.0) const;
  Cplx coeff(int k) const;
};

Cplx poly_eval(const Poly& p, Cplx z);
Poly poly_deriv(const Poly& p);
Poly poly_mul(const Poly& a, const Poly& b);
// Roots via the companion matrix; leading coefficient must be nonzero.
std::vector<Cplx> poly_roots(const Poly& p);

// A tangential covector at a boundary point, with the boundary metric at
// that point in symmetric storage (00,01,02,11,12,22).  The symbol
// assembly works in coordinates where the metric is euclidean; general
// metrics are handled by transforming xi with the inverse square root of
// the metric first.
struct CotangentDatum {
  std::array<double, 3> xi{};
  std::array<double, 6> metric{1.0, 0.0, 0.0, 1.0, 0.0, 1.0};
};

// Returns the equivalent euclidean datum (xi -> metric^{-1/2} xi).  Throws
// ConstraintViolation when the metric is not positive definite or the
// transformed covector vanishes.
CotangentDatum euclidean_reduction(const CotangentDatum& d);

// Length of xi in the datum's metric.
double covector_norm(const CotangentDatum& d);

// Leading boundary symbol: 20 boundary conditions (rows) acting on the 10
// metric components (columns).  Columns order the unknowns h_{ab} as the
// six tangential components (11,12,13,22,23,33) followed by (00,01,02,03).
// Rows come in four blocks of degrees (0,1,2,3): rows 0-5 identity on the
// tangential block, rows 6-9 first-order conditions on the (0a) block,
// rows 10-15 (z^2+|xi|^2) on the tangential block, rows 16-19 third-order
// conditions on the (0a) block.
struct SymbolMatrix {
  std::array<std::array<Poly, 10>, 20> entry;
  double xi_norm = 0.0;
};

// Column of the unknown h_{ab} in a SymbolMatrix (4d indices, 0 = normal).
int symbol_column(int a, int b);

// Product of the interior roots with positive imaginary part,
// (z - i|xi|)^20.
Poly interior_root_polynomial(const CotangentDatum& d);

SymbolMatrix assemble_boundary_symbol(const CotangentDatum& d);

// Replaces the third-order block (rows 16-19) with a copy of the
// first-order block (rows 6-9), producing a symbol that fails the
// complementing condition with a 4-dimensional kernel.
SymbolMatrix degenerate_variant(SymbolMatrix m);

// Outcome of the complementing (Lopatinski-Shapiro) test.  A row
// combination c annihilates the symbol modulo (z - i|xi|)^2 exactly when
// the 20x20 evaluation matrix (value and derivative at z = i|xi| of every
// column polynomial) maps c to zero; pass means that matrix has full rank.
// Rank is decided by singular values with relative threshold 1e-8; kernel
// holds a basis of annihilating combinations when the check fails.
struct ComplementingReport {
  bool pass = false;
  int rank = 0;
  double largest_singular = 0.0;
  double smallest_singular = 0.0;
  std::vector<std::array<Cplx, 20>> kernel;
};

ComplementingReport complementing_check(const SymbolMatrix& m);
ComplementingReport complementing_check(const CotangentDatum& d);

}  // namespace fgforge
