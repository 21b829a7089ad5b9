// Symmetric tensor fields on the grid: 3x3 (tangential) and 4x4 (spacetime)
// component arrays, plus dense NxN matrix fields for series inversion.
#pragma once

#include <array>

#include "fgforge/grid.hpp"

namespace fgforge {

// Component order (upper triangle, row major):
//   Sym3: 11 12 13 22 23 33           (axes 1..3; 0-based storage pairs)
//   Sym4: 00 01 02 03 11 12 13 22 23 33   (index 0 = t)
inline constexpr int kSym3Pairs[6][2] = {{0, 0}, {0, 1}, {0, 2},
                                         {1, 1}, {1, 2}, {2, 2}};
inline constexpr int kSym4Pairs[10][2] = {{0, 0}, {0, 1}, {0, 2}, {0, 3},
                                          {1, 1}, {1, 2}, {1, 3},
                                          {2, 2}, {2, 3}, {3, 3}};
// Multiplicity of each stored component in a full index sum.
inline constexpr double kSym3Weight[6] = {1, 2, 2, 1, 2, 1};
inline constexpr double kSym4Weight[10] = {1, 2, 2, 2, 1, 2, 2, 1, 2, 1};

constexpr int sym3_index(int i, int j) {
  return (i <= j) ? i * (5 - i) / 2 + j : j * (5 - j) / 2 + i;
}
constexpr int sym4_index(int a, int b) {
  return (a <= b) ? a * (7 - a) / 2 + b : b * (7 - b) / 2 + a;
}

namespace detail {

template <int N>
struct SymField {
  static constexpr int kComps = N;
  std::array<ScalarField, N> c;

  SymField() = default;
  explicit SymField(GridSpec grid) {
    for (auto& f : c) f = ScalarField(grid);
  }

  const GridSpec& grid() const { return c[0].grid(); }
  std::size_t points() const { return c[0].size(); }

  static SymField zeros_like(const SymField& o) {
    return SymField(o.grid());
  }
  void add_scaled(double s, const SymField& o) {
    for (int i = 0; i < N; ++i) c[i].add_scaled(s, o.c[i]);
  }
  void scale(double s) {
    for (auto& f : c) f *= s;
  }
  double sup_norm() const {
    double m = 0.0;
    for (const auto& f : c) m = std::max(m, f.sup_norm());
    return m;
  }
  bool is_finite() const {
    for (const auto& f : c)
      if (!f.is_finite()) return false;
    return true;
  }

  SymField& operator+=(const SymField& o) {
    add_scaled(1.0, o);
    return *this;
  }
  SymField& operator-=(const SymField& o) {
    add_scaled(-1.0, o);
    return *this;
  }
  SymField& operator*=(double s) {
    scale(s);
    return *this;
  }
};

}  // namespace detail

// Tangential symmetric 2-tensor field (6 components).
struct SymForm : detail::SymField<6> {
  SymForm() = default;
  explicit SymForm(GridSpec grid) : SymField<6>(grid) {}

  ScalarField& comp(int i, int j) { return c[sym3_index(i, j)]; }
  const ScalarField& comp(int i, int j) const { return c[sym3_index(i, j)]; }

  static SymForm zeros_like(const SymForm& o) { return SymForm(o.grid()); }
  static SymForm zeros(GridSpec grid) { return SymForm(grid); }
  static SymForm delta(GridSpec grid);
};

// Spacetime symmetric 2-tensor field (10 components).
struct Sym4F : detail::SymField<10> {
  Sym4F() = default;
  explicit Sym4F(GridSpec grid) : SymField<10>(grid) {}

  ScalarField& comp(int a, int b) { return c[sym4_index(a, b)]; }
  const ScalarField& comp(int a, int b) const { return c[sym4_index(a, b)]; }

  static Sym4F zeros_like(const Sym4F& o) { return Sym4F(o.grid()); }
  static Sym4F zeros(GridSpec grid) { return Sym4F(grid); }
};

inline double sup_diff(const SymForm& a, const SymForm& b) {
  double m = 0.0;
  for (int i = 0; i < 6; ++i) m = std::max(m, sup_diff(a.c[i], b.c[i]));
  return m;
}
inline double sup_diff(const Sym4F& a, const Sym4F& b) {
  double m = 0.0;
  for (int i = 0; i < 10; ++i) m = std::max(m, sup_diff(a.c[i], b.c[i]));
  return m;
}

// Dense NxN matrix field; madd is the pointwise matrix product, so a
// Series<MatF<N>> multiplies as a matrix-valued series.
template <int N>
struct MatF {
  std::array<ScalarField, N * N> e;

  MatF() = default;
  explicit MatF(GridSpec grid) {
    for (auto& f : e) f = ScalarField(grid);
  }
  const GridSpec& grid() const { return e[0].grid(); }

  ScalarField& at(int r, int col) { return e[r * N + col]; }
  const ScalarField& at(int r, int col) const { return e[r * N + col]; }

  static MatF zeros_like(const MatF& o) { return MatF(o.grid()); }
  void add_scaled(double s, const MatF& o) {
    for (int i = 0; i < N * N; ++i) e[i].add_scaled(s, o.e[i]);
  }
  void scale(double s) {
    for (auto& f : e) f *= s;
  }
  void madd(const MatF& a, const MatF& b) {
    for (int r = 0; r < N; ++r)
      for (int col = 0; col < N; ++col)
        for (int k = 0; k < N; ++k) at(r, col).madd(a.at(r, k), b.at(k, col));
  }
  double sup_norm() const {
    double m = 0.0;
    for (const auto& f : e) m = std::max(m, f.sup_norm());
    return m;
  }
};

// Throws ConstraintViolation (reporting the worst grid point and its
// minimum eigenvalue) unless every pointwise 3x3 matrix is positive
// definite.
void check_positive_definite(const SymForm& g, const std::string& what);

// Pointwise inverse of a 3x3 symmetric matrix field.
SymForm sym3_inverse_pointwise(const SymForm& g);

// gamma^{ij} a_{ij} with the inverse supplied as a SymForm.
ScalarField sym3_trace(const SymForm& a, const SymForm& ginv);

// Pointwise min over the grid of the smallest eigenvalue (3x3 symmetric).
double sym3_min_eigenvalue(const SymForm& g, std::size_t* argmin = nullptr);

}  // namespace fgforge
