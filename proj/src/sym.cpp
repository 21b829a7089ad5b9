#include "fgforge/sym.hpp"

#include <Eigen/Dense>

#include "fgforge/parallel.hpp"

namespace fgforge {

SymForm SymForm::delta(GridSpec grid) {
  SymForm d(grid);
  d.comp(0, 0) = ScalarField::constant(grid, 1.0);
  d.comp(1, 1) = ScalarField::constant(grid, 1.0);
  d.comp(2, 2) = ScalarField::constant(grid, 1.0);
  return d;
}

namespace {

Eigen::Matrix3d mat_at(const SymForm& g, std::size_t p) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = g.c[sym3_index(i, j)][p];
  return m;
}

}  // namespace

double sym3_min_eigenvalue(const SymForm& g, std::size_t* argmin) {
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_p = 0;
  for (std::size_t p = 0; p < g.points(); ++p) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
    es.computeDirect(mat_at(g, p), Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues()(0);
    if (lo < worst) {
      worst = lo;
      worst_p = p;
    }
  }
  if (argmin) *argmin = worst_p;
  return worst;
}

void check_positive_definite(const SymForm& g, const std::string& what) {
  std::size_t p = 0;
  double lo = sym3_min_eigenvalue(g, &p);
  if (!(lo > 0.0)) {
    int n = g.grid().n;
    int i3 = static_cast<int>(p) % n;
    int i2 = static_cast<int>(p / n) % n;
    int i1 = static_cast<int>(p / (static_cast<std::size_t>(n) * n));
    throw ConstraintViolation(
        what + ": not positive definite at grid point (" +
        std::to_string(i1) + "," + std::to_string(i2) + "," +
        std::to_string(i3) + "), min eigenvalue " + std::to_string(lo));
  }
}

SymForm sym3_inverse_pointwise(const SymForm& g) {
  SymForm inv(g.grid());
  const std::size_t np = g.points();
  bool singular = false;
  parallel_ranges(np, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      Eigen::Matrix3d m = mat_at(g, p);
      double det = m.determinant();
      if (std::abs(det) < 1e-300) {
        singular = true;
        return;
      }
      Eigen::Matrix3d mi = m.inverse();
      for (int k = 0; k < 6; ++k) {
        inv.c[k][p] = mi(kSym3Pairs[k][0], kSym3Pairs[k][1]);
      }
    }
  });
  if (singular) {
    throw SingularMetric("tangential metric is singular at a grid point");
  }
  return inv;
}

ScalarField sym3_trace(const SymForm& a, const SymForm& ginv) {
  ScalarField tr(a.grid());
  for (int k = 0; k < 6; ++k) {
    for (std::size_t p = 0; p < tr.size(); ++p) {
      tr[p] += kSym3Weight[k] * ginv.c[k][p] * a.c[k][p];
    }
  }
  return tr;
}

}  // namespace fgforge
