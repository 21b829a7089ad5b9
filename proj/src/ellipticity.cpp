#include "fgforge/ellipticity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fgforge/errors.hpp"
#include "fgforge/sym.hpp"

namespace fgforge {

namespace {

Poly constant(Cplx v) { return {{v}}; }

Poly zero_poly() { return {}; }

// z^k with unit coefficient.
Poly zpow(int k) {
  Poly p;
  p.c.assign(static_cast<std::size_t>(k) + 1, Cplx(0.0, 0.0));
  p.c.back() = Cplx(1.0, 0.0);
  return p;
}

Poly padd(const Poly& a, const Poly& b) {
  Poly out;
  out.c.resize(std::max(a.c.size(), b.c.size()), Cplx(0.0, 0.0));
  for (std::size_t k = 0; k < a.c.size(); ++k) out.c[k] += a.c[k];
  for (std::size_t k = 0; k < b.c.size(); ++k) out.c[k] += b.c[k];
  return out;
}

Poly pscale(Poly a, Cplx s) {
  for (auto& v : a.c) v *= s;
  return a;
}

}  // namespace

int Poly::degree(double tol) const {
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
    if (std::abs(c[static_cast<std::size_t>(k)]) > tol) return k;
  }
  return -1;
}

Cplx Poly::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(c.size())) return {0.0, 0.0};
  return c[static_cast<std::size_t>(k)];
}

Cplx poly_eval(const Poly& p, Cplx z) {
  Cplx acc(0.0, 0.0);
  for (std::size_t k = p.c.size(); k-- > 0;) acc = acc * z + p.c[k];
  return acc;
}

Poly poly_deriv(const Poly& p) {
  Poly out;
  if (p.c.size() <= 1) return out;
  out.c.resize(p.c.size() - 1);
  for (std::size_t k = 1; k < p.c.size(); ++k) {
    out.c[k - 1] = static_cast<double>(k) * p.c[k];
  }
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.c.empty() || b.c.empty()) return {};
  Poly out;
  out.c.assign(a.c.size() + b.c.size() - 1, Cplx(0.0, 0.0));
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    for (std::size_t j = 0; j < b.c.size(); ++j) {
      out.c[i + j] += a.c[i] * b.c[j];
    }
  }
  return out;
}

std::vector<Cplx> poly_roots(const Poly& p) {
  int deg = p.degree();
  if (deg < 0) throw Error("zero polynomial has no root set");
  if (deg == 0) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  Cplx lead = p.c[static_cast<std::size_t>(deg)];
  for (int k = 0; k < deg; ++k) {
    comp(k, deg - 1) = -p.c[static_cast<std::size_t>(k)] / lead;
    if (k + 1 < deg) comp(k + 1, k) = 1.0;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp);
  std::vector<Cplx> roots(static_cast<std::size_t>(deg));
  for (int k = 0; k < deg; ++k) roots[static_cast<std::size_t>(k)] =
      solver.eigenvalues()(k);
  return roots;
}

CotangentDatum euclidean_reduction(const CotangentDatum& d) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      m(i, j) = d.metric[static_cast<std::size_t>(sym3_index(i, j))];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(m);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw ConstraintViolation("boundary metric must be positive definite");
  }
  Eigen::Vector3d xi(d.xi[0], d.xi[1], d.xi[2]);
  Eigen::Vector3d scaled = eig.eigenvectors() *
                           eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                           eig.eigenvectors().transpose() * xi;
  if (scaled.norm() == 0.0) {
    throw ConstraintViolation("cotangent vector must be nonzero");
  }
  CotangentDatum out;
  out.xi = {scaled(0), scaled(1), scaled(2)};
  return out;
}

double covector_norm(const CotangentDatum& d) {
  CotangentDatum e = euclidean_reduction(d);
  return std::sqrt(e.xi[0] * e.xi[0] + e.xi[1] * e.xi[1] +
                   e.xi[2] * e.xi[2]);
}

int symbol_column(int a, int b) {
  if (a > b) std::swap(a, b);
  if (a == 0) return 6 + b;
  return sym3_index(a - 1, b - 1);
}

Poly interior_root_polynomial(const CotangentDatum& d) {
  double len = covector_norm(d);
  // (z - i len)^20 by the binomial theorem.
  Poly out;
  out.c.assign(21, Cplx(0.0, 0.0));
  Cplx root(0.0, -len);
  Cplx acc(1.0, 0.0);
  double binom = 1.0;
  for (int k = 20; k >= 0; --k) {
    out.c[static_cast<std::size_t>(k)] = binom * acc;
    acc *= root;
    binom = binom * k / (21.0 - k);
  }
  return out;
}

SymbolMatrix assemble_boundary_symbol(const CotangentDatum& d) {
  CotangentDatum e = euclidean_reduction(d);
  const std::array<double, 3>& xi = e.xi;
  double len2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];

  SymbolMatrix m;
  m.xi_norm = std::sqrt(len2);
  for (auto& row : m.entry) row.fill(zero_poly());

  // z^2 + |xi|^2
  Poly wave = padd(zpow(2), constant(len2));

  for (int t = 0; t < 6; ++t) {
    m.entry[static_cast<std::size_t>(t)][static_cast<std::size_t>(t)] =
        constant(1.0);
    m.entry[static_cast<std::size_t>(10 + t)][static_cast<std::size_t>(t)] =
        wave;
  }

  // First-order conditions on the (0a) unknowns:
  //   row 6:   z h_00 + 2 xi_j h_0j
  //   row 6+j: (1/2) xi_j h_00 + z h_0j
  m.entry[6][6] = zpow(1);
  for (int j = 1; j <= 3; ++j) {
    double xj = xi[static_cast<std::size_t>(j - 1)];
    m.entry[6][static_cast<std::size_t>(6 + j)] = constant(2.0 * xj);
    m.entry[static_cast<std::size_t>(6 + j)][6] = constant(0.5 * xj);
    m.entry[static_cast<std::size_t>(6 + j)][static_cast<std::size_t>(6 + j)] =
        zpow(1);
  }

  // Third-order conditions on the (0a) unknowns: z (z^2 + |xi|^2) on the
  // diagonal, with first-row off-diagonal entries -(1/3)|xi|^2 xi_j.
  Poly cubic = poly_mul(zpow(1), wave);
  for (int a = 0; a < 4; ++a) {
    m.entry[static_cast<std::size_t>(16 + a)][static_cast<std::size_t>(6 + a)] =
        cubic;
  }
  for (int j = 1; j <= 3; ++j) {
    double xj = xi[static_cast<std::size_t>(j - 1)];
    m.entry[16][static_cast<std::size_t>(6 + j)] =
        constant(-len2 * xj / 3.0);
  }
  return m;
}

SymbolMatrix degenerate_variant(SymbolMatrix m) {
  for (int r = 0; r < 4; ++r) {
    m.entry[static_cast<std::size_t>(16 + r)] =
        m.entry[static_cast<std::size_t>(6 + r)];
  }
  return m;
}

ComplementingReport complementing_check(const SymbolMatrix& m) {
  Cplx z0(0.0, m.xi_norm);
  Eigen::MatrixXcd a(20, 20);
  for (int k = 0; k < 10; ++k) {
    for (int r = 0; r < 20; ++r) {
      const Poly& p =
          m.entry[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
      a(2 * k, r) = poly_eval(p, z0);
      a(2 * k + 1, r) = poly_eval(poly_deriv(p), z0);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
  ComplementingReport rep;
  rep.largest_singular = svd.singularValues()(0);
  rep.smallest_singular = svd.singularValues()(19);
  double threshold = 1e-8 * rep.largest_singular;
  rep.rank = 0;
  for (int k = 0; k < 20; ++k) {
    if (svd.singularValues()(k) > threshold) ++rep.rank;
  }
  rep.pass = (rep.rank == 20);
  for (int k = rep.rank; k < 20; ++k) {
    std::array<Cplx, 20> vec;
    for (int r = 0; r < 20; ++r) vec[static_cast<std::size_t>(r)] =
        svd.matrixV()(r, k);
    rep.kernel.push_back(vec);
  }
  return rep;
}

ComplementingReport complementing_check(const CotangentDatum& d) {
  return complementing_check(assemble_boundary_symbol(d));
}

}  // namespace fgforge
