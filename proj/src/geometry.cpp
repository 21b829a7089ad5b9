#include "fgforge/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "fgforge/parallel.hpp"

namespace fgforge {

namespace {

SF map_coeffs(const SF& s,
              const std::function<ScalarField(const ScalarField&)>& f) {
  SF out = s;
  for (int k = s.floor(); k <= s.stored_top(); ++k) {
    out.stored_mut(k) = f(s.stored(k));
  }
  return out;
}

// Partial derivative along spacetime index a (0 = t, 1..3 spatial).
SF dfield(const SF& s, int a) {
  if (a == 0) return tderiv(s);
  return map_coeffs(
      s, [&](const ScalarField& c) { return spectral_derivative(c, a); });
}

SF zero_series(GridSpec grid, int ceil) {
  return SF(ScalarField(grid), 0, 1, ceil);
}

// Decodes a 0..20 pair-of-pairs index into (p, q), p <= q.
void decode_pairpair(int idx, int& p, int& q) {
  for (p = 0; p < 6; ++p) {
    int row_len = 6 - p;
    if (idx < row_len) {
      q = p + idx;
      return;
    }
    idx -= row_len;
  }
  q = 5;
}

// Lookup entry for a lowered 4-tensor with Riemann pair symmetries.
struct PairEntry {
  int idx = -1;  // -1: identically zero
  double sign = 0.0;
};

PairEntry pair_entry(int a, int b, int c, int d) {
  if (a == b || c == d) return {};
  PairEntry e;
  e.sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    e.sign = -e.sign;
  }
  if (c > d) {
    std::swap(c, d);
    e.sign = -e.sign;
  }
  e.idx = pairpair_index(pair4_index(a, b), pair4_index(c, d));
  return e;
}

// acc += scale * T_{abcd} for a pair-stored tensor.
void pair_add(SF& acc, double scale, const std::array<SF, 21>& ten, int a,
              int b, int c, int d) {
  PairEntry e = pair_entry(a, b, c, d);
  if (e.idx >= 0) acc.axpy(scale * e.sign, ten[static_cast<std::size_t>(e.idx)]);
}

// dh[c][sym4(a,b)] = D_c h_{ab} for a symmetric 2-tensor.
std::array<std::array<SF, 10>, 4> cov_deriv_sym2(const std::array<SF, 40>& chr,
                                                 const std::array<SF, 10>& h) {
  std::array<std::array<SF, 10>, 4> dh;
  parallel_for(40, [&](std::size_t t) {
    int c = static_cast<int>(t) / 10, idx = static_cast<int>(t) % 10;
    int a = kSym4Pairs[idx][0], b = kSym4Pairs[idx][1];
    SF acc = dfield(h[idx], c);
    for (int e = 0; e < 4; ++e) {
      acc -= mul(chr[e * 10 + sym4_index(c, a)], h[sym4_index(e, b)]);
      acc -= mul(chr[e * 10 + sym4_index(c, b)], h[sym4_index(a, e)]);
    }
    acc.trim();
    dh[c][idx] = std::move(acc);
  });
  return dh;
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double xm = 0.0, ym = 0.0;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) xm += x;
  for (double y : ys) ym += y;
  xm /= n;
  ym /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - xm) * (ys[i] - ym);
    den += (xs[i] - xm) * (xs[i] - xm);
  }
  return num / den;
}

}  // namespace

std::array<SF, 6> split_components(const Series<SymForm>& s) {
  std::array<SF, 6> out;
  for (int k = 0; k < 6; ++k) {
    SF comp(s.proto().c[k], s.floor(), s.stored_top() - s.floor() + 1,
            s.trusted_ceil());
    for (int m = s.floor(); m <= s.stored_top(); ++m) {
      comp.stored_mut(m) = s.stored(m).c[k];
    }
    comp.trim();
    out[k] = std::move(comp);
  }
  return out;
}

Series<SymForm> join_components(const std::array<SF, 6>& c) {
  int floor = c[0].floor(), top = c[0].stored_top(), ceil = c[0].trusted_ceil();
  for (int k = 1; k < 6; ++k) {
    floor = std::min(floor, c[k].floor());
    top = std::max(top, c[k].stored_top());
    ceil = std::min(ceil, c[k].trusted_ceil());
  }
  top = std::min(top, ceil);
  GridSpec grid = c[0].proto().grid();
  Series<SymForm> out(SymForm(grid), floor, top - floor + 1, ceil);
  for (int m = floor; m <= top; ++m) {
    for (int k = 0; k < 6; ++k) out.stored_mut(m).c[k] = c[k].at(m);
  }
  return out;
}

std::array<SF, 10> split_components4(const Series<Sym4F>& s) {
  std::array<SF, 10> out;
  for (int k = 0; k < 10; ++k) {
    SF comp(s.proto().c[k], s.floor(), s.stored_top() - s.floor() + 1,
            s.trusted_ceil());
    for (int m = s.floor(); m <= s.stored_top(); ++m) {
      comp.stored_mut(m) = s.stored(m).c[k];
    }
    comp.trim();
    out[k] = std::move(comp);
  }
  return out;
}

Series<Sym4F> join_components4(const std::array<SF, 10>& c) {
  int floor = c[0].floor(), top = c[0].stored_top(), ceil = c[0].trusted_ceil();
  for (int k = 1; k < 10; ++k) {
    floor = std::min(floor, c[k].floor());
    top = std::max(top, c[k].stored_top());
    ceil = std::min(ceil, c[k].trusted_ceil());
  }
  top = std::min(top, ceil);
  GridSpec grid = c[0].proto().grid();
  Series<Sym4F> out(Sym4F(grid), floor, top - floor + 1, ceil);
  for (int m = floor; m <= top; ++m) {
    for (int k = 0; k < 10; ++k) out.stored_mut(m).c[k] = c[k].at(m);
  }
  return out;
}

BulkMetric make_bulk_metric(int eps, Series<SymForm> g) {
  if (eps != 1 && eps != -1) {
    throw ConstraintViolation("metric signature eps must be +1 or -1");
  }
  if (g.floor() != 0) {
    throw ConstraintViolation("tangential metric series must start at t^0");
  }
  for (int k = g.floor(); k <= g.stored_top(); ++k) {
    if (!g.stored(k).is_finite()) {
      throw ConstraintViolation(
          "tangential metric has non-finite entries at order " +
          std::to_string(k));
    }
  }
  check_positive_definite(g.at(0), "boundary metric");
  return BulkMetric{eps, std::move(g)};
}

std::array<SF, 10> metric4_inverse(const std::array<SF, 10>& g,
                                   GridSpec grid) {
  int ceil = kExactCeil;
  int deg = 0;
  for (const auto& c : g) {
    ceil = std::min(ceil, c.trusted_ceil());
    deg = std::max(deg, c.stored_top());
    if (c.floor() < 0) {
      throw ConstraintViolation("metric series must be regular at t = 0");
    }
  }
  // The inverse of a series with any t-dependence has an infinite tail, so
  // the result is only trusted as far as it is stored. A t-independent
  // exact metric inverts exactly.
  const int top = (ceil == kExactCeil) ? deg : ceil;
  const int out_ceil = (ceil == kExactCeil && deg == 0) ? kExactCeil : top;
  const std::size_t np = grid.points();

  // Leading coefficient: pointwise 4x4 inverse with a pivot-ratio guard.
  std::array<ScalarField, 16> b0;
  for (auto& f : b0) f = ScalarField(grid);
  double worst_ratio = 1.0;
  std::size_t worst_p = 0;
  {
    std::array<ScalarField, 10> g0;
    for (int k = 0; k < 10; ++k) g0[k] = g[k].at(0);
    for (std::size_t p = 0; p < np; ++p) {
      Eigen::Matrix4d m;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m(a, b) = g0[sym4_index(a, b)][p];
      Eigen::PartialPivLU<Eigen::Matrix4d> lu(m);
      Eigen::Vector4d diag = lu.matrixLU().diagonal().cwiseAbs();
      double mx = diag.maxCoeff(), mn = diag.minCoeff();
      double ratio = (mx > 0.0) ? mn / mx : 0.0;
      if (ratio < worst_ratio) {
        worst_ratio = ratio;
        worst_p = p;
      }
      if (ratio < 1e-13) continue;
      Eigen::Matrix4d mi = lu.inverse();
      mi = 0.5 * (mi + mi.transpose()).eval();
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) b0[a * 4 + b][p] = mi(a, b);
    }
  }
  if (worst_ratio < 1e-13) {
    throw SingularMetric(
        "metric leading term is numerically singular (pivot ratio " +
        std::to_string(worst_ratio) + " at flat grid index " +
        std::to_string(worst_p) + ")");
  }

  // Higher orders: B_k = -B_0 * sum_{j=1..k} A_j B_{k-j}, pointwise 4x4.
  std::vector<std::array<ScalarField, 16>> B(static_cast<std::size_t>(top) + 1);
  B[0] = std::move(b0);
  for (int k = 1; k <= top; ++k) {
    std::array<ScalarField, 16> acc;
    for (auto& f : acc) f = ScalarField(grid);
    for (int j = 1; j <= k; ++j) {
      std::array<ScalarField, 10> Aj;
      bool all_zero = true;
      for (int idx = 0; idx < 10; ++idx) {
        Aj[idx] = g[idx].at(j);
        if (Aj[idx].sup_norm() != 0.0) all_zero = false;
      }
      if (all_zero) continue;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          for (int e = 0; e < 4; ++e)
            acc[r * 4 + c].madd(Aj[sym4_index(r, e)],
                                B[static_cast<std::size_t>(k - j)][e * 4 + c]);
    }
    std::array<ScalarField, 16> bk;
    for (auto& f : bk) f = ScalarField(grid);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        for (int e = 0; e < 4; ++e)
          bk[r * 4 + c].madd(B[0][r * 4 + e], acc[e * 4 + c]);
        bk[r * 4 + c] *= -1.0;
      }
    B[k] = std::move(bk);
  }

  std::array<SF, 10> out;
  for (int idx = 0; idx < 10; ++idx) {
    int a = kSym4Pairs[idx][0], b = kSym4Pairs[idx][1];
    SF comp(ScalarField(grid), 0, top + 1, out_ceil);
    for (int k = 0; k <= top; ++k) {
      ScalarField sym(grid);
      sym.add_scaled(0.5, B[static_cast<std::size_t>(k)][a * 4 + b]);
      sym.add_scaled(0.5, B[static_cast<std::size_t>(k)][b * 4 + a]);
      comp.stored_mut(k) = std::move(sym);
    }
    comp.trim();
    out[idx] = std::move(comp);
  }
  return out;
}

Metric4Series compact_metric(const BulkMetric& bm) {
  GridSpec grid = bm.grid();
  Metric4Series m;
  m.grid = grid;
  auto tang = split_components(bm.g);
  m.g[sym4_index(0, 0)] = SF::monomial(
      ScalarField::constant(grid, static_cast<double>(bm.eps)), 0);
  for (int i = 1; i <= 3; ++i) {
    m.g[sym4_index(0, i)] = SF::monomial(ScalarField(grid), 0);
  }
  for (int k = 0; k < 6; ++k) {
    int i = kSym3Pairs[k][0] + 1, j = kSym3Pairs[k][1] + 1;
    m.g[sym4_index(i, j)] = tang[k];
  }
  m.ginv = metric4_inverse(m.g, grid);
  return m;
}

Metric4Series make_metric4(std::array<SF, 10> comps, GridSpec grid) {
  Metric4Series m;
  m.grid = grid;
  m.g = std::move(comps);
  m.ginv = metric4_inverse(m.g, grid);
  return m;
}

std::array<SF, 40> christoffel4(const Metric4Series& m) {
  // dg[d][sym4(b,c)] = partial_d g_{bc}
  std::array<std::array<SF, 10>, 4> dg;
  parallel_for(40, [&](std::size_t t) {
    int d = static_cast<int>(t) / 10, idx = static_cast<int>(t) % 10;
    dg[d][idx] = dfield(m.g[idx], d);
  });
  std::array<SF, 40> chr;
  parallel_for(40, [&](std::size_t t) {
    int a = static_cast<int>(t) / 10, idx = static_cast<int>(t) % 10;
    int b = kSym4Pairs[idx][0], c = kSym4Pairs[idx][1];
    SF acc = zero_series(m.grid, kExactCeil);
    for (int d = 0; d < 4; ++d) {
      SF inner = dg[b][sym4_index(d, c)];
      inner += dg[c][sym4_index(d, b)];
      inner -= dg[d][sym4_index(b, c)];
      inner.trim();
      acc += mul(m.ginv[sym4_index(a, d)], inner);
    }
    acc *= 0.5;
    acc.trim();
    chr[t] = std::move(acc);
  });
  return chr;
}

std::array<SF, 10> ricci4(const std::array<SF, 40>& chr, GridSpec grid) {
  // S_b = Gamma^a_{ab}
  std::array<SF, 4> S;
  for (int b = 0; b < 4; ++b) {
    SF acc = zero_series(grid, kExactCeil);
    for (int a = 0; a < 4; ++a) acc += chr[a * 10 + sym4_index(a, b)];
    acc.trim();
    S[b] = std::move(acc);
  }
  std::array<SF, 10> ric;
  parallel_for(10, [&](std::size_t t) {
    int idx = static_cast<int>(t);
    int b = kSym4Pairs[idx][0], d = kSym4Pairs[idx][1];
    SF acc = zero_series(grid, kExactCeil);
    for (int a = 0; a < 4; ++a) {
      acc += dfield(chr[a * 10 + sym4_index(d, b)], a);
    }
    acc.axpy(-0.5, dfield(S[b], d));
    acc.axpy(-0.5, dfield(S[d], b));
    for (int e = 0; e < 4; ++e) {
      acc += mul(S[e], chr[e * 10 + sym4_index(d, b)]);
      for (int a = 0; a < 4; ++a) {
        acc -= mul(chr[a * 10 + sym4_index(d, e)],
                   chr[e * 10 + sym4_index(a, b)]);
      }
    }
    acc.trim();
    ric[idx] = std::move(acc);
  });
  return ric;
}

SF scalar_curvature(const std::array<SF, 10>& ric,
                    const std::array<SF, 10>& ginv, GridSpec grid) {
  SF acc = zero_series(grid, kExactCeil);
  for (int idx = 0; idx < 10; ++idx) {
    acc.axpy(kSym4Weight[idx], mul(ginv[idx], ric[idx]));
  }
  acc.trim();
  return acc;
}

std::array<SF, 21> riemann4(const Metric4Series& m,
                            const std::array<SF, 40>& chr) {
  // Upper Riemann R^e_{b cd} for c < d: rup[(e*4 + b)*6 + pair4_index(c,d)]
  std::vector<SF> rup(96);
  parallel_for(96, [&](std::size_t t) {
    int pair = static_cast<int>(t) % 6;
    int b = (static_cast<int>(t) / 6) % 4;
    int e = static_cast<int>(t) / 24;
    int c = kPair4[pair][0], d = kPair4[pair][1];
    SF acc = dfield(chr[e * 10 + sym4_index(d, b)], c);
    acc -= dfield(chr[e * 10 + sym4_index(c, b)], d);
    for (int f = 0; f < 4; ++f) {
      acc += mul(chr[e * 10 + sym4_index(c, f)],
                 chr[f * 10 + sym4_index(d, b)]);
      acc -= mul(chr[e * 10 + sym4_index(d, f)],
                 chr[f * 10 + sym4_index(c, b)]);
    }
    acc.trim();
    rup[t] = std::move(acc);
  });
  std::array<SF, 21> riem;
  parallel_for(21, [&](std::size_t t) {
    int p, q;
    decode_pairpair(static_cast<int>(t), p, q);
    int a = kPair4[p][0], b = kPair4[p][1];
    SF acc = zero_series(m.grid, kExactCeil);
    for (int e = 0; e < 4; ++e) {
      acc += mul(m.g[sym4_index(a, e)],
                 rup[static_cast<std::size_t>((e * 4 + b) * 6 + q)]);
    }
    acc.trim();
    riem[t] = std::move(acc);
  });
  return riem;
}

std::array<SF, 21> weyl4(const Metric4Series& m,
                         const std::array<SF, 21>& riem,
                         const std::array<SF, 10>& ric, const SF& scal) {
  // Schouten P = (1/2)(Ric - (s/6) g)
  std::array<SF, 10> P;
  for (int idx = 0; idx < 10; ++idx) {
    SF p = ric[idx];
    p.axpy(-1.0 / 6.0, mul(scal, m.g[idx]));
    p *= 0.5;
    p.trim();
    P[idx] = std::move(p);
  }
  std::array<SF, 21> weyl;
  parallel_for(21, [&](std::size_t t) {
    int p, q;
    decode_pairpair(static_cast<int>(t), p, q);
    int a = kPair4[p][0], b = kPair4[p][1];
    int c = kPair4[q][0], d = kPair4[q][1];
    // (P ^ g)_{abcd} = P_ac g_bd + P_bd g_ac - P_ad g_bc - P_bc g_ad
    SF w = riem[t];
    w -= mul(P[sym4_index(a, c)], m.g[sym4_index(b, d)]);
    w -= mul(P[sym4_index(b, d)], m.g[sym4_index(a, c)]);
    w += mul(P[sym4_index(a, d)], m.g[sym4_index(b, c)]);
    w += mul(P[sym4_index(b, c)], m.g[sym4_index(a, d)]);
    w.trim();
    weyl[t] = std::move(w);
  });
  return weyl;
}

CurvatureBundle curvature_of(Metric4Series m) {
  CurvatureBundle cb;
  cb.grid = m.grid;
  cb.eps = 0;
  cb.metric = std::move(m);
  cb.chr = christoffel4(cb.metric);
  cb.ric = ricci4(cb.chr, cb.grid);
  cb.scal = scalar_curvature(cb.ric, cb.metric.ginv, cb.grid);
  cb.riem = riemann4(cb.metric, cb.chr);
  cb.weyl = weyl4(cb.metric, cb.riem, cb.ric, cb.scal);

  // First Bianchi: R_{abcd} + R_{acdb} + R_{adbc} = 0.
  double bianchi = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = b + 1; c < 4; ++c)
        for (int d = c + 1; d < 4; ++d) {
          SF acc = zero_series(cb.grid, kExactCeil);
          pair_add(acc, 1.0, cb.riem, a, b, c, d);
          pair_add(acc, 1.0, cb.riem, a, c, d, b);
          pair_add(acc, 1.0, cb.riem, a, d, b, c);
          bianchi =
              std::max(bianchi, acc.sup_over(acc.floor(), acc.stored_top()));
        }
  cb.first_bianchi_sup = bianchi;

  // Ricci from the stored Riemann vs the direct computation.
  double consistency = 0.0;
  for (int idx = 0; idx < 10; ++idx) {
    int b = kSym4Pairs[idx][0], d = kSym4Pairs[idx][1];
    SF acc = zero_series(cb.grid, kExactCeil);
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 4; ++c) {
        PairEntry e = pair_entry(a, b, c, d);
        if (e.idx < 0) continue;
        acc.axpy(e.sign, mul(cb.metric.ginv[sym4_index(a, c)],
                             cb.riem[static_cast<std::size_t>(e.idx)]));
      }
    acc -= cb.ric[idx];
    consistency =
        std::max(consistency, acc.sup_over(acc.floor(), acc.stored_top()));
  }
  cb.ricci_consistency_sup = consistency;

  // Weyl trace: g^{ac} W_{abcd} must vanish.
  double wtrace = 0.0;
  for (int idx = 0; idx < 10; ++idx) {
    int b = kSym4Pairs[idx][0], d = kSym4Pairs[idx][1];
    SF acc = zero_series(cb.grid, kExactCeil);
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 4; ++c) {
        PairEntry e = pair_entry(a, b, c, d);
        if (e.idx < 0) continue;
        acc.axpy(e.sign, mul(cb.metric.ginv[sym4_index(a, c)],
                             cb.weyl[static_cast<std::size_t>(e.idx)]));
      }
    wtrace = std::max(wtrace, acc.sup_over(acc.floor(), acc.stored_top()));
  }
  cb.weyl_trace_sup = wtrace;
  return cb;
}

CurvatureBundle curvature4(const BulkMetric& bm) {
  CurvatureBundle cb = curvature_of(compact_metric(bm));
  cb.eps = bm.eps;
  return cb;
}

std::array<SF, 10> bach_tensor(const CurvatureBundle& cb) {
  const GridSpec grid = cb.grid;
  const auto& chr = cb.chr;
  const auto& ginv = cb.metric.ginv;

  // P = Ric - (s/6) g
  std::array<SF, 10> P;
  for (int idx = 0; idx < 10; ++idx) {
    SF p = cb.ric[idx];
    p.axpy(-1.0 / 6.0, mul(cb.scal, cb.metric.g[idx]));
    p.trim();
    P[idx] = std::move(p);
  }

  // dP[c][sym4(a,b)] = D_c P_ab
  auto dP = cov_deriv_sym2(chr, P);

  // X_{ca b} = D_c P_ab - D_a P_cb, antisymmetric in (c, a); stored as
  // X[pair4(c,a)][b] for c < a.
  std::array<std::array<SF, 4>, 6> X;
  parallel_for(24, [&](std::size_t t) {
    int pr = static_cast<int>(t) / 4, b = static_cast<int>(t) % 4;
    int c = kPair4[pr][0], a = kPair4[pr][1];
    SF x = dP[c][sym4_index(a, b)];
    x -= dP[a][sym4_index(c, b)];
    x.trim();
    X[pr][b] = std::move(x);
  });
  struct XRef {
    int pr = -1;
    double sign = 0.0;
  };
  auto xref = [](int c, int a) -> XRef {
    if (c == a) return {};
    if (c < a) return {pair4_index(c, a), 1.0};
    return {pair4_index(a, c), -1.0};
  };

  // Coordinate derivatives of the stored X components.
  std::array<std::array<std::array<SF, 4>, 6>, 4> dX;
  parallel_for(96, [&](std::size_t t) {
    int e = static_cast<int>(t) / 24;
    int pr = (static_cast<int>(t) / 4) % 6;
    int b = static_cast<int>(t) % 4;
    dX[e][pr][b] = dfield(X[pr][b], e);
  });

  // Ric^{cd}
  std::array<SF, 10> ric_up;
  parallel_for(10, [&](std::size_t t) {
    int idx = static_cast<int>(t);
    int c = kSym4Pairs[idx][0], d = kSym4Pairs[idx][1];
    SF acc = zero_series(grid, kExactCeil);
    for (int e = 0; e < 4; ++e)
      for (int f = 0; f < 4; ++f) {
        acc += mul(mul(ginv[sym4_index(c, e)], ginv[sym4_index(d, f)]),
                   cb.ric[sym4_index(e, f)]);
      }
    acc.trim();
    ric_up[idx] = std::move(acc);
  });

  std::array<SF, 10> bach;
  parallel_for(10, [&](std::size_t t) {
    int idx = static_cast<int>(t);
    int a = kSym4Pairs[idx][0], b = kSym4Pairs[idx][1];
    SF acc = zero_series(grid, kExactCeil);
    // (delta^D X)_ab = -g^{ce} D_e X_{ca b}
    for (int c = 0; c < 4; ++c)
      for (int e = 0; e < 4; ++e) {
        SF nab = zero_series(grid, kExactCeil);
        XRef x0 = xref(c, a);
        if (x0.pr >= 0) nab.axpy(x0.sign, dX[e][x0.pr][b]);
        for (int f = 0; f < 4; ++f) {
          XRef x1 = xref(f, a);
          if (x1.pr >= 0)
            nab.axpy(-x1.sign,
                     mul(chr[f * 10 + sym4_index(e, c)], X[x1.pr][b]));
          XRef x2 = xref(c, f);
          if (x2.pr >= 0)
            nab.axpy(-x2.sign,
                     mul(chr[f * 10 + sym4_index(e, a)], X[x2.pr][b]));
          XRef x3 = xref(c, a);
          if (x3.pr >= 0)
            nab.axpy(-x3.sign,
                     mul(chr[f * 10 + sym4_index(e, b)], X[x3.pr][f]));
        }
        nab.trim();
        acc -= mul(ginv[sym4_index(c, e)], nab);
      }
    // + W_{cabd} Ric^{cd}
    for (int c = 0; c < 4; ++c)
      for (int d = 0; d < 4; ++d) {
        PairEntry w = pair_entry(c, a, b, d);
        if (w.idx < 0) continue;
        acc.axpy(w.sign, mul(ric_up[sym4_index(c, d)],
                             cb.weyl[static_cast<std::size_t>(w.idx)]));
      }
    acc.trim();
    bach[idx] = std::move(acc);
  });
  return bach;
}

std::array<SF, 4> divergence_op(const CurvatureBundle& cb,
                                const std::array<SF, 10>& h) {
  auto dh = cov_deriv_sym2(cb.chr, h);
  std::array<SF, 4> out;
  for (int a = 0; a < 4; ++a) {
    SF acc = zero_series(cb.grid, kExactCeil);
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        acc -= mul(cb.metric.ginv[sym4_index(b, c)], dh[b][sym4_index(c, a)]);
      }
    acc.trim();
    out[a] = std::move(acc);
  }
  return out;
}

SF trace_op(const CurvatureBundle& cb, const std::array<SF, 10>& h) {
  SF acc = zero_series(cb.grid, kExactCeil);
  for (int idx = 0; idx < 10; ++idx) {
    acc.axpy(kSym4Weight[idx], mul(cb.metric.ginv[idx], h[idx]));
  }
  acc.trim();
  return acc;
}

std::array<SF, 4> bianchi_op(const CurvatureBundle& cb,
                             const std::array<SF, 10>& h) {
  std::array<SF, 4> out = divergence_op(cb, h);
  SF tr = trace_op(cb, h);
  for (int a = 0; a < 4; ++a) {
    out[a].axpy(0.5, dfield(tr, a));
    out[a].trim();
  }
  return out;
}

Series<Sym4F> einstein_residual(const BulkMetric& bm,
                                const ResidualOptions& opt) {
  Metric4Series m = compact_metric(bm);
  auto chr = christoffel4(m);
  auto ric = ricci4(chr, m.grid);

  // tr0 = g^{ab} Gamma^0_{ab}
  SF tr0 = zero_series(m.grid, kExactCeil);
  for (int idx = 0; idx < 10; ++idx) {
    tr0.axpy(kSym4Weight[idx], mul(m.ginv[idx], chr[0 * 10 + idx]));
  }
  tr0.trim();
  const SF& ginv00 = m.ginv[sym4_index(0, 0)];

  // Ehat_ab = t^2 Ric_ab - 2 t Gamma^0_ab - t tr0 g_ab
  //           - 3 g^{00} g_ab + 3 eps g_ab
  std::array<SF, 10> ehat;
  parallel_for(10, [&](std::size_t t) {
    int idx = static_cast<int>(t);
    SF e = tshift(ric[idx], 2);
    e.axpy(-2.0, tshift(chr[0 * 10 + idx], 1));
    e -= tshift(mul(tr0, m.g[idx]), 1);
    e.axpy(-3.0, mul(ginv00, m.g[idx]));
    e.axpy(3.0 * bm.eps, m.g[idx]);
    ehat[idx] = std::move(e);
  });
  auto out = join_components4(ehat);

  // Orders 0 and 1 of Ehat are orders -2 and -1 of the residual; they
  // cancel analytically (order -1 needs g_1 = 0) and must cancel here.
  for (int k = 0; k <= 1; ++k) {
    double norm = out.coeff_sup(k);
    if (norm > opt.laurent_tol) {
      throw CancellationFailure(
          k - 2, norm,
          "einstein residual: Laurent order " + std::to_string(k - 2) +
              " fails to cancel (sup " + std::to_string(norm) + ")");
    }
  }
  return out;
}

Sym4F residual_order(const Series<Sym4F>& ehat, int m) {
  return ehat.at(m + 2);
}

int residual_trusted_order(const Series<Sym4F>& ehat) {
  return ehat.trusted_ceil() - 2;
}

std::array<ScalarField, 6> sectional_curvatures(const BulkMetric& bm,
                                                double t) {
  if (bm.eps != +1) {
    throw ConstraintViolation(
        "sectional curvature audit requires a Riemannian metric");
  }
  if (!(t > 0.0)) {
    throw ConstraintViolation("sectional curvature requires t > 0");
  }
  Metric4Series m = compact_metric(bm);
  auto chr = christoffel4(m);
  auto riem = riemann4(m, chr);
  GridSpec grid = m.grid;
  const std::size_t np = grid.points();

  std::array<ScalarField, 10> g_t;
  for (int idx = 0; idx < 10; ++idx) g_t[idx] = m.g[idx].evaluate(t);
  std::array<ScalarField, 10> gamma0_t;
  for (int idx = 0; idx < 10; ++idx)
    gamma0_t[idx] = chr[0 * 10 + idx].evaluate(t);
  std::array<ScalarField, 6> riem_diag_t;
  for (int pr = 0; pr < 6; ++pr)
    riem_diag_t[pr] = riem[pairpair_index(pr, pr)].evaluate(t);

  std::array<ScalarField, 6> out;
  for (auto& f : out) f = ScalarField(grid);

  parallel_ranges(np, [&](std::size_t pb, std::size_t pe) {
    for (std::size_t p = pb; p < pe; ++p) {
      Eigen::Matrix4d gbar;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) gbar(a, b) = g_t[sym4_index(a, b)][p];
      Eigen::Matrix4d gbar_inv = gbar.inverse();
      double g00_inv = gbar_inv(0, 0);

      // Conformal correction of g = t^{-2} gbar:
      // B_ab = (1/t) Gamma^0_ab + g^{00}/(2 t^2) gbar_ab
      Eigen::Matrix4d B;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          B(a, b) = gamma0_t[sym4_index(a, b)][p] / t +
                    0.5 * g00_inv / (t * t) * gbar(a, b);
        }

      for (int pr = 0; pr < 6; ++pr) {
        int a = kPair4[pr][0], b = kPair4[pr][1];
        double rbar = riem_diag_t[pr][p];
        double kn = B(a, a) * gbar(b, b) + B(b, b) * gbar(a, a) -
                    2.0 * B(a, b) * gbar(a, b);
        double denom = gbar(a, a) * gbar(b, b) - gbar(a, b) * gbar(a, b);
        out[pr][p] = t * t * (rbar - kn) / denom;
      }
    }
  });
  return out;
}

BulkMetric as_exact_polynomial(const BulkMetric& bm, int work_ceiling) {
  const int top = bm.g.stored_top();
  if (work_ceiling < top) {
    throw Error("polynomial work ceiling is below the stored order");
  }
  Series<SymForm> g(SymForm(bm.grid()), 0, work_ceiling + 1, kExactCeil);
  for (int k = bm.g.floor(); k <= top; ++k) {
    g.stored_mut(k) = bm.g.stored(k);
  }
  return BulkMetric{bm.eps, std::move(g)};
}

double residual_order_fit(const BulkMetric& bm, const std::vector<double>& ts,
                          int headroom) {
  if (ts.size() < 2) {
    throw Error("order fit needs at least two sample values");
  }
  BulkMetric poly = as_exact_polynomial(bm, bm.g.stored_top() + headroom);
  auto ehat = einstein_residual(poly);
  auto comps = split_components4(ehat);
  std::vector<double> xs, ys;
  bool all_floor = true;
  for (double t : ts) {
    double sup = 0.0;
    for (const auto& c : comps) {
      sup = std::max(sup, c.evaluate(t).sup_norm());
    }
    sup /= t * t;
    if (sup > 1e-13) all_floor = false;
    xs.push_back(std::log(t));
    ys.push_back(std::log(std::max(sup, 1e-300)));
  }
  if (all_floor) return std::numeric_limits<double>::infinity();
  return fit_slope(xs, ys);
}

double sectional_decay_fit(const BulkMetric& bm, const std::vector<double>& ts,
                           double floor_tol) {
  if (ts.size() < 2) {
    throw Error("order fit needs at least two sample values");
  }
  BulkMetric poly = as_exact_polynomial(bm, bm.g.stored_top() + 6);
  std::vector<double> xs, ys;
  bool all_floor = true;
  for (double t : ts) {
    auto K = sectional_curvatures(poly, t);
    double sup = 0.0;
    for (const auto& f : K) {
      for (double v : f.data()) sup = std::max(sup, std::abs(v + 1.0));
    }
    if (sup > floor_tol) all_floor = false;
    xs.push_back(std::log(t));
    ys.push_back(std::log(std::max(sup, 1e-300)));
  }
  if (all_floor) return std::numeric_limits<double>::infinity();
  return fit_slope(xs, ys);
}

}  // namespace fgforge
