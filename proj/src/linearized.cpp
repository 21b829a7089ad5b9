#include "fgforge/linearized.hpp"

#include <array>
#include <string>
#include <utility>

#include "fgforge/errors.hpp"
#include "fgforge/parallel.hpp"

namespace fgforge {

namespace {

SF dfield(const SF& s, int a) {
  if (a == 0) return tderiv(s);
  SF out = s;
  for (int k = s.floor(); k <= s.stored_top(); ++k) {
    out.stored_mut(k) = spectral_derivative(s.stored(k), a);
  }
  return out;
}

SF zero_series(GridSpec grid, int ceil) {
  return SF(ScalarField(grid), 0, 1, ceil);
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

// nabla_c kappa_{ab}, indexed [c][sym4(a,b)].
std::array<std::array<SF, 10>, 4> cov_deriv_sym(
    const AhBackground& bg, const std::array<SF, 10>& k) {
  std::array<std::array<SF, 10>, 4> out;
  parallel_for(40, [&](std::size_t t) {
    int c = static_cast<int>(t) / 10, idx = static_cast<int>(t) % 10;
    int a = kSym4Pairs[idx][0], b = kSym4Pairs[idx][1];
    SF acc = dfield(k[idx], c);
    for (int e = 0; e < 4; ++e) {
      acc -= mul(bg.chr[e * 10 + sym4_index(c, a)], k[sym4_index(e, b)]);
      acc -= mul(bg.chr[e * 10 + sym4_index(c, b)], k[sym4_index(a, e)]);
    }
    acc.trim();
    out[c][idx] = std::move(acc);
  });
  return out;
}

// nabla_e of a 1-form, indexed [e][b].
std::array<std::array<SF, 4>, 4> cov_deriv_form(const AhBackground& bg,
                                                const std::array<SF, 4>& w) {
  std::array<std::array<SF, 4>, 4> out;
  parallel_for(16, [&](std::size_t t) {
    int e = static_cast<int>(t) / 4, b = static_cast<int>(t) % 4;
    SF acc = dfield(w[b], e);
    for (int f = 0; f < 4; ++f) {
      acc -= mul(bg.chr[f * 10 + sym4_index(e, b)], w[f]);
    }
    acc.trim();
    out[e][b] = std::move(acc);
  });
  return out;
}

// tr_g kappa from Laurent components of kappa.
SF trace_laurent(const AhBackground& bg, const std::array<SF, 10>& kl) {
  SF acc = zero_series(bg.grid, kExactCeil);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      acc += mul(bg.ginv[sym4_index(a, b)], kl[sym4_index(a, b)]);
    }
  }
  acc.trim();
  return acc;
}

struct OpParts {
  std::array<SF, 10> gauged;  // (D*D - 2 Rcirc) kappa
  std::array<SF, 10> gauge;   // -2 delta* beta(kappa)
};

OpParts assemble_parts(const AhBackground& bg, const Perturbation& p) {
  std::array<SF, 10> kc = split_components4(p.k);
  std::array<SF, 10> kl;
  for (int i = 0; i < 10; ++i) kl[i] = tshift(kc[i], -2);

  auto dk = cov_deriv_sym(bg, kl);

  // nabla_d nabla_c kappa_{ab}, indexed [d][c][sym4(a,b)].
  std::array<std::array<std::array<SF, 10>, 4>, 4> ddk;
  parallel_for(160, [&](std::size_t t) {
    int d = static_cast<int>(t) / 40;
    int c = (static_cast<int>(t) / 10) % 4;
    int idx = static_cast<int>(t) % 10;
    int a = kSym4Pairs[idx][0], b = kSym4Pairs[idx][1];
    SF acc = dfield(dk[c][idx], d);
    for (int e = 0; e < 4; ++e) {
      acc -= mul(bg.chr[e * 10 + sym4_index(d, c)], dk[e][idx]);
      acc -= mul(bg.chr[e * 10 + sym4_index(d, a)], dk[c][sym4_index(e, b)]);
      acc -= mul(bg.chr[e * 10 + sym4_index(d, b)], dk[c][sym4_index(a, e)]);
    }
    acc.trim();
    ddk[d][c][idx] = std::move(acc);
  });

  // kappa^{cd}
  std::array<SF, 10> kup;
  parallel_for(10, [&](std::size_t t) {
    int idx = static_cast<int>(t);
    int c = kSym4Pairs[idx][0], d = kSym4Pairs[idx][1];
    SF acc = zero_series(bg.grid, kExactCeil);
    for (int e = 0; e < 4; ++e) {
      for (int f = 0; f < 4; ++f) {
        acc += mul(mul(bg.ginv[sym4_index(c, e)], bg.ginv[sym4_index(d, f)]),
                   kl[sym4_index(e, f)]);
      }
    }
    acc.trim();
    kup[idx] = std::move(acc);
  });

  OpParts parts;
  parallel_for(10, [&](std::size_t t) {
    int idx = static_cast<int>(t);
    int a = kSym4Pairs[idx][0], b = kSym4Pairs[idx][1];
    // D*D kappa = -g^{cd} nabla_c nabla_d kappa
    SF acc = zero_series(bg.grid, kExactCeil);
    for (int c = 0; c < 4; ++c) {
      for (int d = 0; d < 4; ++d) {
        acc -= mul(bg.ginv[sym4_index(c, d)], ddk[c][d][idx]);
      }
    }
    // -2 (Rcirc kappa)_ab = -2 R_{acbd} kappa^{cd}
    for (int c = 0; c < 4; ++c) {
      for (int d = 0; d < 4; ++d) {
        PairEntry w = pair_entry(a, c, b, d);
        if (w.idx < 0) continue;
        acc.axpy(-2.0 * w.sign,
                 mul(bg.riem[static_cast<std::size_t>(w.idx)],
                     kup[sym4_index(c, d)]));
      }
    }
    acc.trim();
    parts.gauged[idx] = std::move(acc);
  });

  // beta(kappa)_b = -g^{cd} nabla_c kappa_{db} + (1/2) d_b tr kappa
  SF trk = trace_laurent(bg, kl);
  std::array<SF, 4> beta;
  for (int b = 0; b < 4; ++b) {
    SF acc = 0.5 * dfield(trk, b);
    for (int c = 0; c < 4; ++c) {
      for (int d = 0; d < 4; ++d) {
        acc -= mul(bg.ginv[sym4_index(c, d)], dk[c][sym4_index(d, b)]);
      }
    }
    acc.trim();
    beta[b] = std::move(acc);
  }

  // -2 (delta* beta)_ab = -(nabla_a beta_b + nabla_b beta_a)
  auto dbeta = cov_deriv_form(bg, beta);
  parallel_for(10, [&](std::size_t t) {
    int idx = static_cast<int>(t);
    int a = kSym4Pairs[idx][0], b = kSym4Pairs[idx][1];
    SF acc = dbeta[a][b];
    acc += dbeta[b][a];
    acc *= -1.0;
    acc.trim();
    parts.gauge[idx] = std::move(acc);
  });
  return parts;
}

Series<Sym4F> dress(const std::array<SF, 10>& comps) {
  std::array<SF, 10> shifted;
  for (int i = 0; i < 10; ++i) shifted[i] = tshift(comps[i], 2);
  return join_components4(shifted);
}

}  // namespace

int leading_order(const Series<Sym4F>& s, double tol) {
  for (int k = s.floor(); k <= s.stored_top(); ++k) {
    if (s.stored(k).sup_norm() > tol) return k;
  }
  return kOrderInfinite;
}

void validate_weight(const Perturbation& p) {
  int lead = leading_order(p.k);
  if (lead == kOrderInfinite) {
    throw ConstraintViolation(
        "perturbation has no coefficient above tolerance");
  }
  if (lead != p.weight) {
    throw ConstraintViolation(
        "perturbation declares weight " + std::to_string(p.weight) +
        " but its first nonvanishing coefficient is at order " +
        std::to_string(lead));
  }
}

AhBackground ah_background(const BulkMetric& bm) {
  if (bm.eps != 1) {
    throw ConstraintViolation(
        "linearized operators require a hyperbolic background (eps = +1)");
  }
  AhBackground bg;
  bg.grid = bm.grid();
  bg.compact = compact_metric(bm);
  for (int i = 0; i < 10; ++i) {
    bg.g[i] = tshift(bg.compact.g[i], -2);
    bg.ginv[i] = tshift(bg.compact.ginv[i], 2);
  }
  Metric4Series m4;
  m4.grid = bg.grid;
  m4.g = bg.g;
  m4.ginv = bg.ginv;
  bg.chr = christoffel4(m4);
  bg.riem = riemann4(m4, bg.chr);
  return bg;
}

Series<Sym4F> linearized_einstein(const AhBackground& bg,
                                  const Perturbation& p) {
  OpParts parts = assemble_parts(bg, p);
  std::array<SF, 10> sum;
  for (int i = 0; i < 10; ++i) {
    sum[i] = parts.gauged[i];
    sum[i] += parts.gauge[i];
    sum[i].trim();
  }
  return dress(sum);
}

Series<Sym4F> gauged_operator(const AhBackground& bg, const Perturbation& p) {
  return dress(assemble_parts(bg, p).gauged);
}

Series<Sym4F> bianchi_gauge_term(const AhBackground& bg,
                                 const Perturbation& p) {
  return dress(assemble_parts(bg, p).gauge);
}

SF ah_trace(const AhBackground& bg, const Series<Sym4F>& dressed) {
  std::array<SF, 10> comps = split_components4(dressed);
  SF acc = zero_series(bg.grid, kExactCeil);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      acc += mul(bg.compact.ginv[sym4_index(a, b)], comps[sym4_index(a, b)]);
    }
  }
  acc.trim();
  return acc;
}

SF ah_scalar_laplacian(const AhBackground& bg, const SF& f) {
  std::array<SF, 4> df;
  for (int a = 0; a < 4; ++a) df[a] = dfield(f, a);
  SF acc = zero_series(bg.grid, kExactCeil);
  for (int c = 0; c < 4; ++c) {
    for (int d = 0; d < 4; ++d) {
      SF inner = dfield(df[d], c);
      for (int e = 0; e < 4; ++e) {
        inner -= mul(bg.chr[e * 10 + sym4_index(c, d)], df[e]);
      }
      inner.trim();
      acc += mul(bg.ginv[sym4_index(c, d)], inner);
    }
  }
  acc.trim();
  return acc;
}

DecayReport decay_diagnostic(const Series<Sym4F>& s, double tol) {
  DecayReport rep;
  for (int k = s.floor(); k <= s.stored_top(); ++k) {
    const Sym4F& c = s.stored(k);
    double tang = 0.0, norm = 0.0;
    for (int a = 0; a < 4; ++a) {
      for (int b = a; b < 4; ++b) {
        double v = c.comp(a, b).sup_norm();
        if (a == 0) {
          norm = std::max(norm, v);
        } else {
          tang = std::max(tang, v);
        }
      }
    }
    if (rep.tangential_order == kOrderInfinite && tang > tol) {
      rep.tangential_order = k;
    }
    if (rep.normal_order == kOrderInfinite && norm > tol) {
      rep.normal_order = k;
    }
  }
  return rep;
}

Perturbation embed_tangential(const Series<SymForm>& h, int weight) {
  GridSpec grid = h.proto().grid();
  int floor = h.floor();
  int top = h.stored_top();
  Series<Sym4F> k(Sym4F(grid), floor, top - floor + 1, h.trusted_ceil());
  for (int m = floor; m <= top; ++m) {
    const SymForm& src = h.stored(m);
    Sym4F& dst = k.stored_mut(m);
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        dst.comp(i + 1, j + 1) = src.comp(i, j);
      }
    }
  }
  return {std::move(k), weight};
}

Series<Sym4F> residual_fd(const BulkMetric& bm, const Perturbation& p,
                          double s, const ResidualOptions& opt) {
  GridSpec grid = p.k.proto().grid();
  Series<SymForm> tang(SymForm(grid), p.k.floor(),
                       p.k.stored_top() - p.k.floor() + 1, p.k.trusted_ceil());
  for (int m = p.k.floor(); m <= p.k.stored_top(); ++m) {
    const Sym4F& src = p.k.stored(m);
    for (int b = 0; b < 4; ++b) {
      if (src.comp(0, b).sup_norm() > 0.0) {
        throw ConstraintViolation(
            "finite differencing needs a tangential perturbation; component "
            "(0," +
            std::to_string(b) + ") is nonzero at order " + std::to_string(m));
      }
    }
    SymForm& dst = tang.stored_mut(m);
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        dst.comp(i, j) = src.comp(i + 1, j + 1);
      }
    }
  }

  Series<SymForm> gp = bm.g;
  gp.axpy(s, tang);
  Series<SymForm> gm = bm.g;
  gm.axpy(-s, tang);
  Series<Sym4F> ep = einstein_residual(make_bulk_metric(bm.eps, gp), opt);
  Series<Sym4F> em = einstein_residual(make_bulk_metric(bm.eps, gm), opt);
  ep -= em;
  ep *= 1.0 / (2.0 * s);
  return ep;
}

}  // namespace fgforge
