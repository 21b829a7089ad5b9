// Truncated power/Laurent series in t with coefficients in a vector space V.
//
// A Series stores coefficients for orders floor()..floor()+len-1 and carries
// a trusted ceiling: orders above the stored range but <= trusted_ceil() are
// exactly zero, orders above trusted_ceil() are unknown (contaminated by
// truncation) and reading them is a hard error. Arithmetic propagates the
// ceiling, so a test or solver can never consume a coefficient that the
// inputs do not determine:
//   add: ceil = min(ceilA, ceilB)
//   mul: ceil = min(ceilA + floorB, ceilB + floorA)
//   d/dt, t-shift: ceil moves with the order
// Exact objects (constants, closed-form polynomials) use a huge sentinel
// ceiling and stay exact under arithmetic among themselves.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "fgforge/errors.hpp"

namespace fgforge {

inline constexpr int kExactCeil = 1 << 28;

// Customization point for coefficient types. The default expects member
// hooks zeros_like/add_scaled/scale/sup_norm (madd only where mul is used).
template <class V>
struct value_ops {
  static V zeros_like(const V& v) { return V::zeros_like(v); }
  static void add_scaled(V& x, double s, const V& y) { x.add_scaled(s, y); }
  static void scale(V& x, double s) { x.scale(s); }
  static void madd(V& x, const V& a, const V& b) { x.madd(a, b); }
  static double sup_norm(const V& v) { return v.sup_norm(); }
};

template <>
struct value_ops<double> {
  static double zeros_like(double) { return 0.0; }
  static void add_scaled(double& x, double s, double y) { x += s * y; }
  static void scale(double& x, double s) { x *= s; }
  static void madd(double& x, double a, double b) { x += a * b; }
  static double sup_norm(double v) { return v < 0 ? -v : v; }
};

template <class V>
class Series {
 public:
  Series() = default;

  // len zero coefficients shaped like proto, starting at floor.
  Series(const V& proto, int floor, int len, int trusted_ceil)
      : floor_(floor), ceil_(trusted_ceil) {
    coeffs_.reserve(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i)
      coeffs_.push_back(value_ops<V>::zeros_like(proto));
    check_invariant();
  }

  static Series zero_like(const V& proto, int trusted_ceil) {
    return Series(proto, 0, 1, trusted_ceil);
  }
  // Exact single term c * t^order.
  static Series monomial(V c, int order, int trusted_ceil = kExactCeil) {
    Series s;
    s.floor_ = order;
    s.ceil_ = trusted_ceil;
    s.coeffs_.push_back(std::move(c));
    s.check_invariant();
    return s;
  }

  int floor() const { return floor_; }
  int trusted_ceil() const { return ceil_; }
  int stored_top() const {
    return floor_ + static_cast<int>(coeffs_.size()) - 1;
  }
  bool empty() const { return coeffs_.empty(); }
  const V& proto() const { return coeffs_.front(); }

  // Coefficient of t^k. Exact zero below the floor or between the stored
  // top and the trusted ceiling; throws above the ceiling.
  V at(int k) const {
    if (k > ceil_) {
      throw Error("series coefficient " + std::to_string(k) +
                  " requested above trusted ceiling " + std::to_string(ceil_));
    }
    if (k < floor_ || k > stored_top())
      return value_ops<V>::zeros_like(proto());
    return coeffs_[static_cast<std::size_t>(k - floor_)];
  }
  bool stores(int k) const { return k >= floor_ && k <= stored_top(); }
  const V& stored(int k) const {
    return coeffs_[static_cast<std::size_t>(k - floor_)];
  }
  V& stored_mut(int k) {
    return coeffs_[static_cast<std::size_t>(k - floor_)];
  }

  // Drops leading coefficients that are exactly zero (bitwise), tightening
  // the floor used by the product trust rule. Exact zeros arise from
  // t-derivatives of t-independent data, never from roundoff.
  void trim() {
    std::size_t lead = 0;
    while (lead + 1 < coeffs_.size() &&
           value_ops<V>::sup_norm(coeffs_[lead]) == 0.0) {
      ++lead;
    }
    if (lead > 0) {
      coeffs_.erase(coeffs_.begin(),
                    coeffs_.begin() + static_cast<std::ptrdiff_t>(lead));
      floor_ += static_cast<int>(lead);
    }
  }

  Series& operator+=(const Series& o) { return axpy(1.0, o); }
  Series& operator-=(const Series& o) { return axpy(-1.0, o); }
  Series& axpy(double s, const Series& o) {
    int nf = std::min(floor_, o.floor_);
    int nc = std::min(ceil_, o.ceil_);
    int ntop = std::min(std::max(stored_top(), o.stored_top()), nc);
    if (ntop < nf) throw Error("series sum has empty trust window");
    Series out(proto(), nf, ntop - nf + 1, nc);
    for (int k = nf; k <= ntop; ++k) {
      if (stores(k)) out.stored_mut(k) = stored(k);
      if (o.stores(k)) value_ops<V>::add_scaled(out.stored_mut(k), s,
                                                o.stored(k));
    }
    *this = std::move(out);
    return *this;
  }
  Series& operator*=(double s) {
    for (auto& c : coeffs_) value_ops<V>::scale(c, s);
    return *this;
  }
  friend Series operator+(Series a, const Series& b) {
    a += b;
    return a;
  }
  friend Series operator-(Series a, const Series& b) {
    a -= b;
    return a;
  }
  friend Series operator*(double s, Series a) {
    a *= s;
    return a;
  }

  // Cauchy product with trust propagation.
  friend Series mul(const Series& a, const Series& b) {
    long long cl = std::min<long long>(
        {static_cast<long long>(a.ceil_) + b.floor_,
         static_cast<long long>(b.ceil_) + a.floor_,
         static_cast<long long>(kExactCeil)});
    int nf = a.floor_ + b.floor_;
    int nc = static_cast<int>(cl);
    if (nc < nf) {
      throw Error("series product has empty trust window");
    }
    int full_top = a.stored_top() + b.stored_top();
    int ntop = std::min(full_top, nc);
    Series out(a.proto(), nf, ntop - nf + 1, nc);
    for (int ka = a.floor_; ka <= a.stored_top(); ++ka) {
      for (int kb = b.floor_; kb <= b.stored_top(); ++kb) {
        int k = ka + kb;
        if (k > ntop) break;
        value_ops<V>::madd(out.stored_mut(k), a.stored(ka), b.stored(kb));
      }
    }
    return out;
  }

  // d/dt: coefficient m*a_m lands at order m-1.
  friend Series tderiv(const Series& a) {
    int nc = (a.ceil_ >= kExactCeil) ? kExactCeil : a.ceil_ - 1;
    Series out(a.proto(), a.floor_ - 1,
               static_cast<int>(a.coeffs_.size()), nc);
    for (int m = a.floor_; m <= a.stored_top(); ++m) {
      value_ops<V>::add_scaled(out.stored_mut(m - 1),
                               static_cast<double>(m), a.stored(m));
    }
    out.trim();
    return out;
  }

  // Multiplication by t^shift.
  friend Series tshift(Series a, int shift) {
    a.floor_ += shift;
    if (a.ceil_ < kExactCeil) a.ceil_ += shift;
    a.check_invariant();
    return a;
  }

  // Restricts the trusted ceiling (drops stored coefficients above it).
  friend Series truncate(Series a, int new_ceil) {
    a.ceil_ = std::min(a.ceil_, new_ceil);
    if (a.stored_top() > a.ceil_) {
      int keep = std::max(1, a.ceil_ - a.floor_ + 1);
      a.coeffs_.resize(static_cast<std::size_t>(keep));
      if (a.floor_ > a.ceil_) {
        // All stored orders were above the ceiling; keep one zero at the
        // ceiling so the series stays well formed.
        a.coeffs_[0] = value_ops<V>::zeros_like(a.coeffs_[0]);
        a.floor_ = a.ceil_;
      }
    }
    a.check_invariant();
    return a;
  }

  // Horner evaluation of the stored polynomial times t^floor.
  V evaluate(double t) const {
    if (floor_ < 0 && t == 0.0) {
      throw Error("evaluating a Laurent series at t = 0");
    }
    V acc = value_ops<V>::zeros_like(proto());
    for (int k = stored_top(); k >= floor_; --k) {
      value_ops<V>::scale(acc, t);
      value_ops<V>::add_scaled(acc, 1.0, stored(k));
    }
    double tf = 1.0;
    for (int i = 0; i < floor_; ++i) tf *= t;
    for (int i = 0; i > floor_; --i) tf /= t;
    if (tf != 1.0) value_ops<V>::scale(acc, tf);
    return acc;
  }

  double coeff_sup(int k) const { return value_ops<V>::sup_norm(at(k)); }

  // Largest coefficient sup norm over stored orders in [lo, hi].
  double sup_over(int lo, int hi) const {
    double m = 0.0;
    for (int k = std::max(lo, floor_); k <= std::min(hi, stored_top()); ++k)
      m = std::max(m, value_ops<V>::sup_norm(stored(k)));
    return m;
  }

 private:
  void check_invariant() const {
    if (!coeffs_.empty() && stored_top() > ceil_) {
      throw Error("series stores coefficients above its trusted ceiling");
    }
  }

  int floor_ = 0;
  int ceil_ = kExactCeil;
  std::vector<V> coeffs_;
};

// Checks that every stored coefficient below order 0 is negligible, then
// returns the regular part (floor >= 0) with the ceiling unchanged.
template <class V>
Series<V> laurent_assert_regular(const Series<V>& s, double tol,
                                 const std::string& context) {
  for (int k = s.floor(); k < 0; ++k) {
    double norm = s.coeff_sup(k);
    if (norm > tol) {
      throw CancellationFailure(
          k, norm,
          context + ": Laurent coefficient at order " + std::to_string(k) +
              " has sup norm " + std::to_string(norm) +
              " (tolerance " + std::to_string(tol) + ")");
    }
  }
  if (s.floor() >= 0) return s;
  int top = std::max(s.stored_top(), 0);
  Series<V> out(s.proto(), 0, top + 1, s.trusted_ceil());
  for (int k = 0; k <= top; ++k) {
    if (s.stores(k)) out.stored_mut(k) = s.stored(k);
  }
  return out;
}

}  // namespace fgforge
