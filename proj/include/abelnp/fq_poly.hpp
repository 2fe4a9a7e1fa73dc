#pragma once

// Polynomials, rational functions and truncated Laurent series over F_q,
// with field elements carried as Field indices.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "abelnp/arith.hpp"

namespace abelnp {

using Fq = Field::Index;
using FqPoly = std::vector<Fq>;  // lowest degree first, no trailing zeros

// A point of P^1(F_q).
struct Point {
  bool infinite = false;
  Fq x = 0;
  auto operator<=>(const Point&) const = default;
  static Point at(Fq v) { return Point{false, v}; }
  static Point infinity() { return Point{true, 0}; }
};

namespace fq {

inline void trim(FqPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int degree(const FqPoly& a) { return static_cast<int>(a.size()) - 1; }

inline FqPoly add(const Field& F, const FqPoly& a, const FqPoly& b) {
  FqPoly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.iadd(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(r);
  return r;
}

inline FqPoly neg(const Field& F, FqPoly a) {
  for (auto& c : a) c = F.ineg(c);
  return a;
}

inline FqPoly sub(const Field& F, const FqPoly& a, const FqPoly& b) { return add(F, a, neg(F, b)); }

inline FqPoly scale(const Field& F, FqPoly a, Fq s) {
  for (auto& c : a) c = F.imul(c, s);
  trim(a);
  return a;
}

inline FqPoly mul(const Field& F, const FqPoly& a, const FqPoly& b) {
  if (a.empty() || b.empty()) return {};
  FqPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = F.iadd(r[i + j], F.imul(a[i], b[j]));
  }
  trim(r);
  return r;
}

inline FqPoly pow(const Field& F, FqPoly base, unsigned e) {
  FqPoly r{1};
  while (e) {
    if (e & 1) r = mul(F, r, base);
    base = mul(F, base, base);
    e >>= 1;
  }
  return r;
}

inline std::pair<FqPoly, FqPoly> divmod(const Field& F, FqPoly a, const FqPoly& b) {
  ensure(!b.empty(), "polynomial division by zero");
  trim(a);
  if (a.size() < b.size()) return {{}, a};
  const Fq lc_inv = F.iinv(b.back());
  FqPoly q(a.size() - b.size() + 1, 0);
  for (std::size_t i = a.size(); i-- >= b.size();) {
    Fq c = F.imul(a[i], lc_inv);
    q[i - b.size() + 1] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::size_t k = i - b.size() + 1 + j;
      a[k] = F.isub(a[k], F.imul(c, b[j]));
    }
  }
  trim(q);
  trim(a);
  return {q, a};
}

inline FqPoly monic(const Field& F, FqPoly a) {
  trim(a);
  if (a.empty()) return a;
  return scale(F, a, F.iinv(a.back()));
}

inline FqPoly gcd(const Field& F, FqPoly a, FqPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    FqPoly r = divmod(F, a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(F, a);
}

inline Fq eval(const Field& F, const FqPoly& a, Fq x) {
  Fq acc = 0;
  for (std::size_t i = a.size(); i-- > 0;) acc = F.iadd(F.imul(acc, x), a[i]);
  return acc;
}

// a(u + x0) as a polynomial in u.
inline FqPoly taylor_shift(const Field& F, const FqPoly& a, Fq x0) {
  FqPoly r;
  for (std::size_t i = a.size(); i-- > 0;) {
    // r <- r * (u + x0) + a_i
    FqPoly next(r.size() + 1, 0);
    for (std::size_t j = 0; j < r.size(); ++j) {
      next[j + 1] = F.iadd(next[j + 1], r[j]);
      next[j] = F.iadd(next[j], F.imul(r[j], x0));
    }
    next[0] = F.iadd(next[0], a[i]);
    r = std::move(next);
    trim(r);
  }
  return r;
}

// Multiplicity of x0 as a root.
inline int root_multiplicity(const Field& F, const FqPoly& a, Fq x0) {
  if (a.empty()) return 0;
  FqPoly s = taylor_shift(F, a, x0);
  int k = 0;
  while (k < static_cast<int>(s.size()) && s[k] == 0) ++k;
  return k;
}

// Roots in F_q with multiplicities, by exhaustive evaluation.
inline std::vector<std::pair<Fq, int>> roots(const Field& F, const FqPoly& a) {
  std::vector<std::pair<Fq, int>> out;
  if (a.size() <= 1) return out;
  for (Fq x = 0; x < F.order(); ++x) {
    if (eval(F, a, x) != 0) continue;
    out.emplace_back(x, root_multiplicity(F, a, x));
  }
  return out;
}

inline bool splits(const Field& F, const FqPoly& a) {
  int total = 0;
  for (auto& [x, mlt] : roots(F, a)) total += mlt;
  return total == degree(a);
}

// Apply the p-power map to every coefficient.
inline FqPoly frobenius_twist(const Field& F, FqPoly a) {
  for (auto& c : a) c = F.ifrob(c);
  return a;
}

}  // namespace fq

// ---------------------------------------------------------------------------

struct RationalFunction {
  FqPoly num;
  FqPoly den{1};
  bool operator==(const RationalFunction&) const = default;
};

namespace fq {

inline RationalFunction normalize(const Field& F, RationalFunction r) {
  trim(r.num);
  trim(r.den);
  require(!r.den.empty(), "rational function with zero denominator");
  if (r.num.empty()) return RationalFunction{{}, {1}};
  FqPoly g = gcd(F, r.num, r.den);
  if (g.size() > 1) {
    r.num = divmod(F, r.num, g).first;
    r.den = divmod(F, r.den, g).first;
  }
  Fq lc_inv = F.iinv(r.den.back());
  r.num = scale(F, r.num, lc_inv);
  r.den = scale(F, r.den, lc_inv);
  return r;
}

inline RationalFunction rf_constant(Fq c) { return c == 0 ? RationalFunction{{}, {1}} : RationalFunction{{c}, {1}}; }

inline bool rf_is_zero(const RationalFunction& r) { return r.num.empty(); }

inline RationalFunction rf_add(const Field& F, const RationalFunction& a, const RationalFunction& b) {
  if (a.den == b.den) return normalize(F, {add(F, a.num, b.num), a.den});
  return normalize(F, {add(F, mul(F, a.num, b.den), mul(F, b.num, a.den)), mul(F, a.den, b.den)});
}

inline RationalFunction rf_neg(const Field& F, const RationalFunction& a) { return {neg(F, a.num), a.den}; }

inline RationalFunction rf_sub(const Field& F, const RationalFunction& a, const RationalFunction& b) {
  return rf_add(F, a, rf_neg(F, b));
}

inline RationalFunction rf_mul(const Field& F, const RationalFunction& a, const RationalFunction& b) {
  if (rf_is_zero(a) || rf_is_zero(b)) return rf_constant(0);
  return normalize(F, {mul(F, a.num, b.num), mul(F, a.den, b.den)});
}

inline RationalFunction rf_scale(const Field& F, const RationalFunction& a, Fq s) {
  return normalize(F, {scale(F, a.num, s), a.den});
}

inline RationalFunction rf_frobenius_twist(const Field& F, const RationalFunction& a) {
  return normalize(F, {frobenius_twist(F, a.num), frobenius_twist(F, a.den)});
}

// f(1/t).
inline RationalFunction rf_invert_variable(const Field& F, const RationalFunction& a) {
  if (rf_is_zero(a)) return a;
  FqPoly n(a.num.rbegin(), a.num.rend()), d(a.den.rbegin(), a.den.rend());
  int shift = degree(a.den) - degree(a.num);
  if (shift > 0) n.insert(n.begin(), static_cast<std::size_t>(shift), 0);
  if (shift < 0) d.insert(d.begin(), static_cast<std::size_t>(-shift), 0);
  return normalize(F, {n, d});
}

inline int ord_at(const Field& F, const RationalFunction& r, Point Q) {
  require(!rf_is_zero(r), "order of the zero function");
  if (Q.infinite) return degree(r.den) - degree(r.num);
  return root_multiplicity(F, r.num, Q.x) - root_multiplicity(F, r.den, Q.x);
}

// Finite poles (roots of the reduced denominator) plus infinity when applicable.
inline std::vector<Point> poles(const Field& F, const RationalFunction& r) {
  std::vector<Point> out;
  if (rf_is_zero(r)) return out;
  for (auto& [x, mlt] : roots(F, r.den)) out.push_back(Point::at(x));
  if (degree(r.num) > degree(r.den)) out.push_back(Point::infinity());
  return out;
}

inline std::vector<Point> zeros(const Field& F, const RationalFunction& r) {
  std::vector<Point> out;
  for (auto& [x, mlt] : roots(F, r.num)) out.push_back(Point::at(x));
  if (degree(r.num) < degree(r.den)) out.push_back(Point::infinity());
  return out;
}

}  // namespace fq

// ---------------------------------------------------------------------------
// Truncated Laurent series sum_{e >= val} c_e u^e known modulo u^prec.

struct LaurentSeries {
  int val = 0;
  int prec = 0;
  std::vector<Fq> c;  // c[i] is the coefficient of u^{val + i}

  bool is_zero() const { return c.empty(); }
  // exponent of the leading term, or prec when nothing is known to be nonzero
  int lead() const { return c.empty() ? prec : val; }
  Fq coeff(int e) const {
    ensure(e < prec, "Laurent coefficient requested beyond known precision");
    if (e < val || e >= val + static_cast<int>(c.size())) return 0;
    return c[static_cast<std::size_t>(e - val)];
  }
  int pole_order() const { return c.empty() || val >= 0 ? 0 : -val; }
};

namespace laurent {

// Precision marker for exactly known series.
inline constexpr int kExact = 1 << 24;

inline LaurentSeries normalized(LaurentSeries s) {
  s.prec = std::min(s.prec, kExact);
  if (s.val + static_cast<int>(s.c.size()) > s.prec) s.c.resize(static_cast<std::size_t>(std::max(0, s.prec - s.val)));
  std::size_t k = 0;
  while (k < s.c.size() && s.c[k] == 0) ++k;
  s.c.erase(s.c.begin(), s.c.begin() + static_cast<std::ptrdiff_t>(k));
  s.val += static_cast<int>(k);
  while (!s.c.empty() && s.c.back() == 0) s.c.pop_back();
  if (s.c.empty()) s.val = s.prec;
  return s;
}

inline LaurentSeries zero(int prec) { return LaurentSeries{prec, prec, {}}; }

inline LaurentSeries monomial(Fq coeff, int exponent, int prec) {
  if (coeff == 0 || exponent >= prec) return zero(prec);
  return LaurentSeries{exponent, prec, {coeff}};
}

inline LaurentSeries add(const Field& F, const LaurentSeries& a, const LaurentSeries& b) {
  LaurentSeries r;
  r.prec = std::min(a.prec, b.prec);
  if (a.is_zero() && b.is_zero()) return zero(r.prec);
  r.val = std::min(a.lead(), b.lead());
  if (r.val >= r.prec) return zero(r.prec);
  r.c.assign(static_cast<std::size_t>(r.prec - r.val), 0);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    int e = a.val + static_cast<int>(i);
    if (e < r.prec) r.c[static_cast<std::size_t>(e - r.val)] = a.c[i];
  }
  for (std::size_t i = 0; i < b.c.size(); ++i) {
    int e = b.val + static_cast<int>(i);
    if (e < r.prec) {
      auto& slot = r.c[static_cast<std::size_t>(e - r.val)];
      slot = F.iadd(slot, b.c[i]);
    }
  }
  return normalized(std::move(r));
}

inline LaurentSeries neg(const Field& F, LaurentSeries a) {
  for (auto& v : a.c) v = F.ineg(v);
  return a;
}

inline LaurentSeries sub(const Field& F, const LaurentSeries& a, const LaurentSeries& b) {
  return add(F, a, neg(F, b));
}

inline LaurentSeries scale(const Field& F, LaurentSeries a, Fq s) {
  for (auto& v : a.c) v = F.imul(v, s);
  return normalized(std::move(a));
}

inline LaurentSeries mul(const Field& F, const LaurentSeries& a, const LaurentSeries& b) {
  LaurentSeries r;
  r.prec = std::min({a.prec + b.lead(), b.prec + a.lead(), kExact});
  if (a.is_zero() || b.is_zero()) return zero(r.prec);
  r.val = a.val + b.val;
  if (r.val >= r.prec) return zero(r.prec);
  const std::size_t len = static_cast<std::size_t>(r.prec - r.val);
  r.c.assign(len, 0);
  for (std::size_t i = 0; i < a.c.size() && i < len; ++i) {
    if (a.c[i] == 0) continue;
    for (std::size_t j = 0; j < b.c.size() && i + j < len; ++j) {
      r.c[i + j] = F.iadd(r.c[i + j], F.imul(a.c[i], b.c[j]));
    }
  }
  return normalized(std::move(r));
}

// Coefficientwise p-power: (sum c_e u^e)^p = sum c_e^p u^{pe}.
inline LaurentSeries frobenius(const Field& F, const LaurentSeries& a) {
  const int p = static_cast<int>(F.p());
  const int prec = a.prec >= kExact / p ? kExact : a.prec * p;
  if (a.is_zero()) return zero(prec);
  LaurentSeries r;
  r.val = a.val * p;
  r.prec = prec;
  r.c.assign(static_cast<std::size_t>(r.prec - r.val), 0);
  for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i * p] = F.ifrob(a.c[i]);
  return normalized(std::move(r));
}

// Power series inverse of d with d[0] != 0, modulo u^len.
inline FqPoly inverse_series(const Field& F, const FqPoly& d, int len) {
  ensure(!d.empty() && d[0] != 0, "series inverse of a non-unit");
  FqPoly inv(static_cast<std::size_t>(len), 0);
  const Fq d0_inv = F.iinv(d[0]);
  for (int k = 0; k < len; ++k) {
    Fq acc = k == 0 ? 1 : 0;
    for (int j = 1; j <= k && j < static_cast<int>(d.size()); ++j) acc = F.isub(acc, F.imul(d[j], inv[k - j]));
    inv[k] = F.imul(acc, d0_inv);
  }
  return inv;
}

// Expansion of r at Q in the local parameter u = t - Q (or u = 1/t at infinity), modulo u^prec.
inline LaurentSeries expand(const Field& F, const RationalFunction& r, Point Q, int prec) {
  if (fq::rf_is_zero(r)) return zero(prec);
  FqPoly num, den;
  if (Q.infinite) {
    // r(1/u) = u^{deg den - deg num} * rev(num)(u) / rev(den)(u)
    num.assign(r.num.rbegin(), r.num.rend());
    den.assign(r.den.rbegin(), r.den.rend());
  } else {
    num = fq::taylor_shift(F, r.num, Q.x);
    den = fq::taylor_shift(F, r.den, Q.x);
  }
  int shift = Q.infinite ? fq::degree(r.den) - fq::degree(r.num) : 0;
  std::size_t nz = 0;
  while (num[nz] == 0) ++nz;
  std::size_t dz = 0;
  while (den[dz] == 0) ++dz;
  num.erase(num.begin(), num.begin() + static_cast<std::ptrdiff_t>(nz));
  den.erase(den.begin(), den.begin() + static_cast<std::ptrdiff_t>(dz));
  int val = shift + static_cast<int>(nz) - static_cast<int>(dz);
  LaurentSeries s;
  s.val = val;
  s.prec = prec;
  if (val >= prec) return zero(prec);
  const int len = prec - val;
  FqPoly inv = inverse_series(F, den, len);
  s.c.assign(static_cast<std::size_t>(len), 0);
  for (int i = 0; i < len && i < static_cast<int>(num.size()); ++i) {
    if (num[i] == 0) continue;
    for (int j = 0; i + j < len; ++j) s.c[i + j] = F.iadd(s.c[i + j], F.imul(num[i], inv[j]));
  }
  return normalized(std::move(s));
}

}  // namespace laurent

}  // namespace abelnp
