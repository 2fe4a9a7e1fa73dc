#pragma once

// Witt vector arithmetic of length n <= 3 over rings of characteristic p via
// addition polynomials, and reduced forms of local Witt data.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "abelnp/fq_poly.hpp"

namespace abelnp {

inline constexpr unsigned kMaxWittLength = 3;

struct WittMonomial {
  std::uint32_t coeff;               // in [1, p)
  std::vector<std::uint16_t> exps;  // X_0..X_{n-1}, Y_0..Y_{n-1}
};

// Addition polynomials S_0, ..., S_{n-1} reduced mod p, obtained from the
// ghost identities w_k(S) = w_k(X) + w_k(Y) over the integers.
class WittPolynomials {
 public:
  using BigInt = boost::multiprecision::cpp_int;
  using MPoly = std::map<std::vector<std::uint16_t>, BigInt>;

  WittPolynomials(std::uint32_t p, unsigned n) : p_(p), n_(n) {
    require(n >= 1 && n <= kMaxWittLength, "Witt length must be in [1, 3]");
    std::vector<MPoly> s;
    for (unsigned k = 0; k < n; ++k) {
      MPoly acc;
      for (unsigned i = 0; i <= k; ++i) {
        BigInt pi = BigInt(1);
        for (unsigned t = 0; t < i; ++t) pi *= p;
        unsigned e = ipow_u(p, k - i);
        acc = add(acc, scale(power(variable(i), e), pi));
        acc = add(acc, scale(power(variable(n + i), e), pi));
        if (i < k) acc = add(acc, scale(power(s[i], e), -pi));
      }
      BigInt pk = 1;
      for (unsigned t = 0; t < k; ++t) pk *= p;
      for (auto& [mono, c] : acc) {
        ensure(c % pk == 0, "Witt addition polynomial is not integral");
        c /= pk;
      }
      s.push_back(acc);
    }
    sums_.resize(n);
    for (unsigned k = 0; k < n; ++k) {
      for (auto& [mono, c] : s[k]) {
        BigInt r = c % p;
        if (r < 0) r += p;
        if (r != 0) sums_[k].push_back(WittMonomial{static_cast<std::uint32_t>(r), mono});
      }
    }
  }

  std::uint32_t p() const { return p_; }
  unsigned length() const { return n_; }
  const std::vector<WittMonomial>& sum(unsigned k) const { return sums_[k]; }

 private:
  static unsigned ipow_u(unsigned b, unsigned e) {
    unsigned r = 1;
    while (e--) r *= b;
    return r;
  }
  MPoly variable(unsigned v) const {
    std::vector<std::uint16_t> e(2 * n_, 0);
    e[v] = 1;
    return MPoly{{e, BigInt(1)}};
  }
  static MPoly add(const MPoly& a, const MPoly& b) {
    MPoly r = a;
    for (auto& [m, c] : b) {
      auto& slot = r[m];
      slot += c;
      if (slot == 0) r.erase(m);
    }
    return r;
  }
  static MPoly scale(MPoly a, const BigInt& s) {
    if (s == 0) return {};
    for (auto& [m, c] : a) c *= s;
    return a;
  }
  static MPoly mul(const MPoly& a, const MPoly& b) {
    MPoly r;
    for (auto& [ma, ca] : a) {
      for (auto& [mb, cb] : b) {
        std::vector<std::uint16_t> m(ma.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<std::uint16_t>(ma[i] + mb[i]);
        auto& slot = r[m];
        slot += ca * cb;
        if (slot == 0) r.erase(m);
      }
    }
    return r;
  }
  MPoly power(MPoly base, unsigned e) const {
    MPoly r{{std::vector<std::uint16_t>(2 * n_, 0), BigInt(1)}};
    while (e) {
      if (e & 1) r = mul(r, base);
      e >>= 1;
      if (e) base = mul(base, base);
    }
    return r;
  }

  std::uint32_t p_;
  unsigned n_;
  std::vector<std::vector<WittMonomial>> sums_;
};

// Ring adaptors for the generic Witt routines.
struct LaurentOps {
  using Elem = LaurentSeries;
  const Field& F;
  Elem zero() const { return laurent::zero(laurent::kExact); }
  bool is_zero(const Elem& a) const { return a.is_zero(); }
  Elem add(const Elem& a, const Elem& b) const { return laurent::add(F, a, b); }
  Elem mul(const Elem& a, const Elem& b) const { return laurent::mul(F, a, b); }
  Elem neg(const Elem& a) const { return laurent::neg(F, a); }
  Elem scale_int(const Elem& a, std::uint32_t c) const { return laurent::scale(F, a, static_cast<Fq>(c % F.p())); }
};

struct RationalOps {
  using Elem = RationalFunction;
  const Field& F;
  Elem zero() const { return fq::rf_constant(0); }
  bool is_zero(const Elem& a) const { return fq::rf_is_zero(a); }
  Elem add(const Elem& a, const Elem& b) const { return fq::rf_add(F, a, b); }
  Elem mul(const Elem& a, const Elem& b) const { return fq::rf_mul(F, a, b); }
  Elem neg(const Elem& a) const { return fq::rf_neg(F, a); }
  Elem scale_int(const Elem& a, std::uint32_t c) const { return fq::rf_scale(F, a, static_cast<Fq>(c % F.p())); }
};

template <class Ops>
using WittVector = std::vector<typename Ops::Elem>;

template <class Ops>
WittVector<Ops> witt_add(const WittPolynomials& W, const Ops& ops, const WittVector<Ops>& a, const WittVector<Ops>& b) {
  const unsigned n = W.length();
  ensure(a.size() == n && b.size() == n, "Witt vector length mismatch");
  using Elem = typename Ops::Elem;
  std::vector<const Elem*> vars(2 * n);
  for (unsigned i = 0; i < n; ++i) {
    vars[i] = &a[i];
    vars[n + i] = &b[i];
  }
  std::vector<std::map<unsigned, Elem>> cache(2 * n);
  auto power = [&](auto& self, unsigned v, unsigned e) -> const Elem& {
    auto it = cache[v].find(e);
    if (it != cache[v].end()) return it->second;
    Elem r;
    if (e == 1) {
      r = *vars[v];
    } else {
      Elem h = self(self, v, e / 2);
      r = ops.mul(h, h);
      if (e & 1) r = ops.mul(r, *vars[v]);
    }
    return cache[v].emplace(e, std::move(r)).first->second;
  };
  WittVector<Ops> out;
  out.reserve(n);
  for (unsigned k = 0; k < n; ++k) {
    Elem acc = ops.zero();
    for (const auto& mono : W.sum(k)) {
      bool vanishes = false;
      for (unsigned v = 0; v < 2 * n && !vanishes; ++v)
        if (mono.exps[v] != 0 && ops.is_zero(*vars[v])) vanishes = true;
      if (vanishes) continue;
      bool first = true;
      Elem term;
      for (unsigned v = 0; v < 2 * n; ++v) {
        if (mono.exps[v] == 0) continue;
        const Elem& pw = power(power, v, mono.exps[v]);
        term = first ? pw : ops.mul(term, pw);
        first = false;
      }
      if (first) continue;
      acc = ops.add(acc, mono.coeff == 1 ? term : ops.scale_int(term, mono.coeff));
    }
    out.push_back(std::move(acc));
  }
  return out;
}

// For odd p, -1 = [-1] acts coordinatewise by a_i -> (-1)^{p^i} a_i = -a_i.
template <class Ops>
WittVector<Ops> witt_neg(const Ops& ops, WittVector<Ops> a) {
  for (auto& x : a) x = ops.neg(x);
  return a;
}

template <class Ops>
WittVector<Ops> witt_sub(const WittPolynomials& W, const Ops& ops, const WittVector<Ops>& a, const WittVector<Ops>& b) {
  return witt_add(W, ops, a, witt_neg(ops, b));
}

// c * a for an integer c, reduced mod p^n.
template <class Ops>
WittVector<Ops> witt_scale(const WittPolynomials& W, const Ops& ops, WittVector<Ops> a, std::int64_t c) {
  const std::int64_t pn = static_cast<std::int64_t>(ipow(W.p(), W.length()));
  c %= pn;
  if (c < 0) c += pn;
  WittVector<Ops> r(W.length(), ops.zero());
  bool started = false;
  for (int bit = 62; bit >= 0; --bit) {
    if (started) r = witt_add(W, ops, r, r);
    if ((c >> bit) & 1) {
      r = started ? witt_add(W, ops, r, a) : a;
      started = true;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

struct LocalWittData {
  Point Q;
  std::vector<LaurentSeries> coords;  // one per Witt level, in the local parameter at Q
  bool reduced = false;
};

// Replace each pole term c u^{-pj} at level i by its p-th root d u^{-j} by
// subtracting (F - 1) V^i[d u^{-j}]; higher levels absorb the carries.
inline LocalWittData reduce_witt(const Field& F, const WittPolynomials& W, LocalWittData d) {
  const unsigned n = W.length();
  require(d.coords.size() == n, "local Witt data length does not match the Witt length");
  const int p = static_cast<int>(F.p());
  LaurentOps ops{F};
  for (unsigned level = 0; level < n; ++level) {
    for (;;) {
      const LaurentSeries& s = d.coords[level];
      int found = 0;
      for (int e = s.val; e < 0 && e < s.prec; ++e) {
        if (s.coeff(e) != 0 && (-e) % p == 0) {
          found = e;
          break;
        }
      }
      if (found == 0) break;
      const Fq c = s.coeff(found);
      const int j = -found / p;
      LaurentSeries y = laurent::monomial(F.ifrob_inverse(c), -j, laurent::kExact);
      LaurentSeries yp = laurent::frobenius(F, y);
      WittVector<LaurentOps> A(n, ops.zero()), B(n, ops.zero());
      A[level] = yp;
      B[level] = y;
      d.coords = witt_add(W, ops, witt_sub(W, ops, d.coords, A), B);
      ensure(d.coords[level].prec <= found || d.coords[level].coeff(found) == 0,
             "Witt reduction failed to remove a p-divisible pole term");
    }
  }
  d.reduced = true;
  return d;
}

// Largest upper-numbering break max_i p^{n-1-i} s_i of a reduced representative.
inline unsigned swan_conductor(const LocalWittData& d, std::uint32_t p) {
  const unsigned n = static_cast<unsigned>(d.coords.size());
  unsigned s = 0;
  for (unsigned i = 0; i < n; ++i) {
    const int si = d.coords[i].pole_order();
    require(si == 0 || si % static_cast<int>(p) != 0, "swan_conductor needs a reduced representative");
    s = std::max<unsigned>(s, static_cast<unsigned>(ipow(p, n - 1 - i)) * static_cast<unsigned>(si));
  }
  return s;
}

}  // namespace abelnp
