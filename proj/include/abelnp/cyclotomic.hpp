#pragma once

// Exact arithmetic in Z[zeta_{p^n}, zeta_{q-1}] on the basis x^i xi^j with
// x = zeta_{p^n} - 1, its image in the p-adic completion at finite precision,
// p-adic valuations, the Artin-Hasse exponential and the constants gamma_i.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abelnp/arith.hpp"
#include "abelnp/rational.hpp"

namespace abelnp {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

namespace detail {

using IntPoly = std::vector<BigInt>;

inline IntPoly int_poly_divexact(IntPoly a, const IntPoly& b) {
  // b monic
  IntPoly q(a.size() - b.size() + 1, 0);
  for (std::size_t i = a.size(); i-- >= b.size();) {
    BigInt c = a[i];
    q[i - b.size() + 1] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) a[i - b.size() + 1 + j] -= c * b[j];
  }
  for (auto& r : a) ensure(r == 0, "cyclotomic polynomial division left a remainder");
  return q;
}

inline IntPoly cyclotomic_polynomial(std::uint64_t N) {
  IntPoly r(N + 1, 0);
  r[0] = -1;
  r[N] = 1;
  for (std::uint64_t d = 1; d < N; ++d)
    if (N % d == 0) r = int_poly_divexact(r, cyclotomic_polynomial(d));
  return r;
}

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  BigInt r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;
  }
  return r;
}

inline std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t r = n;
  for (auto f : prime_factors(n)) r = r / f * (f - 1);
  return r;
}

}  // namespace detail

struct CycloInt {
  std::vector<BigInt> c;  // c[i * phi + j] is the coefficient of x^i xi^j
  bool operator==(const CycloInt&) const = default;
};

// Z[zeta_{p^n}] (x) Z[zeta_{q-1}], reduced by Phi_{p^n}(1 + x) and Phi_{q-1}(xi).
class CycloRing {
 public:
  CycloRing(std::uint32_t p, unsigned n, std::uint64_t q) : p_(p), n_(n), q_(q) {
    require(p >= 3 && is_prime(p), "p must be an odd prime");
    require(n >= 1, "Witt length must be >= 1");
    require(q >= 3 && q % p == 0, "q must be a power of p");
    pn_ = ipow(p, n);
    e_ = static_cast<unsigned>(pn_ / p * (p - 1));
    phi_ = static_cast<unsigned>(detail::euler_phi(q - 1));
    // Phi_{p^n}(1 + x) = sum_{k < p} (1 + x)^{k p^{n-1}}
    eis_.assign(e_ + 1, 0);
    const std::uint64_t step = pn_ / p;
    for (std::uint32_t k = 0; k < p; ++k)
      for (std::uint64_t i = 0; i <= k * step; ++i) eis_[i] += detail::binomial(k * step, i);
    ensure(eis_[e_] == 1, "Eisenstein polynomial is not monic");
    cyc_ = detail::cyclotomic_polynomial(q - 1);
    ensure(cyc_.size() == phi_ + 1, "cyclotomic polynomial degree mismatch");
    zeta_table_.reserve(pn_);
    CycloInt z = one();
    CycloInt step_z = zeta();
    for (std::uint64_t w = 0; w < pn_; ++w) {
      zeta_table_.push_back(z);
      z = mul(z, step_z);
    }
    xi_table_.reserve(q - 1);
    for (std::uint64_t c = 0; c + 1 < q; ++c) xi_table_.push_back(reduce_xi_power(c));
  }

  std::uint32_t p() const { return p_; }
  unsigned length() const { return n_; }
  std::uint64_t q() const { return q_; }
  std::uint64_t pn() const { return pn_; }
  unsigned e() const { return e_; }
  unsigned phi() const { return phi_; }
  const std::vector<BigInt>& eisenstein() const { return eis_; }

  CycloInt zero() const { return CycloInt{std::vector<BigInt>(static_cast<std::size_t>(e_) * phi_, 0)}; }
  CycloInt from_int(const BigInt& v) const {
    CycloInt z = zero();
    z.c[0] = v;
    return z;
  }
  CycloInt one() const { return from_int(1); }
  CycloInt x() const {
    CycloInt z = zero();
    if (e_ > 1) {
      z.c[phi_] = 1;
    } else {
      // e = 1 is impossible for odd p
      ensure(false, "degenerate ramification degree");
    }
    return z;
  }
  CycloInt zeta() const { return add(one(), x()); }

  bool is_zero(const CycloInt& a) const {
    return std::all_of(a.c.begin(), a.c.end(), [](const BigInt& v) { return v == 0; });
  }
  // True when a lies in Z.
  bool is_integer(const CycloInt& a) const {
    return std::all_of(a.c.begin() + 1, a.c.end(), [](const BigInt& v) { return v == 0; });
  }

  CycloInt add(const CycloInt& a, const CycloInt& b) const {
    CycloInt r = a;
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
    return r;
  }
  CycloInt sub(const CycloInt& a, const CycloInt& b) const {
    CycloInt r = a;
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i];
    return r;
  }
  CycloInt neg(const CycloInt& a) const { return sub(zero(), a); }
  CycloInt scale(CycloInt a, const BigInt& s) const {
    for (auto& v : a.c) v *= s;
    return a;
  }
  // a / k, asserting that every coefficient is divisible (integrality).
  CycloInt divide_exact(CycloInt a, const BigInt& k) const {
    for (auto& v : a.c) {
      ensure(v % k == 0, "cyclotomic element is not divisible by " + k.str());
      v /= k;
    }
    return a;
  }

  CycloInt mul(const CycloInt& a, const CycloInt& b) const {
    const std::size_t E = e_, P = phi_;
    std::vector<BigInt> acc((2 * E - 1) * (2 * P - 1), 0);
    const std::size_t W = 2 * P - 1;
    for (std::size_t i1 = 0; i1 < E; ++i1)
      for (std::size_t j1 = 0; j1 < P; ++j1) {
        const BigInt& u = a.c[i1 * P + j1];
        if (u == 0) continue;
        for (std::size_t i2 = 0; i2 < E; ++i2)
          for (std::size_t j2 = 0; j2 < P; ++j2) {
            const BigInt& v = b.c[i2 * P + j2];
            if (v == 0) continue;
            acc[(i1 + i2) * W + j1 + j2] += u * v;
          }
      }
    // reduce xi-degree
    for (std::size_t i = 0; i < 2 * E - 1; ++i)
      for (std::size_t j = W; j-- > P;) {
        BigInt top = acc[i * W + j];
        if (top == 0) continue;
        acc[i * W + j] = 0;
        for (std::size_t k = 0; k < P; ++k) acc[i * W + j - P + k] -= top * cyc_[k];
      }
    // reduce x-degree
    for (std::size_t i = 2 * E - 1; i-- > E;)
      for (std::size_t j = 0; j < P; ++j) {
        BigInt top = acc[i * W + j];
        if (top == 0) continue;
        acc[i * W + j] = 0;
        for (std::size_t k = 0; k < E; ++k) acc[(i - E + k) * W + j] -= top * eis_[k];
      }
    CycloInt r = zero();
    for (std::size_t i = 0; i < E; ++i)
      for (std::size_t j = 0; j < P; ++j) r.c[i * P + j] = std::move(acc[i * W + j]);
    return r;
  }

  CycloInt pow(CycloInt b, std::uint64_t e) const {
    CycloInt r = one();
    while (e) {
      if (e & 1) r = mul(r, b);
      e >>= 1;
      if (e) b = mul(b, b);
    }
    return r;
  }

  // zeta_{p^n}^w = (1 + x)^w.
  CycloInt zeta_power(std::int64_t w) const {
    return zeta_table_[static_cast<std::size_t>(modp::reduce(w, pn_))];
  }
  CycloInt zeta_power_direct(std::int64_t w) const { return pow(zeta(), modp::reduce(w, pn_)); }
  // xi^c with xi a primitive (q-1)-th root of unity.
  CycloInt xi_power(std::int64_t c) const { return xi_table_[static_cast<std::size_t>(modp::reduce(c, q_ - 1))]; }

  // sum_{w, c} counts[w][c] zeta^w xi^c
  CycloInt from_histogram(const std::vector<std::vector<std::int64_t>>& counts) const {
    CycloInt r = zero();
    std::vector<BigInt> xi_part(phi_);
    for (std::size_t w = 0; w < counts.size(); ++w) {
      std::fill(xi_part.begin(), xi_part.end(), BigInt(0));
      bool any = false;
      for (std::size_t c = 0; c < counts[w].size(); ++c) {
        if (counts[w][c] == 0) continue;
        any = true;
        const CycloInt& xc = xi_table_[c];
        for (unsigned j = 0; j < phi_; ++j) xi_part[j] += counts[w][c] * xc.c[j];
      }
      if (!any) continue;
      const CycloInt& zw = zeta_table_[w];
      for (unsigned i = 0; i < e_; ++i) {
        const BigInt& zi = zw.c[static_cast<std::size_t>(i) * phi_];
        if (zi == 0) continue;
        for (unsigned j = 0; j < phi_; ++j) r.c[static_cast<std::size_t>(i) * phi_ + j] += zi * xi_part[j];
      }
    }
    return r;
  }

  // The automorphism zeta -> zeta^{-1}, xi -> xi^{-1}.
  CycloInt conjugate(const CycloInt& a) const {
    std::vector<CycloInt> xs{one()};
    const CycloInt xinv = sub(zeta_power(-1), one());
    for (unsigned i = 1; i < e_; ++i) xs.push_back(mul(xs.back(), xinv));
    CycloInt r = zero();
    for (unsigned i = 0; i < e_; ++i)
      for (unsigned j = 0; j < phi_; ++j) {
        const BigInt& v = a.c[static_cast<std::size_t>(i) * phi_ + j];
        if (v == 0) continue;
        const CycloInt& yj = xi_power(-static_cast<std::int64_t>(j));
        for (unsigned i2 = 0; i2 < e_; ++i2) {
          const BigInt& xv = xs[i].c[static_cast<std::size_t>(i2) * phi_];
          if (xv == 0) continue;
          for (unsigned j2 = 0; j2 < phi_; ++j2) r.c[static_cast<std::size_t>(i2) * phi_ + j2] += v * xv * yj.c[j2];
        }
      }
    return r;
  }

  std::string to_string(const CycloInt& a) const {
    std::string s;
    for (unsigned i = 0; i < e_; ++i)
      for (unsigned j = 0; j < phi_; ++j) {
        const BigInt& v = a.c[static_cast<std::size_t>(i) * phi_ + j];
        if (v == 0) continue;
        if (!s.empty()) s += " + ";
        s += "(" + v.str() + ")";
        if (i) s += "x^" + std::to_string(i);
        if (j) s += "xi^" + std::to_string(j);
      }
    return s.empty() ? "0" : s;
  }

 private:
  CycloInt reduce_xi_power(std::uint64_t c) const {
    std::vector<BigInt> poly(c + 1, 0);
    poly[c] = 1;
    for (std::size_t j = poly.size(); j-- > phi_;) {
      BigInt top = poly[j];
      if (top == 0) continue;
      poly[j] = 0;
      for (std::size_t k = 0; k < phi_; ++k) poly[j - phi_ + k] -= top * cyc_[k];
    }
    CycloInt r = zero();
    for (std::size_t j = 0; j < phi_ && j < poly.size(); ++j) r.c[j] = poly[j];
    return r;
  }

  std::uint32_t p_;
  unsigned n_;
  std::uint64_t q_;
  std::uint64_t pn_ = 0;
  unsigned e_ = 0, phi_ = 0;
  std::vector<BigInt> eis_;
  std::vector<BigInt> cyc_;
  std::vector<CycloInt> zeta_table_;
  std::vector<CycloInt> xi_table_;
};

// ---------------------------------------------------------------------------

// v_p of a p-adic element, or "at least `bound`" when it vanishes at the working precision.
struct PadicValuation {
  bool finite = false;
  Rational value{0};
  std::int64_t bound = 0;
  static PadicValuation exact(Rational v) { return {true, v, 0}; }
  static PadicValuation at_least(std::int64_t m) { return {false, Rational(0), m}; }
};

struct CycloPadic {
  std::vector<GaloisRingElement> c;  // coefficient of x^i, i < e
  bool operator==(const CycloPadic&) const = default;
};

// Z_p[zeta_{p^n}] (x) W(F_q) modulo p^M, with xi -> [g] for the canonical generator g of F_q.
class CycloPadicRing {
 public:
  CycloPadicRing(std::uint32_t p, unsigned n, const FieldDesc& residue, unsigned M)
      : p_(p), n_(n), M_(M), gr_(residue, M) {
    require(residue.p == p, "residue field characteristic mismatch");
    require(M >= 1, "p-adic precision must be >= 1");
    pn_ = ipow(p, n);
    e_ = static_cast<unsigned>(pn_ / p * (p - 1));
    pM_ = gr_.modulus();
    const std::uint64_t step = pn_ / p;
    std::vector<BigInt> eis(e_ + 1, 0);
    for (std::uint32_t k = 0; k < p; ++k)
      for (std::uint64_t i = 0; i <= k * step; ++i) eis[i] += detail::binomial(k * step, i);
    eis_.resize(e_);
    for (unsigned i = 0; i < e_; ++i) eis_[i] = reduce_big(eis[i]);
    const Field& F = gr_.residue_field();
    GaloisRingElement tg = gr_.teichmuller(F.generator());
    const std::uint64_t q = F.order();
    xi_pows_.reserve(q - 1);
    GaloisRingElement cur = gr_.one();
    for (std::uint64_t j = 0; j + 1 < q; ++j) {
      xi_pows_.push_back(cur);
      cur = gr_.mul(cur, tg);
    }
  }

  std::uint32_t p() const { return p_; }
  unsigned length() const { return n_; }
  unsigned precision() const { return M_; }
  unsigned e() const { return e_; }
  const GaloisRing& coefficient_ring() const { return gr_; }

  CycloPadic zero() const { return CycloPadic{std::vector<GaloisRingElement>(e_, gr_.zero())}; }
  CycloPadic from_int(std::int64_t v) const {
    CycloPadic z = zero();
    z.c[0] = gr_.from_int(v);
    return z;
  }
  CycloPadic one() const { return from_int(1); }
  CycloPadic x() const {
    CycloPadic z = zero();
    z.c[1] = gr_.one();
    return z;
  }
  CycloPadic scalar(const GaloisRingElement& a) const {
    CycloPadic z = zero();
    z.c[0] = a;
    return z;
  }
  CycloPadic xi_power(std::int64_t c) const {
    return scalar(xi_pows_[static_cast<std::size_t>(modp::reduce(c, xi_pows_.size()))]);
  }
  CycloPadic zeta_power(std::int64_t w) const { return pow(add(one(), x()), modp::reduce(w, pn_)); }

  CycloPadic from_cyclo(const CycloRing& R, const CycloInt& a) const {
    require(R.e() == e_ && R.p() == p_ && R.q() == gr_.residue_field().order(), "cyclotomic ring shape mismatch");
    CycloPadic z = zero();
    const unsigned P = R.phi();
    for (unsigned i = 0; i < e_; ++i)
      for (unsigned j = 0; j < P; ++j) {
        const BigInt& v = a.c[static_cast<std::size_t>(i) * P + j];
        if (v == 0) continue;
        z.c[i] = gr_.add(z.c[i], gr_.scale(xi_pows_[j], static_cast<std::int64_t>(reduce_big(v))));
      }
    return z;
  }

  bool is_zero(const CycloPadic& a) const {
    for (auto& g : a.c)
      for (auto v : g.c)
        if (v != 0) return false;
    return true;
  }

  CycloPadic add(const CycloPadic& a, const CycloPadic& b) const {
    CycloPadic r = a;
    for (unsigned i = 0; i < e_; ++i) r.c[i] = gr_.add(a.c[i], b.c[i]);
    return r;
  }
  CycloPadic sub(const CycloPadic& a, const CycloPadic& b) const {
    CycloPadic r = a;
    for (unsigned i = 0; i < e_; ++i) r.c[i] = gr_.sub(a.c[i], b.c[i]);
    return r;
  }
  CycloPadic neg(const CycloPadic& a) const { return sub(zero(), a); }
  CycloPadic scale(const CycloPadic& a, std::int64_t s) const {
    CycloPadic r = a;
    for (auto& g : r.c) g = gr_.scale(g, s);
    return r;
  }
  CycloPadic mul_scalar(const CycloPadic& a, const GaloisRingElement& s) const {
    CycloPadic r = a;
    for (auto& g : r.c) g = gr_.mul(g, s);
    return r;
  }

  CycloPadic mul(const CycloPadic& a, const CycloPadic& b) const {
    std::vector<GaloisRingElement> acc(2 * e_ - 1, gr_.zero());
    const bool scalar_ring = gr_.degree() == 1;
    for (unsigned i = 0; i < e_; ++i) {
      if (is_zero_coeff(a.c[i])) continue;
      for (unsigned j = 0; j < e_; ++j) {
        if (is_zero_coeff(b.c[j])) continue;
        if (scalar_ring) {
          acc[i + j].c[0] = (acc[i + j].c[0] + modp::mul(a.c[i].c[0], b.c[j].c[0], pM_)) % pM_;
        } else {
          acc[i + j] = gr_.add(acc[i + j], gr_.mul(a.c[i], b.c[j]));
        }
      }
    }
    for (unsigned i = 2 * e_ - 1; i-- > e_;) {
      if (is_zero_coeff(acc[i])) continue;
      GaloisRingElement top = acc[i];
      acc[i] = gr_.zero();
      for (unsigned k = 0; k < e_; ++k) {
        if (eis_[k] == 0) continue;
        acc[i - e_ + k] = gr_.sub(acc[i - e_ + k], gr_.scale(top, static_cast<std::int64_t>(eis_[k])));
      }
    }
    acc.resize(e_);
    return CycloPadic{std::move(acc)};
  }

  CycloPadic pow(CycloPadic b, std::uint64_t e) const {
    CycloPadic r = one();
    while (e) {
      if (e & 1) r = mul(r, b);
      e >>= 1;
      if (e) b = mul(b, b);
    }
    return r;
  }

  bool is_unit(const CycloPadic& a) const {
    for (auto v : a.c[0].c)
      if (v % p_ != 0) return true;
    return false;
  }

  CycloPadic inverse(const CycloPadic& u) const {
    ensure(is_unit(u), "inverse of a non-unit p-adic element");
    const std::uint64_t q = gr_.residue_field().order();
    // unit group of GR(p^M, a) has exponent (q - 1) p^{M-1}
    const std::uint64_t exponent = (q - 1) * ipow(p_, M_ - 1) - 1;
    CycloPadic y = scalar(gr_.pow(u.c[0], exponent));
    for (unsigned it = 0; it < 2 * 64; ++it) {
      CycloPadic next = mul(y, sub(from_int(2), mul(u, y)));
      if (next == y) return y;
      y = std::move(next);
    }
    throw InvariantError("Newton inversion did not stabilize");
  }

  // Divide by p where every coefficient is divisible; the top digit becomes 0.
  CycloPadic divide_by_p(CycloPadic a) const {
    for (auto& g : a.c)
      for (auto& v : g.c) {
        ensure(v % p_ == 0, "divide_by_p on an element not divisible by p");
        v /= p_;
      }
    return a;
  }

  // Exact division by an integer k: the p-part is removed by divide_by_p (losing
  // digits) and the prime-to-p part is inverted.
  CycloPadic divide_int(CycloPadic a, std::int64_t k) const {
    require(k != 0, "division by zero");
    std::uint64_t uk = static_cast<std::uint64_t>(k < 0 ? -k : k);
    while (uk % p_ == 0) {
      a = divide_by_p(a);
      uk /= p_;
    }
    std::int64_t inv = static_cast<std::int64_t>(modp::inv(uk % pM_, pM_));
    if (k < 0) inv = -inv;
    return scale(a, inv);
  }

  PadicValuation valuation(const CycloPadic& a) const {
    bool found = false;
    Rational best(0);
    for (unsigned i = 0; i < e_; ++i) {
      unsigned v = M_;
      for (auto c : a.c[i].c)
        if (c != 0) v = std::min(v, int_valuation(c, p_));
      if (v >= M_) continue;
      Rational cand = Rational(static_cast<std::int64_t>(v)) + Rational(static_cast<std::int64_t>(i), e_);
      if (!found || cand < best) best = cand;
      found = true;
    }
    if (!found) return PadicValuation::at_least(M_);
    return PadicValuation::exact(best);
  }

  std::uint64_t reduce_big(const BigInt& v) const {
    BigInt r = v % pM_;
    if (r < 0) r += pM_;
    return static_cast<std::uint64_t>(r);
  }

 private:
  static bool is_zero_coeff(const GaloisRingElement& g) {
    for (auto v : g.c)
      if (v != 0) return false;
    return true;
  }

  std::uint32_t p_;
  unsigned n_;
  unsigned M_;
  GaloisRing gr_;
  std::uint64_t pn_ = 0, pM_ = 0;
  unsigned e_ = 0;
  std::vector<std::uint64_t> eis_;  // Phi_{p^n}(1 + x) below the leading term, mod p^M
  std::vector<GaloisRingElement> xi_pows_;
};

// Truncated power series with CycloPadic coefficients; terms of index >= order are unknown.
struct PadicSeries {
  std::vector<CycloPadic> c;
  std::size_t order() const { return c.size(); }
};

inline PadicSeries series_mul(const CycloPadicRing& R, const PadicSeries& a, const PadicSeries& b) {
  const std::size_t order = std::min(a.order(), b.order());
  PadicSeries r{std::vector<CycloPadic>(order, R.zero())};
  for (std::size_t i = 0; i < order; ++i) {
    if (R.is_zero(a.c[i])) continue;
    for (std::size_t j = 0; i + j < order; ++j) {
      if (R.is_zero(b.c[j])) continue;
      r.c[i + j] = R.add(r.c[i + j], R.mul(a.c[i], b.c[j]));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

// Exact rational coefficients of E(x) = exp(sum_i x^{p^i} / p^i) below x^prec,
// from n a_n = sum_{p^i <= n} a_{n - p^i}.
inline std::vector<BigRational> artin_hasse_rational(std::uint32_t p, std::size_t prec) {
  require(prec >= 1, "Artin-Hasse precision must be >= 1");
  std::vector<BigRational> a(prec, BigRational(0));
  a[0] = 1;
  for (std::size_t n = 1; n < prec; ++n) {
    BigRational s = 0;
    for (std::size_t pk = 1; pk <= n; pk *= p) s += a[n - pk];
    a[n] = s / BigRational(static_cast<long long>(n));
  }
  return a;
}

// Artin-Hasse coefficients reduced mod p^M; asserts p-integrality.
inline std::vector<std::uint64_t> artin_hasse_series(std::uint32_t p, std::size_t prec, unsigned M) {
  const std::uint64_t pM = ipow(p, M);
  std::vector<std::uint64_t> out;
  out.reserve(prec);
  for (const auto& r : artin_hasse_rational(p, prec)) {
    BigInt num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
    ensure(den % p != 0, "Artin-Hasse coefficient is not p-integral");
    BigInt nm = num % pM;
    if (nm < 0) nm += pM;
    BigInt dm = den % pM;
    std::uint64_t inv = modp::inv(static_cast<std::uint64_t>(dm), pM);
    out.push_back(modp::mul(static_cast<std::uint64_t>(nm), inv, pM));
  }
  return out;
}

// Evaluate sum_k coeffs[k] z^k in R (Horner).
inline CycloPadic evaluate_series(const CycloPadicRing& R, const std::vector<std::uint64_t>& coeffs,
                                  const CycloPadic& z) {
  CycloPadic acc = R.zero();
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = R.add(R.mul(acc, z), R.from_int(static_cast<std::int64_t>(coeffs[k])));
  return acc;
}

// gamma_i with E(gamma_i) = zeta_{p^n}^{p^{n-i}} and v_p(gamma_i) = 1 / (p^{i-1}(p-1)),
// by Newton iteration from zeta^{p^{n-i}} - 1.
inline CycloPadic solve_gamma(const CycloPadicRing& R, unsigned i) {
  const unsigned n = R.length();
  const std::uint32_t p = R.p();
  require(i >= 1 && i <= n, "gamma level must be in [1, n]");
  const unsigned M = R.precision();
  const std::uint64_t denom = ipow(p, i - 1) * (p - 1);
  // terms beyond K have valuation > M
  const std::size_t K = static_cast<std::size_t>((M + 1) * denom + 2);
  auto E = artin_hasse_series(p, K, M);
  std::vector<std::uint64_t> dE(K - 1);
  const std::uint64_t pM = ipow(p, M);
  for (std::size_t k = 1; k < K; ++k) dE[k - 1] = modp::mul(E[k], k % pM, pM);
  const CycloPadic target = R.zeta_power(static_cast<std::int64_t>(ipow(p, n - i)));
  CycloPadic g = R.sub(target, R.one());
  bool converged = false;
  for (unsigned it = 0; it < 4 * M; ++it) {
    CycloPadic residual = R.sub(evaluate_series(R, E, g), target);
    if (R.is_zero(residual)) {
      converged = true;
      break;
    }
    CycloPadic step = R.mul(residual, R.inverse(evaluate_series(R, dE, g)));
    g = R.sub(g, step);
  }
  if (!converged) throw BudgetError("gamma_" + std::to_string(i) + " did not converge at precision " + std::to_string(M));
  PadicValuation v = R.valuation(g);
  ensure(v.finite && v.value == Rational(1, static_cast<std::int64_t>(denom)),
         "gamma_" + std::to_string(i) + " has the wrong valuation");
  return g;
}

}  // namespace abelnp
