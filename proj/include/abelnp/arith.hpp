#pragma once

// Finite fields F_{p^m}, Galois rings GR(p^n, m) ~ W_n(F_{p^m}), Teichmuller
// lifts, the p-Frobenius and Witt traces.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "abelnp/error.hpp"

namespace abelnp {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'a11e'0f'c0deULL;

namespace modp {

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t pow(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mul(r, b, m);
    b = mul(b, b, m);
    e >>= 1;
  }
  return r;
}

inline std::uint64_t inv(std::uint64_t a, std::uint64_t m) {
  std::int64_t t = 0, nt = 1;
  std::int64_t r = static_cast<std::int64_t>(m), nr = static_cast<std::int64_t>(a % m);
  while (nr != 0) {
    std::int64_t q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  ensure(r == 1, "modular inverse of a non-unit");
  if (t < 0) t += static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(t);
}

inline std::uint64_t reduce(std::int64_t a, std::uint64_t m) {
  std::int64_t r = a % static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(m) : r);
}

}  // namespace modp

inline std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (b != 0 && r > std::numeric_limits<std::uint64_t>::max() / b)
      throw BudgetError("integer power overflows 64 bits");
    r *= b;
  }
  return r;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

// p-adic valuation of a nonzero integer.
inline unsigned int_valuation(std::uint64_t x, std::uint64_t p) {
  unsigned v = 0;
  while (x != 0 && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Dense polynomials over F_p, lowest degree first, no trailing zeros.

namespace fp_poly {

using Poly = std::vector<std::uint32_t>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int degree(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly add(const Poly& a, const Poly& b, std::uint32_t p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::uint32_t x = i < a.size() ? a[i] : 0;
    std::uint32_t y = i < b.size() ? b[i] : 0;
    r[i] = (x + y) % p;
  }
  trim(r);
  return r;
}

inline Poly sub(const Poly& a, const Poly& b, std::uint32_t p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::uint32_t x = i < a.size() ? a[i] : 0;
    std::uint32_t y = i < b.size() ? b[i] : 0;
    r[i] = (x + p - y) % p;
  }
  trim(r);
  return r;
}

inline Poly mul(const Poly& a, const Poly& b, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  std::vector<std::uint64_t> acc(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) acc[i + j] += static_cast<std::uint64_t>(a[i]) * b[j];
  Poly r(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) r[i] = static_cast<std::uint32_t>(acc[i] % p);
  trim(r);
  return r;
}

inline std::pair<Poly, Poly> divmod(Poly a, const Poly& b, std::uint32_t p) {
  ensure(!b.empty(), "polynomial division by zero");
  trim(a);
  if (a.size() < b.size()) return {{}, a};
  const std::uint32_t lc_inv = static_cast<std::uint32_t>(modp::inv(b.back(), p));
  Poly q(a.size() - b.size() + 1, 0);
  for (std::size_t i = a.size(); i-- >= b.size();) {
    std::uint32_t c = static_cast<std::uint32_t>(static_cast<std::uint64_t>(a[i]) * lc_inv % p);
    q[i - b.size() + 1] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::size_t k = i - b.size() + 1 + j;
      a[k] = static_cast<std::uint32_t>((a[k] + p - static_cast<std::uint64_t>(c) * b[j] % p) % p);
    }
  }
  trim(q);
  trim(a);
  return {q, a};
}

inline Poly mod(const Poly& a, const Poly& f, std::uint32_t p) { return divmod(a, f, p).second; }

inline Poly mulmod(const Poly& a, const Poly& b, const Poly& f, std::uint32_t p) {
  return mod(mul(a, b, p), f, p);
}

inline Poly powmod(Poly base, std::uint64_t e, const Poly& f, std::uint32_t p) {
  Poly r{1};
  base = mod(base, f, p);
  while (e) {
    if (e & 1) r = mulmod(r, base, f, p);
    base = mulmod(base, base, f, p);
    e >>= 1;
  }
  return mod(r, f, p);
}

inline Poly monic(Poly a, std::uint32_t p) {
  trim(a);
  if (a.empty()) return a;
  std::uint64_t inv = modp::inv(a.back(), p);
  for (auto& c : a) c = static_cast<std::uint32_t>(c * inv % p);
  return a;
}

inline Poly gcd(Poly a, Poly b, std::uint32_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, p);
}

// Rabin's test: f of degree m is irreducible iff x^{p^m} = x mod f and
// gcd(x^{p^{m/r}} - x, f) = 1 for every prime r | m.
inline bool is_irreducible(const Poly& f, std::uint32_t p) {
  const int m = degree(f);
  if (m < 1) return false;
  if (m == 1) return true;
  const Poly x{0, 1};
  auto frob_iter = [&](unsigned k) {
    Poly y = x;
    for (unsigned i = 0; i < k; ++i) y = powmod(y, p, f, p);
    return y;
  };
  if (sub(frob_iter(static_cast<unsigned>(m)), x, p) != Poly{}) return false;
  for (auto r : prime_factors(static_cast<std::uint64_t>(m))) {
    Poly g = gcd(f, sub(frob_iter(static_cast<unsigned>(m / r)), x, p), p);
    if (degree(g) != 0) return false;
  }
  return true;
}

}  // namespace fp_poly

// ---------------------------------------------------------------------------
// Field descriptions and elements.

struct FieldDesc {
  std::uint32_t p = 0;
  std::uint32_t m = 0;
  std::vector<std::uint32_t> modulus;  // monic, degree m, lowest coefficient first

  std::uint64_t order() const { return ipow(p, m); }
  bool operator==(const FieldDesc&) const = default;

  static FieldDesc from_modulus(std::uint32_t p, std::vector<std::uint32_t> modulus) {
    require(p >= 3 && is_prime(p), "field characteristic must be an odd prime, got " + std::to_string(p));
    for (auto& c : modulus) c %= p;
    fp_poly::trim(modulus);
    require(modulus.size() >= 2 && modulus.back() == 1, "field modulus must be monic of degree >= 1");
    require(fp_poly::is_irreducible(modulus, p), "field modulus is reducible over F_p");
    FieldDesc d;
    d.p = p;
    d.m = static_cast<std::uint32_t>(modulus.size() - 1);
    d.modulus = std::move(modulus);
    return d;
  }

  static FieldDesc prime(std::uint32_t p) { return from_modulus(p, {0, 1}); }

  // Seeded random search for a monic irreducible of degree m.  With
  // `primitive` the root of the modulus also generates the unit group.
  static FieldDesc generate(std::uint32_t p, std::uint32_t m, std::uint64_t seed = kDefaultSeed,
                            bool primitive = false);
};

struct FieldElement {
  std::vector<std::uint32_t> c;  // exactly m coefficients in F_p
  bool operator==(const FieldElement&) const = default;
};

// Arithmetic on FieldElement relative to one FieldDesc, plus a fast path on
// integer indices (sum of c_i p^i) with log tables for small fields.
class Field {
 public:
  using Index = std::uint32_t;
  static constexpr std::uint64_t kTableLimit = 1u << 20;

  Field() = default;
  explicit Field(FieldDesc desc, bool with_tables = true) : desc_(std::move(desc)) {
    q_ = desc_.order();
    find_generator();
    if (with_tables) build_tables();
  }

  const FieldDesc& desc() const { return desc_; }
  std::uint32_t p() const { return desc_.p; }
  std::uint32_t degree() const { return desc_.m; }
  std::uint64_t order() const { return q_; }

  FieldElement zero() const { return FieldElement{std::vector<std::uint32_t>(desc_.m, 0)}; }
  FieldElement constant(std::int64_t c) const {
    FieldElement z = zero();
    z.c[0] = static_cast<std::uint32_t>(modp::reduce(c, desc_.p));
    return z;
  }
  FieldElement one() const { return constant(1); }
  // The class of x in F_p[x]/(modulus).
  FieldElement root() const {
    if (desc_.m == 1) return constant(-static_cast<std::int64_t>(desc_.modulus[0]));
    FieldElement z = zero();
    z.c[1] = 1;
    return z;
  }

  bool is_zero(const FieldElement& a) const {
    return std::all_of(a.c.begin(), a.c.end(), [](std::uint32_t v) { return v == 0; });
  }

  FieldElement add(const FieldElement& a, const FieldElement& b) const {
    FieldElement r = zero();
    for (std::uint32_t i = 0; i < desc_.m; ++i) r.c[i] = (a.c[i] + b.c[i]) % desc_.p;
    return r;
  }
  FieldElement sub(const FieldElement& a, const FieldElement& b) const {
    FieldElement r = zero();
    for (std::uint32_t i = 0; i < desc_.m; ++i) r.c[i] = (a.c[i] + desc_.p - b.c[i]) % desc_.p;
    return r;
  }
  FieldElement neg(const FieldElement& a) const { return sub(zero(), a); }
  FieldElement scale(const FieldElement& a, std::int64_t s) const {
    FieldElement r = zero();
    std::uint64_t k = modp::reduce(s, desc_.p);
    for (std::uint32_t i = 0; i < desc_.m; ++i) r.c[i] = static_cast<std::uint32_t>(a.c[i] * k % desc_.p);
    return r;
  }
  FieldElement mul(const FieldElement& a, const FieldElement& b) const {
    return from_poly(fp_poly::mulmod(to_poly(a), to_poly(b), desc_.modulus, desc_.p));
  }
  FieldElement pow(const FieldElement& a, std::uint64_t e) const {
    return from_poly(fp_poly::powmod(to_poly(a), e, desc_.modulus, desc_.p));
  }
  FieldElement inv(const FieldElement& a) const {
    ensure(!is_zero(a), "inverse of zero in a finite field");
    return pow(a, q_ - 2);
  }
  FieldElement frobenius(const FieldElement& a) const { return pow(a, desc_.p); }
  // Inverse of the p-power map: a^{p^{m-1}}.
  FieldElement frobenius_inverse(const FieldElement& a) const {
    FieldElement r = a;
    for (std::uint32_t i = 0; i + 1 < desc_.m; ++i) r = frobenius(r);
    return r;
  }

  std::uint64_t multiplicative_order(const FieldElement& a) const {
    ensure(!is_zero(a), "order of zero");
    std::uint64_t ord = q_ - 1;
    for (auto r : prime_factors(q_ - 1)) {
      while (ord % r == 0 && pow(a, ord / r) == one()) ord /= r;
    }
    return ord;
  }

  Index index(const FieldElement& a) const {
    std::uint64_t idx = 0;
    for (std::uint32_t i = desc_.m; i-- > 0;) idx = idx * desc_.p + a.c[i];
    return static_cast<Index>(idx);
  }
  FieldElement element(Index idx) const {
    FieldElement r = zero();
    for (std::uint32_t i = 0; i < desc_.m; ++i) {
      r.c[i] = idx % desc_.p;
      idx /= desc_.p;
    }
    return r;
  }

  // Canonical generator of the unit group: the primitive element of least index.
  const FieldElement& generator() const { return generator_; }

  // Fast index arithmetic; requires order() <= kTableLimit.
  bool has_tables() const { return !log_.empty(); }
  Index iadd(Index a, Index b) const {
    if (!add_table_.empty()) return add_table_[static_cast<std::size_t>(a) * q_ + b];
    return digit_add(a, b, false);
  }
  Index isub(Index a, Index b) const { return digit_add(a, b, true); }
  Index ineg(Index a) const { return digit_add(0, a, true); }
  Index imul(Index a, Index b) const {
    if (a == 0 || b == 0) return 0;
    std::uint64_t s = static_cast<std::uint64_t>(log_[a]) + log_[b];
    if (s >= q_ - 1) s -= q_ - 1;
    return exp_[s];
  }
  Index iinv(Index a) const {
    ensure(a != 0, "inverse of zero in a finite field");
    std::uint64_t l = log_[a];
    return exp_[l == 0 ? 0 : q_ - 1 - l];
  }
  Index ipow(Index a, std::uint64_t e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    return exp_[modp::mul(log_[a], e % (q_ - 1), q_ - 1)];
  }
  Index ifrob(Index a) const { return ipow(a, desc_.p); }
  Index ifrob_inverse(Index a) const { return ipow(a, q_ / desc_.p); }  // a^{p^{m-1}}
  // Discrete log to the canonical generator (a != 0).
  std::uint64_t ilog(Index a) const {
    ensure(a != 0, "discrete log of zero");
    return log_[a];
  }
  Index iexp(std::uint64_t e) const { return exp_[e % (q_ - 1)]; }

  static fp_poly::Poly to_poly(const FieldElement& a) {
    fp_poly::Poly r(a.c.begin(), a.c.end());
    fp_poly::trim(r);
    return r;
  }
  FieldElement from_poly(const fp_poly::Poly& a) const {
    FieldElement r = zero();
    for (std::size_t i = 0; i < a.size() && i < desc_.m; ++i) r.c[i] = a[i];
    return r;
  }

 private:
  Index digit_add(Index a, Index b, bool subtract) const {
    std::uint64_t r = 0, scale = 1;
    const std::uint32_t p = desc_.p;
    for (std::uint32_t i = 0; i < desc_.m; ++i) {
      std::uint32_t x = a % p, y = b % p;
      a /= p;
      b /= p;
      r += scale * (subtract ? (x + p - y) % p : (x + y) % p);
      scale *= p;
    }
    return static_cast<Index>(r);
  }

  void find_generator() {
    for (Index i = 1; i < q_; ++i) {
      FieldElement z = element(i);
      if (multiplicative_order(z) == q_ - 1) {
        generator_ = z;
        return;
      }
    }
  }

  void build_tables() {
    if (q_ > kTableLimit) return;
    exp_.assign(q_ - 1, 0);
    log_.assign(q_, 0);
    FieldElement cur = one();
    for (std::uint64_t e = 0; e + 1 < q_; ++e) {
      Index idx = index(cur);
      exp_[e] = idx;
      log_[idx] = static_cast<std::uint32_t>(e);
      cur = mul(cur, generator_);
    }
    if (q_ <= 1024) {
      add_table_.resize(q_ * q_);
      for (Index a = 0; a < q_; ++a)
        for (Index b = 0; b < q_; ++b) add_table_[static_cast<std::size_t>(a) * q_ + b] = digit_add(a, b, false);
    }
  }

  FieldDesc desc_;
  std::uint64_t q_ = 0;
  FieldElement generator_;
  std::vector<Index> exp_;
  std::vector<std::uint32_t> log_;
  std::vector<Index> add_table_;
};

inline FieldDesc FieldDesc::generate(std::uint32_t p, std::uint32_t m, std::uint64_t seed, bool primitive) {
  require(p >= 3 && is_prime(p), "field characteristic must be an odd prime");
  require(m >= 1, "extension degree must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> coeff(0, p - 1);
  const std::uint64_t q = ipow(p, m);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    fp_poly::Poly f(m + 1, 0);
    f[m] = 1;
    for (std::uint32_t i = 0; i < m; ++i) f[i] = coeff(rng);
    if (f[0] == 0) continue;
    if (!fp_poly::is_irreducible(f, p)) continue;
    if (primitive) {
      // order of x in F_p[x]/(f) must be q - 1
      bool ok = true;
      for (auto r : prime_factors(q - 1)) {
        if (fp_poly::powmod({0, 1}, (q - 1) / r, f, p) == fp_poly::Poly{1}) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
    }
    return from_modulus(p, f);
  }
  throw InvariantError("no irreducible polynomial of degree " + std::to_string(m) + " found within budget");
}

// Ring map F_q -> F_{q^k}; determined by the image of the root of the source modulus.
struct FieldEmbedding {
  FieldDesc source;
  FieldDesc target;
  FieldElement generator_image;

  FieldElement operator()(const Field& target_field, const FieldElement& a) const {
    FieldElement r = target_field.zero();
    FieldElement power = target_field.one();
    for (std::uint32_t i = 0; i < source.m; ++i) {
      if (a.c[i] != 0) r = target_field.add(r, target_field.scale(power, a.c[i]));
      power = target_field.mul(power, generator_image);
    }
    return r;
  }
};

// F_{q^k} as F_p[y]/(h) with h primitive of degree m*k, together with an
// embedding of F_q found by locating a root of the base modulus among the
// powers of a generator of the subfield of order q.
inline std::pair<FieldDesc, FieldEmbedding> make_extension(const FieldDesc& base, unsigned k,
                                                           std::uint64_t seed = kDefaultSeed) {
  require(k >= 1, "extension degree k must be >= 1");
  const std::uint32_t big_m = base.m * k;
  FieldDesc target = FieldDesc::generate(base.p, big_m, seed, true);
  Field tf(target, false);
  const std::uint64_t q = base.order();
  // y generates the unit group; y^{(Q-1)/(q-1)} generates the subfield F_q^x.
  FieldElement sub_gen = tf.pow(tf.root(), (tf.order() - 1) / (q - 1));
  auto eval_modulus = [&](const FieldElement& z) {
    FieldElement acc = tf.zero();
    for (std::size_t i = base.modulus.size(); i-- > 0;) acc = tf.add(tf.mul(acc, z), tf.constant(base.modulus[i]));
    return acc;
  };
  FieldElement cand = tf.one();
  for (std::uint64_t j = 0; j < q - 1; ++j) {
    if (tf.is_zero(eval_modulus(cand))) return {target, FieldEmbedding{base, target, cand}};
    cand = tf.mul(cand, sub_gen);
  }
  if (tf.is_zero(eval_modulus(tf.zero()))) return {target, FieldEmbedding{base, target, tf.zero()}};
  throw InvariantError("failed to embed base field: no root of its modulus in the extension");
}

// ---------------------------------------------------------------------------
// Galois rings GR(p^n, m) = (Z/p^n)[x]/(lift of modulus), realizing W_n(F_{p^m}).

struct GaloisRingElement {
  std::vector<std::uint64_t> c;  // m coefficients mod p^n
  bool operator==(const GaloisRingElement&) const = default;
};

class GaloisRing {
 public:
  GaloisRing(FieldDesc residue, unsigned length) : field_(std::move(residue), false), n_(length) {
    require(n_ >= 1, "Witt length must be >= 1");
    pn_ = ipow(field_.p(), n_);
    if (pn_ > (std::uint64_t{1} << 62)) throw BudgetError("Galois ring modulus p^n exceeds 62 bits");
    m_ = field_.degree();
    modulus_.assign(field_.desc().modulus.begin(), field_.desc().modulus.end());
  }

  const Field& residue_field() const { return field_; }
  std::uint32_t p() const { return field_.p(); }
  unsigned length() const { return n_; }
  std::uint32_t degree() const { return m_; }
  std::uint64_t modulus() const { return pn_; }

  GaloisRingElement zero() const { return GaloisRingElement{std::vector<std::uint64_t>(m_, 0)}; }
  GaloisRingElement from_int(std::int64_t v) const {
    GaloisRingElement z = zero();
    z.c[0] = modp::reduce(v, pn_);
    return z;
  }
  GaloisRingElement one() const { return from_int(1); }

  GaloisRingElement add(const GaloisRingElement& a, const GaloisRingElement& b) const {
    GaloisRingElement r = zero();
    for (std::uint32_t i = 0; i < m_; ++i) r.c[i] = (a.c[i] + b.c[i]) % pn_;
    return r;
  }
  GaloisRingElement sub(const GaloisRingElement& a, const GaloisRingElement& b) const {
    GaloisRingElement r = zero();
    for (std::uint32_t i = 0; i < m_; ++i) r.c[i] = (a.c[i] + pn_ - b.c[i]) % pn_;
    return r;
  }
  GaloisRingElement neg(const GaloisRingElement& a) const { return sub(zero(), a); }
  GaloisRingElement scale(const GaloisRingElement& a, std::int64_t s) const {
    GaloisRingElement r = zero();
    std::uint64_t k = modp::reduce(s, pn_);
    for (std::uint32_t i = 0; i < m_; ++i) r.c[i] = modp::mul(a.c[i], k, pn_);
    return r;
  }
  GaloisRingElement mul(const GaloisRingElement& a, const GaloisRingElement& b) const {
    std::vector<unsigned __int128> acc(2 * m_ - 1, 0);
    for (std::uint32_t i = 0; i < m_; ++i) {
      if (a.c[i] == 0) continue;
      for (std::uint32_t j = 0; j < m_; ++j) acc[i + j] += static_cast<unsigned __int128>(a.c[i]) * b.c[j] % pn_;
    }
    std::vector<std::uint64_t> r(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) r[i] = static_cast<std::uint64_t>(acc[i] % pn_);
    // reduce by the monic lift of the modulus
    for (std::size_t i = r.size(); i-- > m_;) {
      std::uint64_t top = r[i];
      if (top == 0) continue;
      r[i] = 0;
      for (std::uint32_t j = 0; j < m_; ++j) {
        std::uint64_t t = modp::mul(top, modulus_[j], pn_);
        std::size_t k = i - m_ + j;
        r[k] = (r[k] + pn_ - t) % pn_;
      }
    }
    r.resize(m_);
    return GaloisRingElement{std::move(r)};
  }
  GaloisRingElement pow(GaloisRingElement b, std::uint64_t e) const {
    GaloisRingElement r = one();
    while (e) {
      if (e & 1) r = mul(r, b);
      b = mul(b, b);
      e >>= 1;
    }
    return r;
  }

  // Coefficientwise lift of a residue field element (digits in [0, p)).
  GaloisRingElement lift(const FieldElement& a) const {
    GaloisRingElement z = zero();
    for (std::uint32_t i = 0; i < m_; ++i) z.c[i] = a.c[i];
    return z;
  }
  FieldElement reduce(const GaloisRingElement& z) const {
    FieldElement a = field_.zero();
    for (std::uint32_t i = 0; i < m_; ++i) a.c[i] = static_cast<std::uint32_t>(z.c[i] % field_.p());
    return a;
  }

  // [c] = lift(c)^{q^{n-1}} with q = p^m.
  GaloisRingElement teichmuller(const FieldElement& c) const {
    GaloisRingElement z = lift(c);
    const std::uint64_t steps = static_cast<std::uint64_t>(m_) * (n_ - 1);
    for (std::uint64_t i = 0; i < steps; ++i) z = pow(z, field_.p());
    return z;
  }

  // Digits (c_0, ..., c_{n-1}) with z = sum p^i [c_i].
  std::vector<FieldElement> teichmuller_digits(GaloisRingElement z) const {
    std::vector<FieldElement> out;
    const std::uint32_t p = field_.p();
    for (unsigned i = 0; i < n_; ++i) {
      FieldElement c = reduce(z);
      out.push_back(c);
      z = sub(z, teichmuller(c));
      for (auto& v : z.c) {
        ensure(v % p == 0, "Teichmuller digit extraction left a unit remainder");
        v /= p;
      }
    }
    return out;
  }

  // The p-Frobenius: sum p^i [c_i] -> sum p^i [c_i^p].
  GaloisRingElement frobenius(const GaloisRingElement& z) const {
    auto digits = teichmuller_digits(z);
    GaloisRingElement r = zero();
    std::uint64_t pi = 1;
    for (unsigned i = 0; i < n_; ++i) {
      r = add(r, scale(teichmuller(field_.frobenius(digits[i])), static_cast<std::int64_t>(pi)));
      pi *= field_.p();
    }
    return r;
  }

  bool is_scalar(const GaloisRingElement& z) const {
    return std::all_of(z.c.begin() + 1, z.c.end(), [](std::uint64_t v) { return v == 0; });
  }

 private:
  Field field_;
  unsigned n_ = 1;
  std::uint32_t m_ = 1;
  std::uint64_t pn_ = 0;
  std::vector<std::uint64_t> modulus_;
};

inline GaloisRingElement teichmuller_lift(const GaloisRing& ring, const FieldElement& c) {
  return ring.teichmuller(c);
}

inline GaloisRingElement galois_frobenius(const GaloisRing& ring, const GaloisRingElement& z) {
  return ring.frobenius(z);
}

// Witt vector (a_0, ..., a_{n-1}) -> sum_i p^i [a_i^{p^{-i}}].
inline GaloisRingElement witt_pack(const GaloisRing& ring, std::span<const FieldElement> coords) {
  require(coords.size() <= ring.length(), "more Witt coordinates than the Witt length");
  const Field& f = ring.residue_field();
  GaloisRingElement r = ring.zero();
  std::uint64_t pi = 1;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    FieldElement root = coords[i];
    for (std::size_t k = 0; k < i; ++k) root = f.frobenius_inverse(root);
    r = ring.add(r, ring.scale(ring.teichmuller(root), static_cast<std::int64_t>(pi)));
    pi *= f.p();
  }
  return r;
}

// Tr_{W_n(F_{p^m}) / W_n(F_p)}(z) = sum_{i < m} F^i(z), an element of Z/p^n.
inline std::uint64_t witt_trace(const GaloisRing& ring, const GaloisRingElement& z) {
  GaloisRingElement acc = ring.zero();
  GaloisRingElement cur = z;
  for (std::uint32_t i = 0; i < ring.degree(); ++i) {
    acc = ring.add(acc, cur);
    cur = ring.frobenius(cur);
  }
  ensure(cur == z, "Frobenius does not have order m on the Galois ring");
  ensure(ring.is_scalar(acc), "Witt trace is not in the prime subring");
  return acc.c[0];
}

// ---------------------------------------------------------------------------
// Log / Zech tables for enumerating large fields whose modulus root is primitive.
// Elements are stored as discrete logs to that root, kZero marks 0.

class ZechField {
 public:
  static constexpr std::uint32_t kZero = 0xFFFFFFFFu;

  explicit ZechField(const FieldDesc& desc) : p_(desc.p), m_(desc.m), modulus_(desc.modulus) {
    q_ = desc.order();
    if (q_ - 1 >= kZero) throw BudgetError("field too large for enumeration tables");
    q1_ = q_ - 1;
    log_.assign(q_, kZero);
    std::vector<std::uint32_t> digits(m_, 0);
    digits[0] = 1;
    std::uint64_t idx = 1;
    for (std::uint64_t e = 0; e < q1_; ++e) {
      ensure(log_[idx] == kZero, "modulus root is not primitive");
      log_[idx] = static_cast<std::uint32_t>(e);
      idx = times_root(digits);
    }
    zech_.assign(q1_, kZero);
    std::fill(digits.begin(), digits.end(), 0);
    digits[0] = 1;
    idx = 1;
    for (std::uint64_t e = 0; e < q1_; ++e) {
      std::uint64_t d0 = digits[0];
      std::uint64_t plus_one = d0 + 1 < p_ ? idx + 1 : idx - d0;
      zech_[e] = log_[plus_one];
      idx = times_root(digits);
    }
    neg_one_ = static_cast<std::uint32_t>(q1_ / 2);
  }

  std::uint64_t order() const { return q_; }
  std::uint32_t p() const { return p_; }

  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    if (a == kZero || b == kZero) return kZero;
    std::uint64_t s = static_cast<std::uint64_t>(a) + b;
    return static_cast<std::uint32_t>(s >= q1_ ? s - q1_ : s);
  }
  std::uint32_t div(std::uint32_t a, std::uint32_t b) const {
    ensure(b != kZero, "division by zero in enumeration field");
    if (a == kZero) return kZero;
    return static_cast<std::uint32_t>(a >= b ? a - b : a + q1_ - b);
  }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    if (a == kZero) return b;
    if (b == kZero) return a;
    std::uint64_t d = b >= a ? b - a : b + q1_ - a;
    std::uint32_t z = zech_[d];
    if (z == kZero) return kZero;
    return mul(a, z);
  }
  std::uint32_t neg(std::uint32_t a) const { return a == kZero ? kZero : mul(a, neg_one_); }

  std::uint32_t log_of(const FieldElement& a) const {
    std::uint64_t idx = 0;
    for (std::uint32_t i = m_; i-- > 0;) idx = idx * p_ + a.c[i];
    return log_[idx];
  }

 private:
  // digits <- digits * x mod modulus; returns the new index
  std::uint64_t times_root(std::vector<std::uint32_t>& d) const {
    std::uint32_t top = d[m_ - 1];
    for (std::uint32_t i = m_ - 1; i > 0; --i) d[i] = d[i - 1];
    d[0] = 0;
    if (m_ == 1) d[0] = top;  // x acts as the constant -modulus[0] when m = 1
    if (m_ == 1) {
      d[0] = static_cast<std::uint32_t>(static_cast<std::uint64_t>(top) * (p_ - modulus_[0]) % p_);
    } else if (top != 0) {
      for (std::uint32_t i = 0; i < m_; ++i) d[i] = (d[i] + p_ - top * modulus_[i] % p_) % p_;
    }
    std::uint64_t idx = 0;
    for (std::uint32_t i = m_; i-- > 0;) idx = idx * p_ + d[i];
    return idx;
  }

  std::uint32_t p_, m_;
  std::vector<std::uint32_t> modulus_;
  std::uint64_t q_ = 0, q1_ = 0;
  std::uint32_t neg_one_ = 0;
  std::vector<std::uint32_t> log_;
  std::vector<std::uint32_t> zech_;
};

}  // namespace abelnp
