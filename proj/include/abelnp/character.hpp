#pragma once

// Characters rho = rho^wild (x) chi on open subsets of P^1 over F_q, their
// local ramification data and the Hodge polygon HP(rho).
//
// Conventions: rho(Frob_x) = zeta_{p^n}^{Tr r(x)} * omega(N f(x))^{-Gamma}, where
// omega is the Teichmuller character, and eps_Q = Gamma * ord_Q(f) mod (q - 1).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "abelnp/arith.hpp"
#include "abelnp/fq_poly.hpp"
#include "abelnp/polygon.hpp"
#include "abelnp/witt.hpp"

namespace abelnp {

// Exponent applied to omega(N f(x)) in character values; eps_Q uses +Gamma.
inline constexpr int kTameValueSign = -1;

struct TamePart {
  RationalFunction f;
  std::uint64_t gamma = 0;
  bool operator==(const TamePart&) const = default;
};

struct CharacterSpec {
  FieldDesc field;
  unsigned n = 1;
  unsigned genus = 0;
  std::vector<RationalFunction> wild;  // Witt coordinates r_0, ..., r_{n-1}
  std::optional<TamePart> tame;
  std::vector<Point> extra_removed;
  std::uint64_t seed = kDefaultSeed;

  std::uint32_t p() const { return field.p; }
  unsigned a() const { return field.m; }
  std::uint64_t q() const { return field.order(); }
  bool operator==(const CharacterSpec&) const = default;
};

struct RamificationDatum {
  std::uint64_t s = 0;      // Swan conductor
  std::uint64_t eps = 0;    // tame exponent in [0, q - 2]
  std::uint64_t omega = 0;  // base-p digit sum of eps
  Rational e_class{0};      // eps / (q - 1)
  bool ramified() const { return s > 0 || eps != 0; }
  bool operator==(const RamificationDatum&) const = default;
};

inline std::uint64_t digit_sum(std::uint64_t v, std::uint32_t p) {
  std::uint64_t s = 0;
  for (; v; v /= p) s += v % p;
  return s;
}

inline RamificationDatum make_datum(std::uint64_t s, std::uint64_t eps, std::uint32_t p, std::uint64_t q) {
  RamificationDatum d;
  d.s = s;
  d.eps = eps % (q - 1);
  d.omega = digit_sum(d.eps, p);
  d.e_class = Rational(static_cast<std::int64_t>(d.eps), static_cast<std::int64_t>(q - 1));
  return d;
}

// (eps_Q, omega_Q, e_class) from ord_Q(f) and Gamma.
inline RamificationDatum tame_invariants(std::int64_t ord_f, std::uint64_t gamma, std::uint32_t p, std::uint64_t q) {
  return make_datum(0, modp::mul(gamma % (q - 1), modp::reduce(ord_f, q - 1), q - 1), p, q);
}

// Omega_rho = sum omega_Q / (a (p - 1)), asserted to be a nonnegative integer.
inline std::uint64_t omega_rho(const std::vector<RamificationDatum>& data, std::uint32_t p, unsigned a) {
  std::uint64_t total = 0;
  for (const auto& d : data) total += d.omega;
  const std::uint64_t denom = static_cast<std::uint64_t>(a) * (p - 1);
  ensure(total % denom == 0, "Omega_rho = " + std::to_string(total) + "/" + std::to_string(denom) + " is not an integer");
  return total / denom;
}

// The slope set S_Q.
inline std::vector<Rational> local_hodge_slopes(const RamificationDatum& d, std::uint32_t p, unsigned a) {
  std::vector<Rational> out;
  if (d.s == 0) return out;
  const std::int64_t s = static_cast<std::int64_t>(d.s);
  if (d.omega == 0) {
    for (std::int64_t k = 1; k < s; ++k) out.emplace_back(k, s);
  } else {
    const Rational shift(static_cast<std::int64_t>(d.omega), static_cast<std::int64_t>(a) * s * (p - 1));
    for (std::int64_t k = 1; k <= s; ++k) out.push_back(Rational(k, s) - shift);
  }
  return out;
}

inline std::vector<Rational> hodge_slopes(unsigned genus, const std::vector<RamificationDatum>& all, std::uint32_t p,
                                          unsigned a) {
  std::vector<RamificationDatum> data;
  for (const auto& d : all)
    if (d.ramified()) data.push_back(d);
  require(!data.empty(), "Hodge polygon needs at least one ramified point");
  const std::int64_t m = static_cast<std::int64_t>(data.size());
  std::int64_t n_tame = 0;
  for (const auto& d : data) n_tame += d.omega != 0;
  const std::int64_t Omega = static_cast<std::int64_t>(omega_rho(data, p, a));
  const std::int64_t g = genus;
  const std::int64_t zeros = g - 1 + m - Omega;
  const std::int64_t ones = g - 1 + m - n_tame + Omega;
  ensure(zeros >= 0 && ones >= 0, "Hodge polygon has a negative multiplicity (zeros " + std::to_string(zeros) +
                                      ", ones " + std::to_string(ones) + ")");
  std::vector<Rational> out(static_cast<std::size_t>(zeros), Rational(0));
  out.insert(out.end(), static_cast<std::size_t>(ones), Rational(1));
  for (const auto& d : data) {
    auto sq = local_hodge_slopes(d, p, a);
    out.insert(out.end(), sq.begin(), sq.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline RationalPolygon hodge_polygon(unsigned genus, const std::vector<RamificationDatum>& data, std::uint32_t p,
                                     unsigned a) {
  return from_slopes(hodge_slopes(genus, data, p, a));
}

// 2(g - 1 + m) + sum (s_Q - 1) over ramified points.
inline std::int64_t euler_poincare_degree(unsigned genus, const std::vector<RamificationDatum>& all) {
  std::int64_t m = 0, sum = 0;
  for (const auto& d : all) {
    if (!d.ramified()) continue;
    ++m;
    sum += static_cast<std::int64_t>(d.s) - 1;
  }
  std::int64_t D = 2 * (static_cast<std::int64_t>(genus) - 1 + m) + sum;
  require(D >= 0, "Euler-Poincare degree is negative (D = " + std::to_string(D) + "): the character is trivial");
  return D;
}

// The alternative endpoint abscissa g - 1 + m + sum s_Q, reported next to the degree.
inline std::int64_t remark_endpoint(unsigned genus, const std::vector<RamificationDatum>& all) {
  std::int64_t m = 0, sum = 0;
  for (const auto& d : all) {
    if (!d.ramified()) continue;
    ++m;
    sum += static_cast<std::int64_t>(d.s);
  }
  return static_cast<std::int64_t>(genus) - 1 + m + sum;
}

// ---------------------------------------------------------------------------

struct PointData {
  Point Q;
  LocalWittData reduced;
  std::int64_t ord_f = 0;
  RamificationDatum datum;
};

// Value of rho at a degree-one point, as exponents (w, c) of zeta_{p^n}^w xi^c.
struct CharacterValue {
  std::uint64_t w = 0;
  std::uint64_t c = 0;
  bool operator==(const CharacterValue&) const = default;
};

class Character {
 public:
  explicit Character(CharacterSpec spec) : spec_(std::move(spec)), F_(spec_.field), W_(spec_.p(), spec_.n) {
    require(spec_.n >= 1 && spec_.n <= kMaxWittLength, "Witt length n must be in [1, 3]");
    require(F_.has_tables(), "field of order " + std::to_string(spec_.q()) + " is too large");
    if (spec_.wild.empty()) spec_.wild.assign(spec_.n, fq::rf_constant(0));
    require(spec_.wild.size() == spec_.n, "wild part must have exactly n Witt coordinates");
    for (auto& r : spec_.wild) r = fq::normalize(F_, r);
    if (spec_.tame) {
      spec_.tame->f = fq::normalize(F_, spec_.tame->f);
      require(!fq::rf_is_zero(spec_.tame->f), "tame function f must be nonzero");
      spec_.tame->gamma %= spec_.q() - 1;
    }
    std::sort(spec_.extra_removed.begin(), spec_.extra_removed.end());
    spec_.extra_removed.erase(std::unique(spec_.extra_removed.begin(), spec_.extra_removed.end()),
                              spec_.extra_removed.end());
    collect_points();
  }

  const CharacterSpec& spec() const { return spec_; }
  const Field& field() const { return F_; }
  const WittPolynomials& witt() const { return W_; }
  std::uint32_t p() const { return spec_.p(); }
  unsigned a() const { return spec_.a(); }
  std::uint64_t q() const { return spec_.q(); }
  unsigned n() const { return spec_.n; }
  std::uint64_t gamma() const { return spec_.tame ? spec_.tame->gamma : 0; }

  // All removed points with their local data, in point order.
  const std::vector<PointData>& points() const { return points_; }
  std::vector<Point> removed_points() const {
    std::vector<Point> out;
    for (const auto& pd : points_) out.push_back(pd.Q);
    return out;
  }
  bool is_removed(Point Q) const {
    return std::any_of(points_.begin(), points_.end(), [&](const PointData& pd) { return pd.Q == Q; });
  }
  std::vector<RamificationDatum> ramification() const {
    std::vector<RamificationDatum> out;
    for (const auto& pd : points_)
      if (pd.datum.ramified()) out.push_back(pd.datum);
    return out;
  }
  std::size_t ramified_count() const { return ramification().size(); }

  std::uint64_t omega() const { return omega_rho(ramification(), p(), a()); }
  std::vector<Rational> hodge_slopes() const { return abelnp::hodge_slopes(spec_.genus, ramification(), p(), a()); }
  RationalPolygon hodge() const { return from_slopes(hodge_slopes()); }
  std::int64_t degree() const {
    require(ramified_count() > 0, "the character is unramified on P^1, hence trivial up to a constant twist");
    return euler_poincare_degree(spec_.genus, ramification());
  }

  // Laurent expansion of each Witt coordinate at Q, and ord_Q(f).
  std::pair<LocalWittData, std::int64_t> local_expand(Point Q, int prec) const {
    LocalWittData d;
    d.Q = Q;
    for (const auto& r : spec_.wild) d.coords.push_back(laurent::expand(F_, r, Q, prec));
    std::int64_t ord = spec_.tame ? fq::ord_at(F_, spec_.tame->f, Q) : 0;
    return {d, ord};
  }

  // Reduced local data, with precision raised until constant terms are known.
  LocalWittData reduced_local(Point Q) const {
    int maxpole = 0;
    for (const auto& r : spec_.wild) {
      if (fq::rf_is_zero(r)) continue;
      maxpole = std::max(maxpole, -fq::ord_at(F_, r, Q));
    }
    int prec = static_cast<int>(ipow(p(), n())) * (maxpole + 1) + 2;
    for (int attempt = 0; attempt < 8; ++attempt, prec *= 2) {
      LocalWittData d = reduce_witt(F_, W_, local_expand(Q, prec).first);
      bool ok = std::all_of(d.coords.begin(), d.coords.end(), [](const LaurentSeries& s) { return s.prec >= 1; });
      if (ok) return d;
    }
    throw BudgetError("Witt reduction lost all precision at a removed point");
  }

  // rho(Frob_Q) for an unramified degree-one point Q.
  CharacterValue value_at(Point Q) const {
    CharacterValue v;
    LocalWittData d = reduced_local(Q);
    for (const auto& s : d.coords) require(s.pole_order() == 0, "value_at called at a wildly ramified point");
    std::vector<FieldElement> constants;
    for (const auto& s : d.coords) constants.push_back(F_.element(s.coeff(0)));
    GaloisRing R(spec_.field, n());
    v.w = witt_trace(R, witt_pack(R, constants));
    if (spec_.tame) {
      const std::int64_t ord = fq::ord_at(F_, spec_.tame->f, Q);
      const std::uint64_t q1 = q() - 1;
      require(modp::mul(gamma(), modp::reduce(ord, q1), q1) == 0, "value_at called at a tamely ramified point");
      LaurentSeries fs = laurent::expand(F_, spec_.tame->f, Q, static_cast<int>(ord) + 1);
      const Fq lead = fs.coeff(static_cast<int>(ord));
      std::int64_t c = kTameValueSign * static_cast<std::int64_t>(modp::mul(gamma(), F_.ilog(lead), q1));
      v.c = modp::reduce(c, q1);
    }
    return v;
  }

 private:
  void collect_points() {
    std::vector<Point> cand = spec_.extra_removed;
    auto need_split = [&](const FqPoly& poly, const char* what) {
      require(fq::splits(F_, poly),
              std::string("the ") + what + " does not split over F_q; use base_change to make its roots rational");
    };
    for (const auto& r : spec_.wild) {
      if (fq::rf_is_zero(r)) continue;
      need_split(r.den, "denominator of a wild coordinate");
      for (auto Q : fq::poles(F_, r)) cand.push_back(Q);
    }
    if (spec_.tame) {
      need_split(spec_.tame->f.num, "numerator of f");
      need_split(spec_.tame->f.den, "denominator of f");
      for (auto Q : fq::poles(F_, spec_.tame->f)) cand.push_back(Q);
      for (auto Q : fq::zeros(F_, spec_.tame->f)) cand.push_back(Q);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (auto Q : cand) {
      PointData pd;
      pd.Q = Q;
      pd.reduced = reduced_local(Q);
      pd.ord_f = spec_.tame ? fq::ord_at(F_, spec_.tame->f, Q) : 0;
      RamificationDatum t = tame_invariants(pd.ord_f, gamma(), p(), q());
      pd.datum = make_datum(swan_conductor(pd.reduced, p()), t.eps, p(), q());
      points_.push_back(std::move(pd));
    }
  }

  CharacterSpec spec_;
  Field F_;
  WittPolynomials W_;
  std::vector<PointData> points_;
};

// ---------------------------------------------------------------------------
// Spec transformations.

// rho^{-1}: negate the Witt vector, Gamma -> q - 1 - Gamma.
inline CharacterSpec inverse_spec(const CharacterSpec& spec) {
  Field F(spec.field);
  CharacterSpec out = spec;
  for (auto& r : out.wild) r = fq::rf_neg(F, r);
  if (out.tame) out.tame->gamma = (spec.q() - 1 - out.tame->gamma % (spec.q() - 1)) % (spec.q() - 1);
  return out;
}

// Apply the p-power map to every coefficient of r and f.
inline CharacterSpec frobenius_twist_spec(const CharacterSpec& spec) {
  Field F(spec.field);
  CharacterSpec out = spec;
  for (auto& r : out.wild) r = fq::rf_frobenius_twist(F, r);
  if (out.tame) out.tame->f = fq::rf_frobenius_twist(F, out.tame->f);
  for (auto& Q : out.extra_removed)
    if (!Q.infinite) Q.x = F.ifrob(Q.x);
  return out;
}

// Gamma -> p Gamma mod (q - 1).
inline CharacterSpec gamma_twist_spec(const CharacterSpec& spec) {
  CharacterSpec out = spec;
  if (out.tame) out.tame->gamma = (out.tame->gamma * spec.p()) % (spec.q() - 1);
  return out;
}

// The character rho^c, i.e. c * r in W_n and Gamma -> c Gamma.
inline CharacterSpec power_spec(const CharacterSpec& spec, std::int64_t c) {
  Field F(spec.field);
  WittPolynomials W(spec.p(), spec.n);
  RationalOps ops{F};
  CharacterSpec out = spec;
  out.wild = witt_scale(W, ops, spec.wild, c);
  if (out.tame) {
    const std::uint64_t q1 = spec.q() - 1;
    out.tame->gamma = modp::mul(out.tame->gamma, modp::reduce(c, q1), q1);
  }
  return out;
}

// The same character viewed over F_{q^k}: coefficients embedded, Gamma scaled
// by (q^k - 1)/(q - 1) so that omega_q(N y) = omega_{q^k}(y)^{(q^k - 1)/(q - 1)}.
inline CharacterSpec base_change(const CharacterSpec& spec, unsigned k) {
  require(k >= 1, "base change degree must be >= 1");
  if (k == 1) return spec;
  auto [target, emb] = make_extension(spec.field, k, spec.seed);
  Field small(spec.field), big(target);
  auto map_index = [&](Fq v) { return big.index(emb(big, small.element(v))); };
  auto map_poly = [&](const FqPoly& a) {
    FqPoly r;
    for (auto c : a) r.push_back(map_index(c));
    return r;
  };
  auto map_rf = [&](const RationalFunction& r) { return RationalFunction{map_poly(r.num), map_poly(r.den)}; };
  CharacterSpec out = spec;
  out.field = target;
  for (auto& r : out.wild) r = map_rf(r);
  if (out.tame) {
    out.tame->f = map_rf(out.tame->f);
    const std::uint64_t Q = target.order();
    out.tame->gamma = (out.tame->gamma * ((Q - 1) / (spec.q() - 1))) % (Q - 1);
  }
  for (auto& P : out.extra_removed)
    if (!P.infinite) P.x = map_index(P.x);
  return out;
}

// Replace t by 1/t (swaps 0 and infinity).
inline CharacterSpec invert_variable_spec(const CharacterSpec& spec) {
  Field F(spec.field);
  CharacterSpec out = spec;
  for (auto& r : out.wild) r = fq::rf_invert_variable(F, r);
  if (out.tame) out.tame->f = fq::rf_invert_variable(F, out.tame->f);
  for (auto& P : out.extra_removed) {
    if (P.infinite) {
      P = Point::at(0);
    } else if (P.x == 0) {
      P = Point::infinity();
    } else {
      P.x = F.iinv(P.x);
    }
  }
  return out;
}

}  // namespace abelnp
