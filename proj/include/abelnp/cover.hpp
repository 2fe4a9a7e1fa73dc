#pragma once

// Z/p^n covers of P^1 cut out by a wild character: point counts, the zeta
// numerator as a product of L(rho^c), and the slope bound for the cover.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "abelnp/lfunction.hpp"

namespace abelnp {

struct CoverPoint {
  unsigned r = 0;                     // the ramification index is p^r
  std::vector<std::uint64_t> breaks;  // breaks[j - 1]: Swan conductor of a character of order p^j
};

// NP_X, then 0 and 1 each (p^n - 1)(g - 1) + Omega times, then p^{j-1}(p - 1)
// copies of {k / s : 1 <= k < s} for every point and every s = breaks[j - 1].
inline std::vector<Rational> cover_slope_bound(std::uint32_t p, unsigned n, unsigned genus,
                                               const std::vector<Rational>& np_base,
                                               const std::vector<CoverPoint>& points) {
  const std::int64_t pn = static_cast<std::int64_t>(ipow(p, n));
  std::int64_t Omega = 0;
  for (const auto& P : points) Omega += static_cast<std::int64_t>(ipow(p, n - P.r) * (ipow(p, P.r) - 1));
  const std::int64_t edge = (pn - 1) * (static_cast<std::int64_t>(genus) - 1) + Omega;
  require(edge >= 0, "cover slope bound has a negative multiplicity");
  std::vector<Rational> out = np_base;
  out.insert(out.end(), static_cast<std::size_t>(edge), Rational(0));
  out.insert(out.end(), static_cast<std::size_t>(edge), Rational(1));
  for (const auto& P : points) {
    require(P.breaks.size() == n, "a cover point needs one break per level");
    for (unsigned j = 1; j <= n; ++j) {
      const std::int64_t copies = static_cast<std::int64_t>(ipow(p, j - 1) * (p - 1));
      const std::int64_t s = static_cast<std::int64_t>(P.breaks[j - 1]);
      for (std::int64_t c = 0; c < copies; ++c)
        for (std::int64_t k = 1; k < s; ++k) out.emplace_back(k, s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

struct CoverReport {
  std::string spec_hash;
  unsigned genus = 0;                          // genus of the cover
  std::vector<std::int64_t> degrees;           // deg L(rho^c), c = 1 .. p^n - 1
  std::vector<std::uint64_t> point_counts;     // #C(F_{q^k}), k = 1 .. genus
  std::vector<BigInt> numerator_from_counts;
  std::vector<BigInt> numerator_from_l;        // prod_c L(rho^c, s)
  bool product_integral = false;
  bool numerator_match = false;
  std::vector<CoverPoint> points;
  RationalPolygon np, bound;
  DominationReport domination;
  bool np_above_bound = false;

  bool ok() const { return product_integral && numerator_match && np_above_bound; }
};

namespace detail {

inline std::int64_t ramification_level(const CharacterSpec& spec, Point Q, unsigned j) {
  const Character ch(power_spec(spec, static_cast<std::int64_t>(ipow(spec.p(), spec.n - j))));
  for (const auto& pd : ch.points())
    if (pd.Q == Q) return static_cast<std::int64_t>(pd.datum.s);
  return 0;
}

}  // namespace detail

inline CoverReport check_cover(const CharacterSpec& spec, const LOptions& opt = {}) {
  require(!spec.tame, "covers are built from a wild character only");
  require(spec.extra_removed.empty(), "covers do not take extra removed points");
  require(spec.genus == 0, "covers are built over P^1");
  const Character ch(spec);
  const std::uint32_t p = ch.p();
  const unsigned n = ch.n();
  const std::uint64_t pn = ipow(p, n);
  const std::uint64_t q = ch.q();
  CoverReport rep;
  rep.spec_hash = spec_hash(ch.spec());

  // prod_c L(rho^c, s) in Z[zeta_{p^n}, xi]
  const CycloRing R(p, n, q);
  std::vector<CycloInt> prod{R.one()};
  for (std::uint64_t c = 1; c < pn; ++c) {
    const Character chc(power_spec(spec, static_cast<std::int64_t>(c)));
    LPolynomial L = l_polynomial(chc, opt);
    ensure(L.guards_vanish, "L(rho^" + std::to_string(c) + ") has nonvanishing guard coefficients");
    rep.degrees.push_back(L.degree);
    std::vector<CycloInt> next(prod.size() + static_cast<std::size_t>(L.degree), R.zero());
    for (std::size_t i = 0; i < prod.size(); ++i)
      for (std::int64_t j = 0; j <= L.degree; ++j)
        next[i + static_cast<std::size_t>(j)] =
            R.add(next[i + static_cast<std::size_t>(j)], R.mul(prod[i], L.completed[static_cast<std::size_t>(j)]));
    prod = std::move(next);
  }
  rep.product_integral = std::all_of(prod.begin(), prod.end(), [&](const CycloInt& c) { return R.is_integer(c); });
  for (const auto& c : prod) rep.numerator_from_l.push_back(c.c[0]);
  const std::size_t twice_g = prod.size() - 1;
  ensure(twice_g % 2 == 0, "cover numerator has odd degree");
  rep.genus = static_cast<unsigned>(twice_g / 2);

  // Ramification data of the cover at each pole.
  struct Fibre {
    Point Q;
    unsigned r;
    std::uint64_t w;  // value of rho^{p^r} at Q
  };
  std::vector<Fibre> fibres;
  for (const auto& pd : ch.points()) {
    CoverPoint cp;
    for (unsigned j = 1; j <= n; ++j) {
      const std::int64_t s = detail::ramification_level(spec, pd.Q, j);
      cp.breaks.push_back(static_cast<std::uint64_t>(s));
      if (s > 0) ++cp.r;
    }
    std::uint64_t w = 0;
    if (cp.r < n) {
      const Character unram(power_spec(spec, static_cast<std::int64_t>(ipow(p, cp.r))));
      w = unram.value_at(pd.Q).w;
    }
    fibres.push_back({pd.Q, cp.r, w});
    if (cp.r > 0) rep.points.push_back(cp);
  }

  // #C(F_{q^k}) = p^n #{x unremoved : Tr r(x) = 0} + sum over removed x of the fixed fibre points
  std::vector<BigInt> a;
  for (unsigned k = 1; k <= rep.genus; ++k) {
    SumHistogram h = character_histogram(ch, k, opt);
    std::uint64_t count = pn * static_cast<std::uint64_t>(h[0][0]);
    for (const auto& f : fibres)
      if ((f.w * k) % pn == 0) count += ipow(p, n - f.r);
    rep.point_counts.push_back(count);
    a.push_back(BigInt(count) - 1 - BigInt(ipow(q, k)));
  }
  // P = exp(sum a_k s^k / k) up to s^g, then P_{2g-i} = q^{g-i} P_i
  std::vector<BigInt> P{1};
  for (unsigned k = 1; k <= rep.genus; ++k) {
    BigInt acc = 0;
    for (unsigned i = 1; i <= k; ++i) acc += a[i - 1] * P[k - i];
    ensure(acc % k == 0, "zeta numerator from point counts is not integral");
    P.push_back(acc / k);
  }
  P.resize(twice_g + 1);
  for (std::size_t i = 0; i < rep.genus; ++i) {
    BigInt qp = 1;
    for (std::size_t e = i; e < rep.genus; ++e) qp *= q;
    P[twice_g - i] = qp * P[i];
  }
  rep.numerator_from_counts = P;
  rep.numerator_match = rep.product_integral && P == rep.numerator_from_l;

  std::vector<HullPoint> pts;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P[i] == 0) {
      pts.push_back({static_cast<std::int64_t>(i), std::nullopt});
      continue;
    }
    BigInt v = P[i] < 0 ? BigInt(-P[i]) : P[i];
    std::int64_t e = 0;
    while (v % p == 0) {
      v /= p;
      ++e;
    }
    pts.push_back({static_cast<std::int64_t>(i), Rational(e, static_cast<std::int64_t>(ch.a()))});
  }
  rep.np = lower_hull(pts);
  rep.bound = from_slopes(cover_slope_bound(p, n, 0, {}, rep.points));
  rep.domination = lies_above(rep.np, rep.bound);
  rep.np_above_bound = rep.domination.holds && rep.np.end() == rep.bound.end();
  return rep;
}

inline nlohmann::json to_json(const CoverReport& r) {
  auto big_list = [](const std::vector<BigInt>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : v) a.push_back(x.str());
    return a;
  };
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& P : r.points) pts.push_back({{"r", P.r}, {"breaks", P.breaks}});
  return {{"spec_hash", r.spec_hash},
          {"cover_genus", r.genus},
          {"degrees", r.degrees},
          {"point_counts", r.point_counts},
          {"numerator_from_counts", big_list(r.numerator_from_counts)},
          {"numerator_from_l", big_list(r.numerator_from_l)},
          {"product_integral", r.product_integral},
          {"numerator_match", r.numerator_match},
          {"ramified_points", pts},
          {"newton", to_json(r.np)},
          {"bound", to_json(r.bound)},
          {"np_above_bound", r.np_above_bound},
          {"min_margin", to_string(r.domination.min_margin)},
          {"ok", r.ok()}};
}

}  // namespace abelnp
