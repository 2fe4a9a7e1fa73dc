#pragma once

// Dwork's p-adic side for a = 1: the splitting series alpha of rho on G_m, the
// matrix U(k, j) = alpha_{pk - j} of psi o alpha on the basis u^j (u = 1/t), and
// the trace-formula congruence det(1 - sU) = L(rho, G_m, s) det(1 - psU).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "abelnp/lfunction.hpp"

namespace abelnp {

struct DworkOptions {
  unsigned T = 60;  // truncation of the basis u^0 .. u^{T-1}
  unsigned M = 12;  // p-adic digits
  unsigned d = 3;   // compared s-degree
  LOptions l;
};

// rho = sum over terms of V^i[c u^j] (Witt sum), times the tame factor
// [c_f]^{-Gamma} u^{eps}.
struct SplittingData {
  CharacterSpec spec;  // in the coordinate t with all wild poles at t = 0
  bool flipped = false;
  struct Term {
    unsigned level;
    unsigned j;
    Fq c;
  };
  std::vector<Term> terms;
  std::uint64_t swan = 0;
  std::uint64_t eps = 0;
  std::int64_t tame_log = 0;  // xi-exponent of [c_f]^{-Gamma}
};

inline SplittingData splitting_data(const CharacterSpec& input) {
  require(input.a() == 1, "the Dwork computation is implemented for a = 1");
  require(input.genus == 0, "the Dwork computation works on G_m in P^1");
  SplittingData sd;
  const Field F(input.field);
  bool poles_at_inf = false, poles_at_zero = false;
  for (const auto& r : input.wild) {
    if (fq::rf_is_zero(r)) continue;
    for (auto Q : fq::poles(F, r)) {
      if (Q.infinite) {
        poles_at_inf = true;
      } else if (Q.x == 0) {
        poles_at_zero = true;
      } else {
        throw InputError("the Dwork computation needs wild poles at 0 or infinity only");
      }
    }
  }
  require(!(poles_at_inf && poles_at_zero), "the Dwork computation needs all wild poles at a single point of {0, inf}");
  sd.flipped = poles_at_inf;
  sd.spec = sd.flipped ? invert_variable_spec(input) : input;
  for (const auto& P : sd.spec.extra_removed)
    require(P.infinite || P.x == 0, "extra removed points must lie in {0, inf}");

  // u-polynomials R_i(u) with t = 1/u; each wild coordinate is in F_p[t^{-1}]
  const std::uint32_t p = input.p();
  const unsigned n = input.n;
  WittPolynomials W(p, n);
  RationalOps ops{F};
  std::vector<RationalFunction> R;
  for (const auto& r0 : sd.spec.wild) {
    RationalFunction r = fq::normalize(F, r0);
    if (fq::rf_is_zero(r)) {
      R.push_back(r);
      continue;
    }
    const int k = fq::degree(r.den);
    require(r.den == fq::pow(F, FqPoly{0, 1}, static_cast<unsigned>(k)) && fq::degree(r.num) <= k,
            "wild coordinates must be polynomials in 1/t after moving the poles to 0");
    FqPoly up(static_cast<std::size_t>(k) + 1, 0);
    for (int m = 0; m < static_cast<int>(r.num.size()); ++m) up[static_cast<std::size_t>(k - m)] = r.num[static_cast<std::size_t>(m)];
    fq::trim(up);
    R.push_back(RationalFunction{up, {1}});
  }
  auto monomial = [&](unsigned level, Fq c, unsigned j) {
    WittVector<RationalOps> v(n, ops.zero());
    FqPoly m(j + 1, 0);
    m[j] = c;
    v[level] = RationalFunction{m, {1}};
    return v;
  };
  for (unsigned level = 0; level < n; ++level) {
    // replace c u^{pj} by c^{1/p} u^j = c u^j until no exponent at this level is p-divisible
    for (;;) {
      const FqPoly& a = R[level].num;
      int found = -1;
      for (int m = fq::degree(a); m > 0; --m)
        if (a[static_cast<std::size_t>(m)] != 0 && m % static_cast<int>(p) == 0) {
          found = m;
          break;
        }
      if (found < 0) break;
      const Fq c = a[static_cast<std::size_t>(found)];
      R = witt_add(W, ops, witt_sub(W, ops, R, monomial(level, c, static_cast<unsigned>(found))),
                   monomial(level, c, static_cast<unsigned>(found) / p));
    }
    const FqPoly a = R[level].num;
    for (std::size_t m = 0; m < a.size(); ++m) {
      if (a[m] == 0) continue;
      sd.terms.push_back({level, static_cast<unsigned>(m), a[m]});
      R = witt_sub(W, ops, R, monomial(level, a[m], static_cast<unsigned>(m)));
      if (m > 0) sd.swan = std::max<std::uint64_t>(sd.swan, ipow(p, n - 1 - level) * m);
    }
    ensure(fq::rf_is_zero(R[level]), "Witt decomposition left a nonzero coordinate");
  }
  require(sd.swan > 0, "the Dwork computation needs a nontrivial wild part");

  if (sd.spec.tame) {
    const RationalFunction& f = sd.spec.tame->f;
    require(f.num.size() == 1 || std::count_if(f.num.begin(), f.num.end(), [](Fq v) { return v != 0; }) == 1,
            "tame function must be a monomial c t^d");
    require(std::count_if(f.den.begin(), f.den.end(), [](Fq v) { return v != 0; }) == 1,
            "tame function must be a monomial c t^d");
    const std::int64_t dnum = fq::degree(f.num), dden = fq::degree(f.den);
    const std::int64_t d = dnum - dden;
    const Fq c = f.num.back();  // den is monic
    const std::uint64_t q1 = p - 1;
    const std::uint64_t gamma = sd.spec.tame->gamma % q1;
    sd.eps = modp::mul(gamma, modp::reduce(d, q1), q1);
    sd.tame_log = -static_cast<std::int64_t>(modp::mul(gamma, F.ilog(c), q1));
  }
  return sd;
}

// The G_m version of the spec in the t coordinate used by the splitting.
inline CharacterSpec torus_spec(const SplittingData& sd) {
  CharacterSpec s = sd.spec;
  s.extra_removed.push_back(Point::at(0));
  s.extra_removed.push_back(Point::infinity());
  std::sort(s.extra_removed.begin(), s.extra_removed.end());
  s.extra_removed.erase(std::unique(s.extra_removed.begin(), s.extra_removed.end()), s.extra_removed.end());
  return s;
}

// alpha(u) mod u^len.
inline PadicSeries splitting_series(const CycloPadicRing& R, const SplittingData& sd, std::size_t len) {
  const std::uint32_t p = R.p();
  const unsigned n = R.length();
  const GaloisRing& G = R.coefficient_ring();
  const Field& F = G.residue_field();
  PadicSeries alpha{std::vector<CycloPadic>(len, R.zero())};
  if (sd.eps < len) alpha.c[sd.eps] = R.xi_power(sd.tame_log);
  std::vector<std::optional<CycloPadic>> gammas(n + 1);
  for (const auto& t : sd.terms) {
    const unsigned lvl = n - t.level;
    if (!gammas[lvl]) gammas[lvl] = solve_gamma(R, lvl);
    const CycloPadic z = R.mul_scalar(*gammas[lvl], G.teichmuller(F.element(t.c)));
    if (t.j == 0) {
      // a constant factor E(z)
      const std::uint64_t denom = ipow(p, lvl - 1) * (p - 1);
      auto E = artin_hasse_series(p, static_cast<std::size_t>((R.precision() + 1) * denom + 2), R.precision());
      alpha = PadicSeries{[&] {
        std::vector<CycloPadic> v = alpha.c;
        const CycloPadic ez = evaluate_series(R, E, z);
        for (auto& x : v) x = R.mul(x, ez);
        return v;
      }()};
      continue;
    }
    const std::size_t terms = (len - 1) / t.j + 1;
    auto E = artin_hasse_series(p, terms, R.precision());
    PadicSeries factor{std::vector<CycloPadic>(len, R.zero())};
    CycloPadic zp = R.one();
    for (std::size_t m = 0; m < terms; ++m) {
      factor.c[m * t.j] = R.scale(zp, static_cast<std::int64_t>(E[m]));
      zp = R.mul(zp, z);
    }
    alpha = series_mul(R, alpha, factor);
  }
  return alpha;
}

using PadicMatrix = std::vector<std::vector<CycloPadic>>;

inline PadicMatrix up_matrix(const CycloPadicRing& R, const PadicSeries& alpha, unsigned T) {
  const std::uint32_t p = R.p();
  require(alpha.order() >= static_cast<std::size_t>(p) * (T - 1) + 1, "splitting series too short for the matrix");
  PadicMatrix U(T, std::vector<CycloPadic>(T, R.zero()));
  for (unsigned k = 0; k < T; ++k)
    for (unsigned j = 0; j < T; ++j) {
      const std::int64_t idx = static_cast<std::int64_t>(p) * k - j;
      if (idx >= 0) U[k][j] = alpha.c[static_cast<std::size_t>(idx)];
    }
  return U;
}

struct FredholmSeries {
  std::vector<CycloPadic> c;   // det(1 - sU) mod s^{d+1}
  std::vector<unsigned> loss;  // digits lost in c_k by the divisions in Newton's identities
};

inline FredholmSeries fredholm_series(const CycloPadicRing& R, const PadicMatrix& U, unsigned d) {
  const std::size_t T = U.size();
  std::vector<CycloPadic> traces;
  PadicMatrix P = U;
  for (unsigned k = 1; k <= d; ++k) {
    CycloPadic tr = R.zero();
    for (std::size_t i = 0; i < T; ++i) tr = R.add(tr, P[i][i]);
    traces.push_back(tr);
    if (k == d) break;
    PadicMatrix next(T, std::vector<CycloPadic>(T, R.zero()));
    for (std::size_t i = 0; i < T; ++i)
      for (std::size_t l = 0; l < T; ++l) {
        if (R.is_zero(P[i][l])) continue;
        for (std::size_t j = 0; j < T; ++j) {
          if (R.is_zero(U[l][j])) continue;
          next[i][j] = R.add(next[i][j], R.mul(P[i][l], U[l][j]));
        }
      }
    P = std::move(next);
  }
  FredholmSeries f;
  f.c.push_back(R.one());
  f.loss.push_back(0);
  for (unsigned k = 1; k <= d; ++k) {
    CycloPadic acc = R.zero();
    unsigned loss = 0;
    for (unsigned i = 1; i <= k; ++i) {
      acc = R.add(acc, R.mul(traces[i - 1], f.c[k - i]));
      loss = std::max(loss, f.loss[k - i]);
    }
    loss += int_valuation(k, R.p());
    f.c.push_back(R.neg(R.divide_int(acc, static_cast<std::int64_t>(k))));
    f.loss.push_back(loss);
  }
  return f;
}

// ---------------------------------------------------------------------------

struct DworkReport {
  std::string spec_hash;
  bool flipped = false;
  std::uint64_t swan = 0;
  std::uint64_t eps = 0;
  unsigned T = 0, M = 0, d = 0;
  bool alpha_growth = true;
  bool matrix_growth = true;
  Rational growth_margin{0};
  std::vector<unsigned> digits;           // trusted digits of each det coefficient
  std::vector<std::optional<Rational>> difference_valuation;
  std::vector<CycloPadic> lhs, rhs;       // det(1 - sU) and L(rho, G_m, s) det(1 - psU)
  bool congruence = false;
  bool stable = false;
  std::int64_t torus_degree = 0;          // deg L(rho, G_m, s)
  bool np_compared = false;
  bool np_below_one_match = true;
  std::optional<RationalPolygon> np_fredholm, np_torus;

  bool ok() const { return alpha_growth && matrix_growth && congruence && stable && np_below_one_match; }
};

inline DworkReport dwork_check(const CharacterSpec& input, const DworkOptions& opt = {}) {
  require(opt.T >= 2 && opt.d >= 1 && opt.M >= 2, "Dwork parameters out of range");
  const SplittingData sd = splitting_data(input);
  const std::uint32_t p = input.p();
  const unsigned n = input.n;
  DworkReport rep;
  rep.spec_hash = spec_hash(input);
  rep.flipped = sd.flipped;
  rep.swan = sd.swan;
  rep.eps = sd.eps;
  rep.T = opt.T;
  rep.M = opt.M;
  rep.d = opt.d;

  const CycloPadicRing R(p, n, input.field, opt.M);
  const unsigned T2 = opt.T + p;
  const PadicSeries alpha = splitting_series(R, sd, static_cast<std::size_t>(p) * T2 + 1);

  // v(alpha_m) >= (m - eps) / (s (p - 1))
  const Rational scale(1, static_cast<std::int64_t>(sd.swan * (p - 1)));
  bool first = true;
  auto check = [&](const CycloPadic& v, std::int64_t m, bool& flag) {
    PadicValuation val = R.valuation(v);
    const Rational bound = Rational(m - static_cast<std::int64_t>(sd.eps)) * scale;
    if (!val.finite) return;  // v >= M cannot contradict the bound
    const Rational margin = val.value - bound;
    if (margin < 0) flag = false;
    if (first || margin < rep.growth_margin) rep.growth_margin = margin;
    first = false;
  };
  for (std::size_t m = 0; m < alpha.order(); ++m) check(alpha.c[m], static_cast<std::int64_t>(m), rep.alpha_growth);
  const PadicMatrix U = up_matrix(R, alpha, opt.T);
  for (unsigned k = 0; k < opt.T; ++k)
    for (unsigned j = 0; j < opt.T; ++j)
      check(U[k][j], static_cast<std::int64_t>(p) * k - j, rep.matrix_growth);

  const FredholmSeries det = fredholm_series(R, U, opt.d);
  const FredholmSeries det2 = fredholm_series(R, up_matrix(R, alpha, T2), opt.d);

  // L(rho, G_m, s), the uncompleted L-function on the torus
  const Character torus(torus_spec(sd));
  LOptions lo = opt.l;
  const std::int64_t D = torus.degree();
  lo.guard = std::max<unsigned>(lo.guard, opt.d > D ? static_cast<unsigned>(opt.d - D) : 0u);
  const LPolynomial L = l_polynomial(torus, lo);
  rep.torus_degree = D + static_cast<std::int64_t>(L.completions.size());
  const CycloRing CR(p, n, input.q());

  // neglected rows and columns of the infinite matrix only move traces by
  // v >= (T (p - 1) - k eps) / (s (p - 1))
  const Rational trunc = Rational(static_cast<std::int64_t>(opt.T * (p - 1)) - static_cast<std::int64_t>(opt.d * sd.eps)) * scale;
  const std::int64_t trunc_digits = trunc.numerator() / trunc.denominator();
  rep.congruence = true;
  rep.stable = true;
  for (unsigned k = 0; k <= opt.d; ++k) {
    unsigned loss = 0;
    for (unsigned i = 0; i <= k; ++i) loss = std::max(loss, det.loss[i]);
    const std::int64_t avail = std::min<std::int64_t>(opt.M, trunc_digits) - loss;
    const unsigned digits = avail > 0 ? static_cast<unsigned>(avail) : 0;
    rep.digits.push_back(digits);
    CycloPadic rhs = R.zero();
    for (unsigned i = 0; i <= k; ++i) {
      CycloPadic term = R.mul(R.from_cyclo(CR, L.raw[i]), det.c[k - i]);
      rhs = R.add(rhs, R.scale(term, static_cast<std::int64_t>(ipow(p, k - i))));
    }
    rep.lhs.push_back(det.c[k]);
    rep.rhs.push_back(rhs);
    PadicValuation v = R.valuation(R.sub(det.c[k], rhs));
    rep.difference_valuation.push_back(v.finite ? std::optional<Rational>(v.value) : std::nullopt);
    if (digits < 1 || (v.finite && v.value < Rational(static_cast<std::int64_t>(digits)))) rep.congruence = false;
    PadicValuation vs = R.valuation(R.sub(det.c[k], det2.c[k]));
    if (vs.finite && vs.value < Rational(static_cast<std::int64_t>(digits))) rep.stable = false;
  }

  // slopes < 1 of det(1 - sU) are those of L(rho, G_m, s) when deg L <= d
  const unsigned min_digits = *std::min_element(rep.digits.begin(), rep.digits.end());
  if (rep.torus_degree <= static_cast<std::int64_t>(opt.d) && min_digits > opt.d + 1) {
    rep.np_compared = true;
    std::vector<HullPoint> pts;
    for (unsigned k = 0; k <= opt.d; ++k) {
      PadicValuation v = R.valuation(det.c[k]);
      const bool known = v.finite && v.value < Rational(static_cast<std::int64_t>(rep.digits[k]));
      pts.push_back({static_cast<std::int64_t>(k), known ? std::optional<Rational>(v.value) : std::nullopt});
    }
    rep.np_fredholm = truncate_below(lower_hull(pts), Rational(1));
    rep.np_torus = truncate_below(newton_polygon(torus, L.raw, rep.torus_degree).polygon, Rational(1));
    rep.np_below_one_match = *rep.np_fredholm == *rep.np_torus;
  }
  return rep;
}

// coefficient of x^i as the integer coordinates of a Galois ring element
inline nlohmann::json padic_to_json(const CycloPadic& z) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& g : z.c) arr.push_back(g.c);
  return arr;
}

inline nlohmann::json to_json(const DworkReport& r) {
  nlohmann::json lhs = nlohmann::json::array(), rhs = nlohmann::json::array();
  for (const auto& z : r.lhs) lhs.push_back(padic_to_json(z));
  for (const auto& z : r.rhs) rhs.push_back(padic_to_json(z));
  nlohmann::json diffs = nlohmann::json::array();
  for (const auto& v : r.difference_valuation) diffs.push_back(v ? nlohmann::json(to_string(*v)) : nlohmann::json("inf"));
  nlohmann::json j{{"spec_hash", r.spec_hash},
                   {"flipped", r.flipped},
                   {"swan", r.swan},
                   {"eps", r.eps},
                   {"T", r.T},
                   {"M", r.M},
                   {"d", r.d},
                   {"alpha_growth", r.alpha_growth},
                   {"matrix_growth", r.matrix_growth},
                   {"growth_margin", to_string(r.growth_margin)},
                   {"precision_achieved", r.digits},
                   {"lhs_coeffs", lhs},
                   {"rhs_coeffs", rhs},
                   {"difference_valuation", diffs},
                   {"congruence", r.congruence},
                   {"stable", r.stable},
                   {"torus_degree", r.torus_degree},
                   {"np_compared", r.np_compared},
                   {"np_below_one_match", r.np_below_one_match},
                   {"ok", r.ok()}};
  if (r.np_fredholm) j["np_fredholm_below_one"] = to_json(*r.np_fredholm);
  if (r.np_torus) j["np_torus_below_one"] = to_json(*r.np_torus);
  return j;
}

}  // namespace abelnp
