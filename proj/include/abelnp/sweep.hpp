#pragma once

// Randomized families of characters on P^1 and batch verification.

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "abelnp/lfunction.hpp"

namespace abelnp {

struct SweepOptions {
  std::size_t count = 200;
  std::uint64_t seed = kDefaultSeed;
  std::vector<std::uint32_t> primes{3, 5};
  unsigned max_a = 2;
  unsigned max_n = 2;
  unsigned max_swan = 8;
  double tame_fraction = 0.5;
  std::uint64_t max_points = kDefaultBudget;  // q^{D + guard} must stay below this
  bool integral_omega_only = true;            // drop tame data whose digit average is fractional
};

namespace detail {

inline std::uint64_t pick(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); }

inline FqPoly linear(const Field& F, Fq x) { return FqPoly{F.ineg(x), 1}; }

// Polar part sum_{k <= j} c_k (t - x)^{-k} at a finite point, or sum c_k t^k at infinity.
inline RationalFunction random_polar_part(std::mt19937_64& rng, const Field& F, Point Q, unsigned j) {
  const std::uint64_t q = F.order();
  std::vector<Fq> c(j + 1, 0);
  for (unsigned k = 1; k < j; ++k) c[k] = static_cast<Fq>(pick(rng, 0, q - 1));
  c[j] = static_cast<Fq>(pick(rng, 1, q - 1));
  if (Q.infinite) return fq::normalize(F, RationalFunction{c, {1}});
  const FqPoly l = linear(F, Q.x);
  FqPoly num;
  for (unsigned k = 1; k <= j; ++k) num = fq::add(F, num, fq::scale(F, fq::pow(F, l, j - k), c[k]));
  return fq::normalize(F, RationalFunction{num, fq::pow(F, l, j)});
}

inline Point random_point(std::mt19937_64& rng, std::uint64_t q) {
  const std::uint64_t v = pick(rng, 0, q);
  return v == q ? Point::infinity() : Point::at(static_cast<Fq>(v));
}

}  // namespace detail

// One random candidate; the caller filters by degree and budget.
inline CharacterSpec random_spec(std::mt19937_64& rng, const SweepOptions& opt) {
  require(!opt.primes.empty(), "sweep needs at least one prime");
  const std::uint32_t p = opt.primes[detail::pick(rng, 0, opt.primes.size() - 1)];
  const unsigned a = static_cast<unsigned>(detail::pick(rng, 1, opt.max_a));
  const unsigned n = static_cast<unsigned>(detail::pick(rng, 1, opt.max_n));
  CharacterSpec spec;
  spec.field = a == 1 ? FieldDesc::prime(p) : FieldDesc::generate(p, a, kDefaultSeed);
  spec.n = n;
  const Field F(spec.field);
  const std::uint64_t q = F.order();
  for (unsigned level = 0; level < n; ++level) {
    RationalFunction r = fq::rf_constant(0);
    const std::uint64_t top = std::max<std::uint64_t>(1, opt.max_swan / ipow(p, n - 1 - level));
    const unsigned poles = static_cast<unsigned>(detail::pick(rng, 0, 2));
    for (unsigned i = 0; i < poles; ++i) {
      const Point Q = detail::random_point(rng, q);
      const unsigned j = static_cast<unsigned>(detail::pick(rng, 1, top));
      r = fq::rf_add(F, r, detail::random_polar_part(rng, F, Q, j));
    }
    spec.wild.push_back(fq::normalize(F, r));
  }
  const bool tame = static_cast<double>(rng() % 1000000) < opt.tame_fraction * 1e6;
  if (tame && q > 2) {
    TamePart tp;
    FqPoly num{1}, den{1};
    const unsigned factors = static_cast<unsigned>(detail::pick(rng, 1, 2));
    for (unsigned i = 0; i < factors; ++i) {
      const Fq x = static_cast<Fq>(detail::pick(rng, 0, q - 1));
      const unsigned e = static_cast<unsigned>(detail::pick(rng, 1, 3));
      FqPoly& side = rng() % 2 ? num : den;
      side = fq::mul(F, side, fq::pow(F, detail::linear(F, x), e));
    }
    tp.f = fq::normalize(F, RationalFunction{num, den});
    tp.gamma = q == 3 ? 1 : detail::pick(rng, 1, q - 2);
    if (tp.f.num.size() + tp.f.den.size() > 2) spec.tame = tp;
  }
  return spec;
}

inline std::uint64_t max_swan(const Character& ch) {
  std::uint64_t s = 0;
  for (const auto& pd : ch.points()) s = std::max(s, pd.datum.s);
  return s;
}

inline bool omega_integral(const Character& ch) {
  std::uint64_t total = 0;
  for (const auto& pd : ch.points()) total += pd.datum.omega;
  return total % (static_cast<std::uint64_t>(ch.spec().a()) * (ch.spec().p() - 1)) == 0;
}

// Deterministic family: resample until D >= 1, Swan <= max_swan, q^{D + guard} <= max_points
// and, unless disabled, Omega_rho is an integer.
inline std::vector<CharacterSpec> sweep_family(const SweepOptions& opt, unsigned guard = 3) {
  std::mt19937_64 rng(opt.seed);
  std::vector<CharacterSpec> out;
  while (out.size() < opt.count) {
    bool accepted = false;
    for (int attempt = 0; attempt < 100000 && !accepted; ++attempt) {
      CharacterSpec spec = random_spec(rng, opt);
      const Character ch(spec);
      if (ch.ramified_count() == 0) continue;
      const std::int64_t D = ch.degree();
      if (D < 1 || max_swan(ch) > opt.max_swan) continue;
      if (opt.integral_omega_only && !omega_integral(ch)) continue;
      std::uint64_t points = 1;
      bool small = true;
      for (std::int64_t k = 0; k < D + guard && small; ++k) {
        points *= ch.q();
        small = points <= opt.max_points;
      }
      if (!small) continue;
      out.push_back(ch.spec());
      accepted = true;
    }
    ensure(accepted, "sweep generator found no admissible spec");
  }
  return out;
}

struct SweepCase {
  std::string hash;
  CharacterSpec spec;
  std::int64_t degree = 0;
  std::uint64_t swan = 0;
  bool passed = false;
  bool endpoints_match = false;
  Rational min_margin{0};
  std::string reason;
  nlohmann::json report;
};

struct SweepResult {
  std::vector<SweepCase> cases;
  std::size_t cache_hits = 0;

  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const SweepCase& c) { return !c.passed; }));
  }

  std::string summary_tsv() const {
    std::ostringstream os;
    os << "spec_hash\tp\ta\tn\ttame\tmax_swan\tdegree\tmin_margin\tendpoints_match\tresult\n";
    for (const auto& c : cases)
      os << c.hash << '\t' << c.spec.p() << '\t' << c.spec.a() << '\t' << c.spec.n << '\t' << (c.spec.tame ? 1 : 0) << '\t'
         << c.swan << '\t' << c.degree << '\t' << to_string(c.min_margin) << '\t' << (c.endpoints_match ? 1 : 0) << '\t'
         << (c.passed ? "pass" : "fail") << '\n';
    return os.str();
  }

  nlohmann::json failure_list() const {
    nlohmann::json f = nlohmann::json::array();
    for (std::size_t i = 0; i < cases.size(); ++i)
      if (!cases[i].passed)
        f.push_back({{"index", i}, {"spec_hash", cases[i].hash}, {"spec", serialize_spec(cases[i].spec)}, {"reason", cases[i].reason}});
    return f;
  }

  std::string results_jsonl() const {
    std::string s;
    for (const auto& c : cases) s += c.report.dump() + "\n";
    return s;
  }
};

inline std::string failure_reason(const VerifyReport& r) {
  std::string why;
  auto add = [&](bool ok, const char* what) {
    if (!ok) why += (why.empty() ? "" : ", ") + std::string(what);
  };
  add(r.guards_vanish, "guard coefficients do not vanish");
  add(r.inverse_guards_vanish, "inverse guard coefficients do not vanish");
  add(r.np_above_hp, "NP below HP");
  add(r.endpoints_match, "endpoints differ");
  add(r.hp_length_is_degree, "HP length differs from the degree");
  add(r.np_duality, "NP duality fails");
  add(r.hp_duality, "HP duality fails");
  return why;
}

inline SweepResult run_sweep(const SweepOptions& opt, const LOptions& lopt) {
  SweepResult res;
  const std::size_t hits_before = lopt.ledger ? lopt.ledger->hits() : 0;
  for (const auto& spec : sweep_family(opt, lopt.guard)) {
    SweepCase c;
    c.spec = spec;
    c.hash = spec_hash(spec);
    const Character ch(spec);
    c.degree = ch.degree();
    c.swan = max_swan(ch);
    try {
      VerifyOptions vo;
      vo.l = lopt;
      const VerifyReport r = verify_character(spec, vo);
      c.passed = r.ok();
      c.endpoints_match = r.endpoints_match;
      c.min_margin = r.domination.min_margin;
      c.reason = failure_reason(r);
      c.report = to_json(r, ch);
    } catch (const std::exception& e) {
      c.passed = false;
      c.reason = e.what();
      c.report = {{"spec_hash", c.hash}, {"error", e.what()}};
    }
    c.report["spec"] = serialize_spec(spec);
    res.cases.push_back(std::move(c));
  }
  res.cache_hits = lopt.ledger ? lopt.ledger->hits() - hits_before : 0;
  return res;
}

}  // namespace abelnp
