#pragma once

// Exponential character sums over F_{q^k}, the L-polynomial L(rho, s) with
// coefficients in Z[zeta_{p^n}, xi], its Newton polygon, and the combined
// NP-over-HP verification.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "abelnp/character.hpp"
#include "abelnp/cyclotomic.hpp"
#include "abelnp/polygon.hpp"
#include "abelnp/spec_io.hpp"

namespace abelnp {

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

// ---------------------------------------------------------------------------
// Trace table T[j] = Tr_{W_n(F_Q)/(Z/p^n)}([h]^j) for the modulus root h of a
// primitive modulus, via the linear recurrence of the Teichmuller conjugates.

inline std::vector<std::uint16_t> teichmuller_trace_table(const FieldDesc& target, unsigned n) {
  GaloisRing R(target, n);
  const std::uint64_t Q = target.order();
  const std::uint32_t N = target.m;
  const std::uint64_t pn = R.modulus();
  require(pn < 65536, "p^n too large for the trace table");
  const GaloisRingElement H = R.teichmuller(R.residue_field().root());
  std::vector<GaloisRingElement> conj{H};
  for (std::uint32_t i = 1; i < N; ++i) conj.push_back(R.pow(conj.back(), target.p));
  ensure(R.pow(conj.back(), target.p) == H, "Teichmuller conjugates do not cycle");
  // P(X) = prod (X - H_i), monic of degree N
  std::vector<GaloisRingElement> P{R.one()};
  for (const auto& h : conj) {
    std::vector<GaloisRingElement> next(P.size() + 1, R.zero());
    for (std::size_t i = 0; i < P.size(); ++i) {
      next[i + 1] = R.add(next[i + 1], P[i]);
      next[i] = R.sub(next[i], R.mul(P[i], h));
    }
    P = std::move(next);
  }
  std::vector<std::uint64_t> pc(N);
  for (std::uint32_t i = 0; i < N; ++i) {
    ensure(R.is_scalar(P[i]), "characteristic polynomial of [h] is not over Z/p^n");
    pc[i] = (pn - P[i].c[0]) % pn;  // T[j] = sum pc[i] T[j - N + i]
  }
  std::vector<std::uint16_t> T(Q);
  std::vector<GaloisRingElement> cur(N, R.one());
  for (std::uint64_t j = 0; j < std::min<std::uint64_t>(N, Q); ++j) {
    GaloisRingElement s = R.zero();
    for (auto& c : cur) s = R.add(s, c);
    ensure(R.is_scalar(s), "Witt trace is not in the prime subring");
    T[j] = static_cast<std::uint16_t>(s.c[0]);
    for (std::uint32_t i = 0; i < N; ++i) cur[i] = R.mul(cur[i], conj[i]);
  }
  for (std::uint64_t j = N; j < Q; ++j) {
    std::uint64_t acc = 0;
    for (std::uint32_t i = 0; i < N; ++i) acc += pc[i] * T[j - N + i];
    T[j] = static_cast<std::uint16_t>(acc % pn);
  }
  ensure(Q - 1 < N || T[Q - 1] == T[0], "trace recurrence is not periodic");
  return T;
}

// ---------------------------------------------------------------------------

struct LOptions {
  std::uint64_t budget = kDefaultBudget;  // largest field enumerated
  unsigned workers = 0;                   // 0 selects the hardware concurrency
  unsigned guard = 3;
  class SumLedger* ledger = nullptr;
};

// Histogram counts[w][c] of rho(Frob_x) = zeta^w xi^c over unremoved x in P^1(F_{q^k}).
using SumHistogram = std::vector<std::vector<std::int64_t>>;

namespace detail {

struct LogRf {
  std::vector<std::uint32_t> num, den;  // coefficient logs, kZero for 0
  bool den_constant = true;
};

inline std::uint32_t horner(const ZechField& Z, const std::vector<std::uint32_t>& c, std::uint32_t x) {
  std::uint32_t acc = ZechField::kZero;
  for (std::size_t i = c.size(); i-- > 0;) acc = Z.add(Z.mul(acc, x), c[i]);
  return acc;
}

inline unsigned worker_count(unsigned requested) {
  if (requested) return requested;
  unsigned h = std::thread::hardware_concurrency();
  return h ? h : 1;
}

}  // namespace detail

inline SumHistogram character_histogram(const Character& ch, unsigned k, const LOptions& opt = {}) {
  require(k >= 1, "sum index k must be >= 1");
  require(ch.spec().genus == 0, "character sums are enumerated on P^1; genus must be 0");
  const std::uint64_t q = ch.q();
  const std::uint64_t q1 = q - 1;
  const std::uint64_t pn = ipow(ch.p(), ch.n());
  std::uint64_t Q = 0;
  try {
    Q = ipow(q, k);
  } catch (const BudgetError&) {
    Q = ~std::uint64_t{0};
  }
  if (Q > opt.budget)
    throw BudgetError("enumerating F_{q^" + std::to_string(k) + "} (q = " + std::to_string(q) +
                      ") exceeds the point budget " + std::to_string(opt.budget));

  auto [target, emb] = make_extension(ch.spec().field, k, ch.spec().seed);
  const ZechField Z(target);
  const Field big(target, false);
  const Field& F = ch.field();
  const std::vector<std::uint16_t> T = teichmuller_trace_table(target, ch.n());

  std::vector<std::uint32_t> small_log(q);
  for (std::uint64_t v = 0; v < q; ++v)
    small_log[v] = Z.log_of(emb(big, F.element(static_cast<Field::Index>(v))));
  auto to_logs = [&](const FqPoly& a) {
    std::vector<std::uint32_t> r;
    for (auto c : a) r.push_back(small_log[c]);
    return r;
  };
  auto to_log_rf = [&](const RationalFunction& r) {
    detail::LogRf out{to_logs(r.num), to_logs(r.den), fq::degree(r.den) <= 0};
    return out;
  };
  std::vector<detail::LogRf> wild;
  std::vector<std::uint64_t> wild_weight;
  std::uint64_t pi = 1;
  for (const auto& r : ch.spec().wild) {
    if (!fq::rf_is_zero(r)) {
      wild.push_back(to_log_rf(r));
      wild_weight.push_back(pi);
    }
    pi *= ch.p();
  }
  std::optional<detail::LogRf> tame;
  std::uint64_t tame_mult = 0;
  if (ch.spec().tame) {
    tame = to_log_rf(ch.spec().tame->f);
    // log_g(N y) = c0 * log_h(y), with emb(g) = h^{u (Q-1)/(q-1)} and c0 = u^{-1}
    const std::uint64_t lg = Z.log_of(emb(big, F.generator()));
    const std::uint64_t u = lg / ((Q - 1) / q1);
    ensure(lg % ((Q - 1) / q1) == 0, "embedded generator is not in the subfield");
    const std::uint64_t c0 = q1 == 1 ? 0 : modp::inv(u % q1, q1);
    tame_mult = modp::reduce(kTameValueSign * static_cast<std::int64_t>(modp::mul(ch.gamma(), c0, q1)), q1);
  }
  std::vector<std::uint32_t> removed_logs;
  bool inf_removed = false;
  for (const auto& pd : ch.points()) {
    if (pd.Q.infinite) {
      inf_removed = true;
    } else {
      removed_logs.push_back(small_log[pd.Q.x]);
    }
  }

  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(detail::worker_count(opt.workers), 1 + Q / 65536));
  const std::size_t cells = static_cast<std::size_t>(pn * q1);
  std::vector<std::vector<std::int64_t>> partial(workers, std::vector<std::int64_t>(cells, 0));

  // x runs over kZero (x = 0) followed by the logs 0 .. Q - 2
  auto run = [&](unsigned w, std::uint64_t lo, std::uint64_t hi) {
    auto& hist = partial[w];
    for (std::uint64_t t = lo; t < hi; ++t) {
      const std::uint32_t x = t == 0 ? ZechField::kZero : static_cast<std::uint32_t>(t - 1);
      if (!removed_logs.empty() &&
          std::find(removed_logs.begin(), removed_logs.end(), x) != removed_logs.end())
        continue;
      std::uint64_t W = 0;
      bool skip = false;
      for (std::size_t l = 0; l < wild.size(); ++l) {
        std::uint32_t v = detail::horner(Z, wild[l].num, x);
        if (!wild[l].den_constant || wild[l].den[0] != 0) {
          const std::uint32_t d = detail::horner(Z, wild[l].den, x);
          if (d == ZechField::kZero) {
            skip = true;
            break;
          }
          v = Z.div(v, d);
        }
        if (v != ZechField::kZero) W += wild_weight[l] * T[v];
      }
      if (skip) continue;
      std::uint64_t c = 0;
      if (tame) {
        const std::uint32_t a = detail::horner(Z, tame->num, x);
        const std::uint32_t b = detail::horner(Z, tame->den, x);
        if (a == ZechField::kZero || b == ZechField::kZero) continue;
        c = (Z.div(a, b) % q1) * tame_mult % q1;
      }
      ++hist[(W % pn) * q1 + c];
    }
  };
  if (workers == 1) {
    run(0, 0, Q);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (Q + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back(run, w, std::min<std::uint64_t>(Q, w * chunk), std::min<std::uint64_t>(Q, (w + 1) * chunk));
    for (auto& t : pool) t.join();
  }

  SumHistogram counts(pn, std::vector<std::int64_t>(q1, 0));
  for (const auto& hist : partial)
    for (std::size_t i = 0; i < cells; ++i) counts[i / q1][i % q1] += hist[i];
  if (!inf_removed) {
    const CharacterValue v = ch.value_at(Point::infinity());
    counts[(v.w * k) % pn][(v.c * k) % q1] += 1;
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Append-only JSONL cache of computed sums keyed by (spec hash, k).

class SumLedger {
 public:
  SumLedger() = default;
  explicit SumLedger(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        auto j = nlohmann::json::parse(line);
        CycloInt v;
        for (const auto& e : j.at("S_k")) v.c.push_back(e.is_string() ? BigInt(e.get<std::string>()) : BigInt(e.get<std::int64_t>()));
        entries_[{j.at("spec_hash").get<std::string>(), j.at("k").get<unsigned>()}] = std::move(v);
      } catch (const std::exception&) {
        // a torn trailing line from an interrupted run is ignored
      }
    }
  }

  // Ledger in $ABELNP_CACHE_DIR/sums.jsonl, or in-memory when the variable is unset.
  static SumLedger from_environment() {
    const char* dir = std::getenv("ABELNP_CACHE_DIR");
    if (!dir || !*dir) return SumLedger();
    std::filesystem::create_directories(dir);
    return SumLedger((std::filesystem::path(dir) / "sums.jsonl").string());
  }

  std::optional<CycloInt> find(const std::string& hash, unsigned k) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find({hash, k});
    if (it == entries_.end()) return std::nullopt;
    ++hits_;
    return it->second;
  }

  void record(const std::string& hash, unsigned k, const CycloInt& s) {
    std::lock_guard lock(mu_);
    if (!entries_.emplace(std::make_pair(hash, k), s).second) return;
    if (path_.empty()) return;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : s.c) {
      if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
        arr.push_back(static_cast<std::int64_t>(v));
      } else {
        arr.push_back(v.str());
      }
    }
    std::ofstream out(path_, std::ios::app);
    out << nlohmann::json{{"spec_hash", hash}, {"k", k}, {"S_k", arr}}.dump() << "\n";
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }
  std::size_t hits() const {
    std::lock_guard lock(mu_);
    return hits_;
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  mutable std::mutex mu_;
  mutable std::size_t hits_ = 0;
  std::map<std::pair<std::string, unsigned>, CycloInt> entries_;
};

inline CycloInt character_sum(const Character& ch, const CycloRing& R, unsigned k, const LOptions& opt = {}) {
  const std::string hash = spec_hash(ch.spec());
  if (opt.ledger)
    if (auto hit = opt.ledger->find(hash, k); hit && hit->c.size() == R.zero().c.size()) return *hit;
  CycloInt s = R.from_histogram(character_histogram(ch, k, opt));
  if (opt.ledger) opt.ledger->record(hash, k, s);
  return s;
}

// ---------------------------------------------------------------------------

struct LPolynomial {
  std::int64_t degree = 0;              // Euler-Poincare degree D
  std::int64_t observed_degree = 0;     // last nonzero completed coefficient up to D + guard
  bool guards_vanish = false;
  std::vector<CycloInt> sums;           // S_1 .. S_K
  std::vector<CycloInt> raw;            // L(rho, V, s) mod s^{K+1}
  std::vector<CycloInt> completed;      // L(rho, s) mod s^{K+1}
  std::vector<std::pair<Point, CharacterValue>> completions;
  std::string spec_hash;
};

// exp(sum S_k s^k / k) mod s^{K+1}, asserting integrality of every coefficient.
inline std::vector<CycloInt> series_from_sums(const CycloRing& R, const std::vector<CycloInt>& sums) {
  std::vector<CycloInt> c{R.one()};
  for (std::size_t k = 1; k <= sums.size(); ++k) {
    CycloInt acc = R.zero();
    for (std::size_t i = 1; i <= k; ++i) acc = R.add(acc, R.mul(sums[i - 1], c[k - i]));
    c.push_back(R.divide_exact(acc, BigInt(k)));
  }
  return c;
}

// Assembles L(rho, V, s) and the completed L(rho, s) from S_1 .. S_K.
inline LPolynomial l_polynomial_from_sums(const Character& ch, std::vector<CycloInt> sums) {
  const CycloRing R(ch.p(), ch.n(), ch.q());
  LPolynomial L;
  L.spec_hash = spec_hash(ch.spec());
  L.degree = ch.degree();
  const std::size_t K = sums.size();
  L.sums = std::move(sums);
  L.raw = series_from_sums(R, L.sums);
  L.completed = L.raw;
  for (const auto& pd : ch.points()) {
    if (pd.datum.ramified()) continue;
    const CharacterValue v = ch.value_at(pd.Q);
    L.completions.emplace_back(pd.Q, v);
    const CycloInt lambda = R.mul(R.zeta_power(static_cast<std::int64_t>(v.w)), R.xi_power(static_cast<std::int64_t>(v.c)));
    // multiply by 1 / (1 - lambda s)
    for (std::size_t i = 1; i <= K; ++i) L.completed[i] = R.add(L.completed[i], R.mul(lambda, L.completed[i - 1]));
  }
  L.observed_degree = 0;
  for (std::size_t i = 0; i <= K; ++i)
    if (!R.is_zero(L.completed[i])) L.observed_degree = static_cast<std::int64_t>(i);
  L.guards_vanish = L.observed_degree <= L.degree && static_cast<std::int64_t>(K) >= L.degree;
  return L;
}

inline std::vector<CycloInt> character_sums(const Character& ch, unsigned K, const LOptions& opt = {}) {
  const CycloRing R(ch.p(), ch.n(), ch.q());
  std::vector<CycloInt> sums;
  for (unsigned k = 1; k <= K; ++k) sums.push_back(character_sum(ch, R, k, opt));
  return sums;
}

inline LPolynomial l_polynomial(const Character& ch, const LOptions& opt = {}) {
  const unsigned K = static_cast<unsigned>(ch.degree()) + opt.guard;
  return l_polynomial_from_sums(ch, character_sums(ch, K, opt));
}

// ---------------------------------------------------------------------------

struct NewtonResult {
  RationalPolygon polygon;
  std::vector<std::optional<Rational>> valuations;  // v_q(c_i), nullopt for c_i = 0
  unsigned precision = 0;
};

// Lower hull of (i, v_q(c_i)) for i = 0 .. deg.
inline NewtonResult newton_polygon(const Character& ch, const std::vector<CycloInt>& coeffs, std::int64_t deg) {
  const CycloRing R(ch.p(), ch.n(), ch.q());
  const unsigned a = ch.a();
  unsigned M = a * static_cast<unsigned>(deg + 2) + 2;
  for (int attempt = 0; attempt < 4; ++attempt, M *= 2) {
    // keep p^M inside the 62-bit Galois ring
    unsigned cap = 0;
    while (ipow(ch.p(), cap + 1) <= (std::uint64_t{1} << 62) / ch.p()) ++cap;
    M = std::min(M, cap);
    const CycloPadicRing P(ch.p(), ch.n(), ch.spec().field, M);
    NewtonResult out;
    out.precision = M;
    bool ok = true;
    std::vector<HullPoint> pts;
    for (std::int64_t i = 0; i <= deg; ++i) {
      const CycloInt& c = coeffs[static_cast<std::size_t>(i)];
      if (R.is_zero(c)) {
        out.valuations.push_back(std::nullopt);
        pts.push_back({i, std::nullopt});
        continue;
      }
      PadicValuation v = P.valuation(P.from_cyclo(R, c));
      if (!v.finite) {
        ok = false;
        break;
      }
      Rational vq = v.value / Rational(static_cast<std::int64_t>(a));
      out.valuations.push_back(vq);
      pts.push_back({i, vq});
    }
    if (ok) {
      out.polygon = lower_hull(pts);
      return out;
    }
    if (M == cap) break;
  }
  throw BudgetError("p-adic precision insufficient for a nonzero L-coefficient");
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
  LOptions l;
  bool check_inverse = true;
  std::optional<std::vector<Rational>> hodge_override;
};

struct VerifyReport {
  std::string spec_hash;
  std::uint64_t seed = 0;
  std::int64_t degree = 0;
  std::int64_t observed_degree = 0;
  std::int64_t remark_endpoint = 0;
  std::uint64_t omega = 0;
  bool guards_vanish = false;
  RationalPolygon np, hp;
  DominationReport domination;
  bool np_above_hp = false;
  bool endpoints_match = false;
  bool hp_length_is_degree = false;
  std::optional<RationalPolygon> np_inverse, hp_inverse;
  bool inverse_guards_vanish = true;
  bool np_duality = true;
  bool hp_duality = true;
  bool hodge_overridden = false;
  LPolynomial l;

  bool ok() const {
    return guards_vanish && inverse_guards_vanish && np_above_hp && endpoints_match && hp_length_is_degree && np_duality && hp_duality;
  }
};

inline VerifyReport verify_character(const CharacterSpec& spec, const VerifyOptions& opt = {}) {
  const Character ch(spec);
  VerifyReport r;
  r.spec_hash = spec_hash(ch.spec());
  r.seed = ch.spec().seed;
  r.degree = ch.degree();
  r.remark_endpoint = remark_endpoint(ch.spec().genus, ch.ramification());
  r.omega = ch.omega();
  r.l = l_polynomial(ch, opt.l);
  r.observed_degree = r.l.observed_degree;
  r.guards_vanish = r.l.guards_vanish;
  r.np = newton_polygon(ch, r.l.completed, r.degree).polygon;
  if (opt.hodge_override) {
    r.hp = from_slopes(*opt.hodge_override);
    r.hodge_overridden = true;
  } else {
    r.hp = ch.hodge();
  }
  r.domination = lies_above(r.np, r.hp);
  r.np_above_hp = r.domination.holds && r.np.length() == r.hp.length();
  r.endpoints_match = r.np.end() == r.hp.end();
  r.hp_length_is_degree = r.hp.length() == Rational(r.degree);
  if (opt.check_inverse) {
    // rho^{-1}(x) is the conjugate of rho(x), so its sums are the conjugated sums
    const Character inv(inverse_spec(ch.spec()));
    const CycloRing R(ch.p(), ch.n(), ch.q());
    std::vector<CycloInt> conj;
    for (const auto& s : r.l.sums) conj.push_back(R.conjugate(s));
    LPolynomial li = l_polynomial_from_sums(inv, std::move(conj));
    r.inverse_guards_vanish = li.guards_vanish;
    r.np_inverse = newton_polygon(inv, li.completed, inv.degree()).polygon;
    r.hp_inverse = inv.hodge();
    r.np_duality = dual_slopes(r.np) == r.np_inverse->slopes();
    r.hp_duality = dual_slopes(r.hp) == r.hp_inverse->slopes();
  }
  return r;
}

inline nlohmann::json cyclo_to_json(const CycloRing& R, const CycloInt& a) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : a.c) arr.push_back(v.str());
  return {{"text", R.to_string(a)}, {"coefficients", arr}};
}

inline nlohmann::json to_json(const VerifyReport& r, const Character& ch) {
  const CycloRing R(ch.p(), ch.n(), ch.q());
  nlohmann::json coeffs = nlohmann::json::array();
  for (std::int64_t i = 0; i <= r.degree; ++i) coeffs.push_back(R.to_string(r.l.completed[static_cast<std::size_t>(i)]));
  nlohmann::json j{{"spec_hash", r.spec_hash},
                   {"spec_seed", r.seed},
                   {"degree", r.degree},
                   {"observed_degree", r.observed_degree},
                   {"remark_endpoint", r.remark_endpoint},
                   {"omega", r.omega},
                   {"guards_vanish", r.guards_vanish},
                   {"newton", to_json(r.np)},
                   {"hodge", to_json(r.hp)},
                   {"hodge_overridden", r.hodge_overridden},
                   {"np_above_hp", r.np_above_hp},
                   {"min_margin", to_string(r.domination.min_margin)},
                   {"witness_x", to_string(r.domination.witness_x)},
                   {"endpoints_match", r.endpoints_match},
                   {"hp_length_is_degree", r.hp_length_is_degree},
                   {"np_duality", r.np_duality},
                   {"hp_duality", r.hp_duality},
                   {"ok", r.ok()},
                   {"l_coefficients", coeffs}};
  if (r.np_inverse) j["newton_inverse"] = to_json(*r.np_inverse);
  if (r.hp_inverse) j["hodge_inverse"] = to_json(*r.hp_inverse);
  return j;
}

}  // namespace abelnp
