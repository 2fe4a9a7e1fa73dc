#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "abelnp/cover.hpp"
#include "abelnp/lfunction.hpp"
#include "abelnp/spec_io.hpp"
#include "abelnp/sweep.hpp"

using namespace abelnp;

namespace {

const std::string kStickelberger = "p = 3\na = 1\nn = 1\nwild = [[[0, 1]]]\ntame = { f = [[0, 1]], gamma = 1 }\n";

LOptions quiet() {
  LOptions o;
  o.workers = 1;
  return o;
}

std::uint64_t brute_log(const Field& F, const FieldElement& x) {
  FieldElement acc = F.one();
  for (std::uint64_t e = 0; e + 1 < F.order(); ++e) {
    if (acc == x) return e;
    acc = F.mul(acc, F.generator());
  }
  throw std::runtime_error("no discrete log");
}

std::uint32_t absolute_trace(const Field& F, const FieldElement& x) {
  FieldElement acc = F.zero(), cur = x;
  for (std::uint32_t i = 0; i < F.degree(); ++i) {
    acc = F.add(acc, cur);
    cur = F.frobenius(cur);
  }
  return acc.c[0];
}

// sum over x in F_q^x of zeta_p^{Tr x} omega(x)^{-Gamma}
CycloInt gauss_sum(const CharacterSpec& spec, std::uint64_t gamma) {
  const Field F(spec.field);
  const CycloRing R(spec.p(), 1, spec.q());
  CycloInt s = R.zero();
  for (std::uint64_t i = 1; i < F.order(); ++i) {
    const FieldElement x = F.element(i);
    const std::int64_t e = static_cast<std::int64_t>(brute_log(F, x));
    s = R.add(s, R.mul(R.zeta_power(absolute_trace(F, x)), R.xi_power(-static_cast<std::int64_t>(gamma) * e)));
  }
  return s;
}

std::vector<Rational> NP(const CharacterSpec& spec) {
  const Character ch(spec);
  const LPolynomial L = l_polynomial(ch, quiet());
  EXPECT_TRUE(L.guards_vanish);
  return newton_polygon(ch, L.completed, L.degree).polygon.slopes();
}

}  // namespace

TEST(LFunction, TrivialCharacterCountsPoints) {
  const Character ch(parse_spec("p = 3\na = 1\nn = 1\nremoved = [[0], inf]\n"));
  const CycloRing R(3, 1, 3);
  for (unsigned k = 1; k <= 4; ++k) EXPECT_EQ(character_sum(ch, R, k, quiet()), R.from_int(BigInt(ipow(3, k)) - 1));
}

TEST(LFunction, GaussSumOracle) {
  const CharacterSpec st = parse_spec(kStickelberger);
  const CycloRing R(3, 1, 3);
  const CycloInt s1 = character_sum(Character(st), R, 1, quiet());
  EXPECT_EQ(s1, R.sub(R.zeta_power(1), R.zeta_power(2)));
  EXPECT_EQ(s1, gauss_sum(st, 1));
  for (std::uint64_t gamma : {1, 3, 6}) {
    CharacterSpec s = parse_spec("p = 3\na = 2\nn = 1\nwild = [[[0, 1]]]\ntame = { f = [[0, 1]], gamma = 1 }\n");
    s.tame->gamma = gamma;
    const CycloRing R9(3, 1, 9);
    EXPECT_EQ(character_sum(Character(s), R9, 1, quiet()), gauss_sum(s, gamma)) << "gamma " << gamma;
  }
}

TEST(LFunction, KloostermanOracle) {
  for (std::uint32_t p : {3u, 5u}) {
    const CharacterSpec s = parse_spec("p = " + std::to_string(p) + "\na = 1\nn = 1\nwild = [[[1, 0, 1], [0, 1]]]\n");
    const CycloRing R(p, 1, p);
    CycloInt kl = R.zero();
    for (std::uint64_t x = 1; x < p; ++x) kl = R.add(kl, R.zeta_power(static_cast<std::int64_t>((x + modp::inv(x, p)) % p)));
    EXPECT_EQ(character_sum(Character(s), R, 1, quiet()), kl);
  }
}

TEST(LFunction, DegreeExamples) {
  EXPECT_EQ(Character(parse_spec("p = 3\na = 1\nn = 1\nwild = [[[0, 0, 0, 0, 1]]]\n")).degree(), 3);
  EXPECT_EQ(Character(parse_spec(kStickelberger)).degree(), 1);
  EXPECT_EQ(Character(parse_spec("p = 3\na = 1\nn = 1\nwild = [[[0, 0, 1]]]\n")).degree(), 1);
}

TEST(LFunction, StickelbergerPolynomial) {
  const Character ch(parse_spec(kStickelberger));
  const CycloRing R(3, 1, 3);
  const LPolynomial L = l_polynomial(ch, quiet());
  EXPECT_TRUE(L.guards_vanish);
  EXPECT_EQ(L.degree, 1);
  EXPECT_EQ(L.completed[0], R.one());
  EXPECT_EQ(L.completed[1], gauss_sum(ch.spec(), 1));
  for (std::size_t i = 2; i < L.completed.size(); ++i) EXPECT_TRUE(R.is_zero(L.completed[i]));
  EXPECT_EQ(newton_polygon(ch, L.completed, 1).polygon.slopes(), std::vector<Rational>{Rational(1, 2)});
}

TEST(LFunction, QuadraticArtinSchreierByDirectCount) {
  const Character ch(parse_spec("p = 3\na = 1\nn = 1\nwild = [[[0, 0, 1]]]\n"));
  const CycloRing R(3, 1, 3);
  CycloInt direct = R.zero();
  for (std::int64_t x = 0; x < 3; ++x) direct = R.add(direct, R.zeta_power(x * x % 3));
  const LPolynomial L = l_polynomial(ch, quiet());
  EXPECT_TRUE(L.guards_vanish);
  EXPECT_EQ(L.degree, 1);
  EXPECT_EQ(L.completed[1], direct);
}

TEST(LFunction, CompletionRestoresRemovedUnramifiedPoints) {
  for (const std::string& text : {kStickelberger, std::string("p = 3\na = 2\nn = 2\nwild = [[[0, 1]], [[0, 0, 1]]]\ntame = { f = [[0, 1]], gamma = 2 }\n")}) {
    const CharacterSpec base = parse_spec(text);
    CharacterSpec punctured = base;
    punctured.extra_removed = {Point::at(1), Point::at(2)};
    const LPolynomial a = l_polynomial(Character(base), quiet()), b = l_polynomial(Character(punctured), quiet());
    EXPECT_EQ(b.completions.size(), 2u);
    EXPECT_TRUE(b.guards_vanish);
    for (std::int64_t i = 0; i <= a.degree; ++i) EXPECT_EQ(a.completed[static_cast<std::size_t>(i)], b.completed[static_cast<std::size_t>(i)]);
  }
}

TEST(LFunction, NewtonPolygonExamples) {
  const Character ch(parse_spec(kStickelberger));
  const CycloRing R(3, 1, 3);
  EXPECT_EQ(newton_polygon(ch, {R.one(), R.from_int(-3)}, 1).polygon.slopes(), std::vector<Rational>{Rational(1)});
  EXPECT_EQ(newton_polygon(ch, {R.one(), R.from_int(3), R.from_int(3)}, 2).polygon.slopes(),
            (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
  // q = 9: v_q(9) = 1
  const Character c9(parse_spec("p = 3\na = 2\nn = 1\nwild = [[[0, 1]]]\n"));
  const CycloRing R9(3, 1, 9);
  EXPECT_EQ(newton_polygon(c9, {R9.one(), R9.from_int(9)}, 1).polygon.slopes(), std::vector<Rational>{Rational(1)});
}

TEST(LFunction, WittReductionPreservesSums) {
  {
    const Character a(parse_spec("p = 3\na = 1\nn = 1\nwild = [[[0, 0, 0, 1]]]\n"));
    const Character b(parse_spec("p = 3\na = 1\nn = 1\nwild = [[[0, 1]]]\n"));
    EXPECT_EQ(character_sums(a, 3, quiet()), character_sums(b, 3, quiet()));
  }
  // (t^{-3} + t^{-1}, t^{-3}) minus (F - 1) of (t^{-1}, 0) and of (0, t^{-1})
  const CharacterSpec spec = parse_spec("p = 3\na = 1\nn = 2\nwild = [[[1, 0, 1], [0, 0, 0, 1]], [[1], [0, 0, 0, 1]]]\n");
  const Field F(spec.field);
  const WittPolynomials W(3, 2);
  const RationalOps ops{F};
  const RationalFunction inv1{{1}, {0, 1}}, inv3{{1}, {0, 0, 0, 1}};
  CharacterSpec red = spec;
  red.wild = witt_sub(W, ops, red.wild, WittVector<RationalOps>{inv3, ops.zero()});
  red.wild = witt_add(W, ops, red.wild, WittVector<RationalOps>{inv1, ops.zero()});
  red.wild = witt_sub(W, ops, red.wild, WittVector<RationalOps>{ops.zero(), inv3});
  red.wild = witt_add(W, ops, red.wild, WittVector<RationalOps>{ops.zero(), inv1});
  const Character a(spec), b(red);
  EXPECT_EQ(character_sums(a, 3, quiet()), character_sums(b, 3, quiet()));
  EXPECT_EQ(a.degree(), b.degree());
  for (const auto& pd : b.points())
    for (const auto& c : pd.reduced.coords) EXPECT_NE(c.pole_order() % 3 == 0 && c.pole_order() > 0, true);
}

TEST(LFunction, VerifyStickelbergerAndQuarticArtinSchreier) {
  const VerifyReport st = verify_character(parse_spec(kStickelberger), VerifyOptions{quiet()});
  EXPECT_TRUE(st.ok());
  EXPECT_EQ(st.np.slopes(), std::vector<Rational>{Rational(1, 2)});
  EXPECT_EQ(st.hp.slopes(), std::vector<Rational>{Rational(1, 2)});
  EXPECT_EQ(st.remark_endpoint, 2);
  const VerifyReport w4 = verify_character(parse_spec("p = 3\na = 1\nn = 1\nwild = [[[0, 0, 0, 0, 1]]]\n"), VerifyOptions{quiet()});
  EXPECT_TRUE(w4.ok());
  EXPECT_TRUE(w4.np_above_hp);
  EXPECT_EQ(w4.hp.slopes(), (std::vector<Rational>{Rational(1, 4), Rational(1, 2), Rational(3, 4)}));
}

TEST(LFunction, CorruptedHodgeInputFails) {
  VerifyOptions vo{quiet()};
  vo.hodge_override = std::vector<Rational>{Rational(1)};
  const VerifyReport r = verify_character(parse_spec(kStickelberger), vo);
  EXPECT_FALSE(r.np_above_hp);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.domination.min_margin, Rational(-1, 2));
}

TEST(LFunction, RandomSpecsSatisfyAllProperties) {
  SweepOptions so;
  so.count = 20;
  so.seed = 99;
  so.max_points = 200000;
  for (const auto& spec : sweep_family(so)) {
    const Character ch(spec);
    const VerifyReport r = verify_character(spec, VerifyOptions{quiet()});
    EXPECT_TRUE(r.guards_vanish) << serialize_spec(spec);
    EXPECT_TRUE(r.np_above_hp) << serialize_spec(spec);
    EXPECT_TRUE(r.np_duality) << serialize_spec(spec);
    EXPECT_TRUE(r.hp_duality) << serialize_spec(spec);
    EXPECT_TRUE(r.hp_length_is_degree) << serialize_spec(spec);
    EXPECT_NO_THROW(ch.omega());
    for (const auto& s : r.np.slopes()) {
      EXPECT_GE(s, Rational(0));
      EXPECT_LE(s, Rational(1));
    }
  }
}

TEST(LFunction, GaloisConjugateAndBaseChangeStability) {
  for (const std::string& text : {kStickelberger, std::string("p = 3\na = 2\nn = 1\nwild = [[[0, 0, [1, 1]]]]\ntame = { f = [[0, 1], [1, 1]], gamma = 3 }\n"),
                                  std::string("p = 5\na = 1\nn = 1\nwild = [[[0, 1, 0, 2]]]\n")}) {
    const CharacterSpec s = parse_spec(text);
    const auto base = NP(s);
    EXPECT_EQ(NP(gamma_twist_spec(frobenius_twist_spec(s))), base);
    if (s.q() <= 5) EXPECT_EQ(NP(base_change(s, 2)), base);
  }
}

TEST(LFunction, LedgerCacheHitsMatchColdRun) {
  const auto dir = std::filesystem::temp_directory_path() / "abelnp_ledger_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "sums.jsonl").string();
  const Character ch(parse_spec("p = 5\na = 1\nn = 2\nwild = [[[0, 1]], [[0, 0, 1]]]\ntame = { f = [[0, 1]], gamma = 1 }\n"));
  std::vector<CycloInt> cold;
  {
    SumLedger ledger(path);
    LOptions o = quiet();
    o.ledger = &ledger;
    cold = character_sums(ch, 3, o);
    EXPECT_EQ(ledger.hits(), 0u);
    EXPECT_EQ(ledger.size(), 3u);
  }
  SumLedger warm(path);
  LOptions o = quiet();
  o.ledger = &warm;
  EXPECT_EQ(character_sums(ch, 3, o), cold);
  EXPECT_EQ(warm.hits(), 3u);
  EXPECT_EQ(character_sums(ch, 3, quiet()), cold);
  std::filesystem::remove_all(dir);
}

TEST(LFunction, BudgetIsEnforced) {
  LOptions o = quiet();
  o.budget = 20;
  EXPECT_THROW(l_polynomial(Character(parse_spec("p = 3\na = 1\nn = 1\nwild = [[[0, 0, 0, 0, 1]]]\n")), o), BudgetError);
}

TEST(Cover, SlopeBoundExamples) {
  EXPECT_EQ(cover_slope_bound(3, 1, 0, {}, {CoverPoint{1, {2}}}), (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
  const auto b = cover_slope_bound(3, 2, 0, {}, {CoverPoint{2, {1, 5}}});
  std::vector<Rational> expected;
  for (int c = 0; c < 6; ++c)
    for (std::int64_t k = 1; k < 5; ++k) expected.emplace_back(k, 5);
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(b, expected);
  EXPECT_THROW(cover_slope_bound(3, 1, 0, {}, {}), InputError);
}

TEST(Cover, ArtinSchreierCurveByDirectCount) {
  const CoverReport r = check_cover(parse_spec("p = 3\na = 1\nn = 1\nwild = [[[0, 0, 1]]]\n"), quiet());
  ASSERT_EQ(r.genus, 1u);
  // y^3 - y = x^2 over F_3, plus one point at infinity
  std::uint64_t count = 1;
  for (std::uint64_t x = 0; x < 3; ++x)
    for (std::uint64_t y = 0; y < 3; ++y) count += (y * y * y + 3 - y) % 3 == x * x % 3;
  EXPECT_EQ(r.point_counts, std::vector<std::uint64_t>{count});
  EXPECT_EQ(r.numerator_from_counts, (std::vector<BigInt>{1, 0, 3}));
  EXPECT_TRUE(r.numerator_match);
  EXPECT_EQ(r.np.slopes(), (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
  EXPECT_EQ(r.bound.slopes(), r.np.slopes());
  EXPECT_TRUE(r.ok());
}

TEST(Cover, Order9CoverFactorsThroughAllCharacters) {
  const CoverReport r = check_cover(parse_spec("p = 3\na = 1\nn = 2\nwild = [[[0, 1]], [[0, 0, 0, 0, 0, 1]]]\n"), quiet());
  EXPECT_EQ(r.degrees.size(), 8u);
  EXPECT_TRUE(r.product_integral);
  EXPECT_TRUE(r.numerator_match);
  EXPECT_TRUE(r.np_above_bound);
  std::int64_t total = 0;
  for (auto d : r.degrees) total += d;
  EXPECT_EQ(static_cast<std::int64_t>(2 * r.genus), total);
}
