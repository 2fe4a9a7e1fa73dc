#include <gtest/gtest.h>

#include <random>

#include "abelnp/cyclotomic.hpp"

using namespace abelnp;

namespace {

CycloInt random_cyclo(const CycloRing& R, std::mt19937_64& rng, int span = 7) {
  CycloInt a = R.zero();
  for (auto& c : a.c) c = static_cast<int>(rng() % (2 * span + 1)) - span;
  return a;
}

int mobius(std::uint64_t m) {
  int mu = 1;
  for (std::uint64_t d = 2; d * d <= m; ++d) {
    if (m % d) continue;
    m /= d;
    if (m % d == 0) return 0;
    mu = -mu;
  }
  return m > 1 ? -mu : mu;
}

// E(x) = prod_{p !| m} (1 - x^m)^{-mu(m)/m}, expanded with exact rationals.
std::vector<BigRational> artin_hasse_product(std::uint32_t p, std::size_t prec) {
  std::vector<BigRational> e(prec, BigRational(0));
  e[0] = 1;
  for (std::size_t m = 1; m < prec; ++m) {
    if (m % p == 0 || mobius(m) == 0) continue;
    const BigRational alpha(-mobius(m), static_cast<long>(m));
    std::vector<BigRational> f(prec, BigRational(0));
    BigRational binom = 1;
    for (std::size_t k = 0; k * m < prec; ++k) {
      f[k * m] = (k % 2 ? -binom : binom);
      binom = binom * (alpha - BigRational(static_cast<long>(k))) / BigRational(static_cast<long>(k + 1));
    }
    std::vector<BigRational> g(prec, BigRational(0));
    for (std::size_t i = 0; i < prec; ++i)
      if (e[i] != 0)
        for (std::size_t j = 0; i + j < prec; j += m) g[i + j] += e[i] * f[j];
    e = std::move(g);
  }
  return e;
}

}  // namespace

TEST(Cyclotomic, ValuationExamples) {
  CycloRing R(3, 1, 3);
  CycloPadicRing P(3, 1, FieldDesc::prime(3), 8);
  EXPECT_EQ(P.valuation(P.from_int(3)).value, Rational(1));
  EXPECT_EQ(P.valuation(P.x()).value, Rational(1, 2));
  const CycloInt gauss = R.sub(R.zeta_power(1), R.zeta_power(2));
  const PadicValuation v = P.valuation(P.from_cyclo(R, gauss));
  ASSERT_TRUE(v.finite);
  EXPECT_EQ(v.value, Rational(1, 2));
  const PadicValuation z = P.valuation(P.zero());
  EXPECT_FALSE(z.finite);
  EXPECT_EQ(z.bound, 8);
  EXPECT_FALSE(P.valuation(P.from_int(6561)).finite);  // 3^8 vanishes at precision 8
}

TEST(Cyclotomic, ZetaPower) {
  CycloRing R(3, 1, 3);
  EXPECT_EQ(R.zeta_power(0), R.one());
  EXPECT_EQ(R.zeta_power(1), R.add(R.one(), R.x()));
  std::mt19937_64 rng(5);
  for (unsigned n = 1; n <= 2; ++n)
    for (std::uint64_t q : {3ull, 9ull}) {
      CycloRing S(3, n, q);
      for (int t = 0; t < 20; ++t) {
        const std::int64_t a = static_cast<std::int64_t>(rng() % 50), b = static_cast<std::int64_t>(rng() % 50);
        EXPECT_EQ(S.mul(S.zeta_power(a), S.zeta_power(b)), S.zeta_power(a + b));
        EXPECT_EQ(S.zeta_power(a), S.zeta_power_direct(a));
      }
      EXPECT_EQ(S.pow(S.zeta(), S.pn()), S.one());
      EXPECT_EQ(S.pow(S.xi_power(1), q - 1), S.one());
      if (q > 3) EXPECT_NE(S.pow(S.xi_power(1), (q - 1) / 2), S.one());
    }
}

TEST(Cyclotomic, ConjugateIsAnAutomorphism) {
  std::mt19937_64 rng(9);
  CycloRing R(5, 1, 25);
  for (int t = 0; t < 20; ++t) {
    const CycloInt a = random_cyclo(R, rng), b = random_cyclo(R, rng);
    EXPECT_EQ(R.conjugate(R.mul(a, b)), R.mul(R.conjugate(a), R.conjugate(b)));
    EXPECT_EQ(R.conjugate(R.conjugate(a)), a);
  }
  EXPECT_EQ(R.conjugate(R.zeta_power(1)), R.zeta_power(-1));
  EXPECT_EQ(R.conjugate(R.xi_power(1)), R.xi_power(-1));
}

TEST(Cyclotomic, ReductionIsARingMap) {
  std::mt19937_64 rng(13);
  for (auto [p, n, a] : {std::tuple{3u, 1u, 1u}, std::tuple{3u, 2u, 1u}, std::tuple{3u, 1u, 2u}, std::tuple{5u, 1u, 2u}}) {
    const FieldDesc fd = a == 1 ? FieldDesc::prime(p) : FieldDesc::generate(p, a, kDefaultSeed);
    CycloRing R(p, n, fd.order());
    CycloPadicRing P(p, n, fd, 6);
    for (int t = 0; t < 15; ++t) {
      const CycloInt x = random_cyclo(R, rng), y = random_cyclo(R, rng);
      EXPECT_EQ(P.from_cyclo(R, R.mul(x, y)), P.mul(P.from_cyclo(R, x), P.from_cyclo(R, y)));
      EXPECT_EQ(P.from_cyclo(R, R.add(x, y)), P.add(P.from_cyclo(R, x), P.from_cyclo(R, y)));
    }
    EXPECT_EQ(P.from_cyclo(R, R.xi_power(1)), P.xi_power(1));
    EXPECT_EQ(P.from_cyclo(R, R.zeta_power(1)), P.zeta_power(1));
  }
}

TEST(Cyclotomic, ValuationIsMultiplicativeAndUltrametric) {
  std::mt19937_64 rng(17);
  CycloRing R(3, 2, 9);
  CycloPadicRing P(3, 2, FieldDesc::generate(3, 2, kDefaultSeed), 12);
  for (int t = 0; t < 40; ++t) {
    const CycloInt x = random_cyclo(R, rng, 4), y = random_cyclo(R, rng, 4);
    const auto vx = P.valuation(P.from_cyclo(R, x)), vy = P.valuation(P.from_cyclo(R, y));
    const auto vxy = P.valuation(P.from_cyclo(R, R.mul(x, y)));
    const auto vs = P.valuation(P.from_cyclo(R, R.add(x, y)));
    if (!vx.finite || !vy.finite) continue;
    if (vxy.finite) EXPECT_EQ(vxy.value, vx.value + vy.value);
    if (vs.finite) EXPECT_GE(vs.value, std::min(vx.value, vy.value));
  }
}

TEST(Cyclotomic, ArtinHasseLeadingTerms) {
  const unsigned M = 6;
  const auto E = artin_hasse_series(3, 10, M);
  EXPECT_EQ(E[0], 1u);
  EXPECT_EQ(E[1], 1u);
  EXPECT_EQ(E[2], (ipow(3, M) + 1) / 2);
  // agrees with exp below degree p
  const auto e5 = artin_hasse_rational(5, 5);
  BigRational fact = 1;
  for (long k = 0; k < 5; ++k) {
    if (k) fact *= k;
    EXPECT_EQ(e5[static_cast<std::size_t>(k)], 1 / fact);
  }
}

TEST(Cyclotomic, ArtinHasseMatchesProductFormulaAndIsIntegral) {
  for (std::uint32_t p : {3u, 5u}) {
    const auto lib = artin_hasse_rational(p, 50);
    const auto oracle = artin_hasse_product(p, 50);
    for (std::size_t k = 0; k < 50; ++k) {
      EXPECT_EQ(lib[k], oracle[k]) << "p=" << p << " k=" << k;
      EXPECT_NE(boost::multiprecision::denominator(oracle[k]) % p, 0) << "p=" << p << " k=" << k;
    }
  }
}

TEST(Cyclotomic, GammaValuationsAndOrders) {
  const unsigned M = 10;
  for (auto [p, n, i, v] : {std::tuple{3u, 1u, 1u, Rational(1, 2)}, std::tuple{3u, 2u, 2u, Rational(1, 6)},
                            std::tuple{3u, 2u, 1u, Rational(1, 2)}, std::tuple{5u, 1u, 1u, Rational(1, 4)}}) {
    CycloPadicRing R(p, n, FieldDesc::prime(p), M);
    const CycloPadic g = solve_gamma(R, i);
    const PadicValuation val = R.valuation(g);
    ASSERT_TRUE(val.finite);
    EXPECT_EQ(val.value, v);
    const std::size_t K = static_cast<std::size_t>((M + 2) * ipow(p, i - 1) * (p - 1) + 2);
    const CycloPadic Eg = evaluate_series(R, artin_hasse_series(p, K, M), g);
    EXPECT_EQ(Eg, R.zeta_power(static_cast<std::int64_t>(ipow(p, n - i))));
    EXPECT_EQ(R.pow(Eg, ipow(p, i)), R.one());
    EXPECT_NE(R.pow(Eg, ipow(p, i - 1)), R.one());
  }
}
