#include <gtest/gtest.h>

#include "oracles.hpp"
#include "symtwist/expsums.hpp"

using namespace symtwist;

TEST(Kloosterman, OneVariableFiveTerms) {
  // e(2/5) + 1 + 1 + e(3/5)
  const auto r = hyper_kloosterman(1, 1, PrimePower(5, 1));
  EXPECT_NEAR(r.value.real(), 2.0 + 2.0 * std::cos(4.0 * std::numbers::pi / 5.0), 1e-12);
  EXPECT_NEAR(r.value.imag(), 0.0, 1e-12);
}

TEST(Kloosterman, MatchesNestedLoopOracle) {
  struct Case {
    unsigned n;
    u64 p;
    unsigned a;
  };
  for (const Case c : {Case{1, 7, 2}, Case{2, 3, 2}, Case{2, 5, 2}, Case{3, 5, 2}, Case{2, 7, 2}, Case{3, 3, 3}, Case{4, 5, 2}}) {
    const PrimePower pp(c.p, c.a);
    for (i64 z : {1, 2, -1, 4}) {
      if (z % static_cast<i64>(c.p) == 0) continue;
      const auto lib = hyper_kloosterman(c.n, z, pp).value;
      const auto ref = oracle::kloosterman(c.n, z, c.p, pp.q);
      EXPECT_LT(std::abs(lib - ref), 1e-8 * (1.0 + std::abs(ref))) << c.n << " " << c.p << " " << c.a << " z=" << z;
    }
  }
}

TEST(Kloosterman, FamilyMatchesSingleEvaluations) {
  const PrimePower pp(5, 2);
  const KloostermanFamily fam(3, pp);
  for (i64 z = 1; z < 25; ++z) {
    if (z % 5 == 0) continue;
    EXPECT_LT(std::abs(fam(z) - hyper_kloosterman(3, z, pp).value), 1e-9);
  }
}

TEST(Kloosterman, ConjugationUnderSignFlip) {
  // x -> -x turns the sum at z into the conjugate of the sum at (-1)^(n+1) z
  const PrimePower pp(5, 2);
  for (unsigned n = 1; n <= 4; ++n) {
    for (i64 z : {1, 2, 3, 7}) {
      const i64 zz = n % 2 == 1 ? z : -z;
      EXPECT_LT(std::abs(hyper_kloosterman(n, z, pp).value - std::conj(hyper_kloosterman(n, zz, pp).value)), 1e-9);
    }
  }
}

TEST(Kloosterman, BoundTableCases) {
  EXPECT_DOUBLE_EQ(kloosterman_bound(2, PrimePower(5, 2)).bound, 75.0);
  EXPECT_DOUBLE_EQ(kloosterman_bound(4, PrimePower(5, 2)).bound, 625.0);
  EXPECT_EQ(kloosterman_bound(4, PrimePower(5, 3)).label, "n=p-1, a=3");
  EXPECT_EQ(kloosterman_bound(4, PrimePower(5, 4)).label, "n=p-1, a=4");
  EXPECT_EQ(kloosterman_bound(4, PrimePower(5, 5)).label, "n=p-1, a>=5");
  EXPECT_DOUBLE_EQ(kloosterman_bound(4, PrimePower(5, 4)).bound, 5.0 * std::pow(625.0, 2.0));
  EXPECT_FALSE(kloosterman_bound(5, PrimePower(5, 2)).applies);
  EXPECT_FALSE(kloosterman_bound(2, PrimePower(5, 1)).applies);
}

TEST(Kloosterman, BoundsHoldOnSmallGrid) {
  for (u64 p : {3ULL, 5ULL, 7ULL}) {
    for (unsigned a = 2; a <= 3; ++a) {
      for (unsigned n = 2; n < p; ++n) {
        const PrimePower pp(p, a);
        if (!kloosterman_within_budget(n, pp) || std::pow(static_cast<double>(pp.q), n) > 5e6) continue;
        const KloostermanFamily fam(n, pp);
        const auto b = kloosterman_bound(n, pp);
        ASSERT_TRUE(b.applies);
        for (i64 z = 1; z < static_cast<i64>(pp.q); ++z) {
          if (z % static_cast<i64>(p) == 0) continue;
          EXPECT_LE(std::abs(fam(z)), b.bound * (1.0 + 1e-12)) << p << " " << a << " " << n << " z=" << z;
        }
      }
    }
  }
}

TEST(Kloosterman, Errors) {
  try {
    (void)hyper_kloosterman(2, 5, PrimePower(5, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotAUnit);
  }
  try {
    (void)hyper_kloosterman(6, 1, PrimePower(13, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParameterOutOfRange);
  }
}

TEST(GaussPower, DirectMatchesOracleCharacters) {
  const PrimePower pp(5, 2);
  const auto t = oracle::log_table(5, 25);
  for (unsigned n : {3U, 4U}) {
    for (i64 r : {1, 2}) {
      cplx ref{0.0, 0.0};
      for (u64 u = 1; u < 5; ++u) {
        const u64 j = 4 * u;
        cplx tau{0.0, 0.0};
        for (u64 m = 1; m < 25; ++m) tau += oracle::character(t, j, static_cast<i64>(m)) * oracle::e(m / 25.0L);
        ref += std::conj(oracle::character(t, j, r)) * std::pow(tau, static_cast<int>(n));
      }
      EXPECT_LT(std::abs(gauss_power_sum(n, r, pp) - ref), 1e-8 * std::abs(ref));
    }
  }
}

TEST(GaussPower, KloostermanRouteAgreesOnSmallCases) {
  for (unsigned n : {3U, 4U}) {
    for (i64 r : {1, 2}) {
      const PrimePower pp(5, 2);
      const cplx A = gauss_power_sum(n, r, pp);
      const cplx B = gauss_power_sum_via_l1(n, r, pp);
      EXPECT_LT(std::abs(A - B), 1e-6 * std::max(1.0, std::abs(A))) << n << " " << r;
    }
  }
}

TEST(GaussPower, ConstantIsReported) {
  for (unsigned a = 2; a <= 3; ++a) {
    const PrimePower pp(5, a);
    const cplx A = gauss_power_sum(3, 1, pp);
    const double c = gauss_power_constant(A, 3, pp);
    EXPECT_TRUE(std::isfinite(c));
    EXPECT_NEAR(c, std::abs(A) / std::pow(5.0, 0.5 + a * 2.0), 1e-12);
  }
}

TEST(GaussPower, Preconditions) {
  EXPECT_NO_THROW((void)gauss_power_sum(3, 1, PrimePower(3, 2)));
  EXPECT_THROW((void)gauss_power_sum(2, 1, PrimePower(5, 2)), Error);
  EXPECT_THROW((void)gauss_power_sum(6, 1, PrimePower(5, 2)), Error);
  EXPECT_THROW((void)gauss_power_sum(3, 5, PrimePower(5, 2)), Error);
  EXPECT_THROW((void)gauss_power_sum(3, 1, PrimePower(5, 1)), Error);
}
