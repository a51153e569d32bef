#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "symtwist/characters.hpp"

using namespace symtwist;

namespace {

// Primitive wild characters from an independent log table: chi_j with j = (p-1)u, p not dividing u.
std::vector<u64> oracle_wild_primitive(const oracle::LogTable& t, u64 p) {
  std::vector<u64> js;
  for (u64 u = 1; u < t.phi / (p - 1); ++u) {
    if (u % p != 0) js.push_back((p - 1) * u);
  }
  return js;
}

}  // namespace

TEST(Characters, CountOfPrimitiveWildCharacters) {
  for (u64 p : {3ULL, 5ULL, 7ULL}) {
    for (unsigned a = 2; a <= 4; ++a) {
      const PrimePower pp(p, a);
      EXPECT_EQ(enumerate_wild_primitive(pp).size(), pp.q / p - pp.q / (p * p));
    }
  }
  EXPECT_TRUE(enumerate_wild_primitive(PrimePower(5, 1)).empty());
}

TEST(Characters, ValuesMatchIndependentConstruction) {
  for (u64 p : {3ULL, 5ULL, 7ULL}) {
    for (unsigned a = 2; a <= 3; ++a) {
      const PrimePower pp(p, a);
      const auto t = oracle::log_table(p, pp.q);
      const auto js = oracle_wild_primitive(t, p);
      std::vector<bool> matched(js.size(), false);
      for (const auto& chi : enumerate_wild_primitive(pp)) {
        bool found = false;
        for (std::size_t i = 0; i < js.size() && !found; ++i) {
          bool same = true;
          for (u64 m = 1; m < pp.q && same; ++m) same = std::abs(chi(static_cast<i64>(m)) - oracle::character(t, js[i], static_cast<i64>(m))) < 1e-12;
          if (same) {
            EXPECT_FALSE(matched[i]);
            matched[i] = found = true;
          }
        }
        EXPECT_TRUE(found) << "p=" << p << " a=" << a << " u=" << chi.wild_exponent();
      }
    }
  }
}

TEST(Characters, MultiplicativeAndPeriodic) {
  const PrimePower pp(5, 3);
  const auto g = make_group(pp);
  for (u64 u : {1ULL, 7ULL, 24ULL}) {
    for (u64 v : {0ULL, 1ULL, 3ULL}) {
      const DirichletCharacter chi(g, u, v);
      for (i64 m = 1; m < 60; ++m) {
        for (i64 n = 1; n < 30; ++n) EXPECT_LT(std::abs(chi(m * n) - chi(m) * chi(n)), 1e-12);
        EXPECT_LT(std::abs(chi(m) - chi(m + static_cast<i64>(pp.q))), 1e-15);
      }
      EXPECT_EQ(chi(5), cplx(0.0, 0.0));
      EXPECT_LT(std::abs(chi(-1) - static_cast<double>(chi.parity())), 1e-12);
    }
  }
}

TEST(Characters, ConjugateInvertsValues) {
  const auto g = make_group(PrimePower(7, 2));
  const DirichletCharacter chi(g, 3, 2);
  const auto cb = chi.conj();
  for (i64 m = 1; m < 49; ++m) {
    if (m % 7 == 0) continue;
    EXPECT_LT(std::abs(chi(m) * cb(m) - 1.0), 1e-12);
  }
  EXPECT_EQ(cb.conj(), chi);
}

TEST(Characters, ConductorAndWildness) {
  const auto g = make_group(PrimePower(3, 4));
  EXPECT_EQ(DirichletCharacter(g, 0, 0).conductor(), 1u);
  EXPECT_TRUE(DirichletCharacter(g, 0, 0).is_trivial());
  EXPECT_EQ(DirichletCharacter(g, 0, 1).conductor(), 3u);
  EXPECT_FALSE(DirichletCharacter(g, 0, 1).is_wild());
  EXPECT_EQ(DirichletCharacter(g, 9, 0).conductor(), 9u);
  EXPECT_EQ(DirichletCharacter(g, 3, 0).conductor(), 27u);
  EXPECT_EQ(DirichletCharacter(g, 1, 0).conductor(), 81u);
  EXPECT_TRUE(DirichletCharacter(g, 1, 0).is_primitive());
  // conductor by brute force: smallest p^c with chi trivial on 1 + p^c Z
  for (u64 u = 1; u < 27; ++u) {
    const DirichletCharacter chi(g, u, 0);
    unsigned c = 0;
    for (; c <= 4; ++c) {
      bool trivial = true;
      for (u64 k = 0; k < 81 && trivial; k += ipow(3, c)) {
        if (k == 0) continue;
        trivial = std::abs(chi(static_cast<i64>(1 + k)) - 1.0) < 1e-12;
      }
      if (trivial && c >= 1) break;
    }
    EXPECT_EQ(chi.conductor_exponent(), c) << u;
  }
}

TEST(Characters, WildCharactersAreEven) {
  for (const auto& chi : enumerate_wild_primitive(PrimePower(7, 3))) {
    EXPECT_TRUE(chi.is_wild());
    EXPECT_TRUE(chi.is_even());
  }
}

TEST(Characters, GaussSumMatchesOracleAndHasModulusRootQ) {
  for (u64 p : {3ULL, 5ULL, 7ULL}) {
    for (unsigned a = 2; a <= 3; ++a) {
      const PrimePower pp(p, a);
      for (const auto& chi : enumerate_wild_primitive(pp)) {
        cplx direct{0.0, 0.0};
        for (u64 m = 1; m < pp.q; ++m) direct += chi(static_cast<i64>(m)) * oracle::e(static_cast<long double>(m) / pp.q);
        const cplx tau = gauss_sum(chi);
        EXPECT_LT(std::abs(tau - direct), 1e-9);
        EXPECT_NEAR(std::norm(tau), static_cast<double>(pp.q), 1e-9);
      }
    }
  }
}

TEST(Characters, GaussSumOfConjugate) {
  // tau(conj chi) = chi(-1) conj(tau(chi))
  const auto g = make_group(PrimePower(5, 2));
  for (u64 u = 1; u < 5; ++u) {
    for (u64 v = 0; v < 4; ++v) {
      const DirichletCharacter chi(g, u, v);
      EXPECT_LT(std::abs(gauss_sum(chi.conj()) - static_cast<double>(chi.parity()) * std::conj(gauss_sum(chi))), 1e-9);
    }
  }
}

TEST(Characters, GaussSumRejectsImprimitive) {
  const auto g = make_group(PrimePower(3, 3));
  EXPECT_THROW((void)gauss_sum(DirichletCharacter(g, 3, 0)), Error);
}

TEST(Characters, ExponentSetMembership) {
  for (u64 p : {3ULL, 5ULL, 7ULL}) {
    for (unsigned a = 1; a <= 4; ++a) {
      const u64 q = ipow(p, a);
      std::set<u64> brute;
      for (u64 m = 1; m < q; ++m) {
        if (m % p != 0 && oracle::powmod(m, p - 1, q) == 1) brute.insert(m);
      }
      const auto set = exponent_set(PrimePower(p, a));
      EXPECT_EQ(std::set<u64>(set.begin(), set.end()), brute);
      for (i64 m = 1; m < static_cast<i64>(q); ++m) EXPECT_EQ(in_exponent_set(m, p, a), brute.count(static_cast<u64>(m)) == 1);
    }
  }
}

TEST(Characters, OrthogonalityAgainstBruteForce) {
  for (u64 p : {3ULL, 5ULL, 7ULL}) {
    for (unsigned a = 2; a <= 4; ++a) {
      const PrimePower pp(p, a);
      const auto g = make_group(pp);
      const auto t = oracle::log_table(p, pp.q);
      const auto js = oracle_wild_primitive(t, p);
      for (u64 m = 1; m < pp.q; ++m) {
        if (m % p == 0) continue;
        cplx brute{0.0, 0.0};
        for (u64 j : js) brute += oracle::character(t, j, static_cast<i64>(m));
        const cplx lib = wild_char_sum(g, static_cast<i64>(m));
        EXPECT_LT(std::abs(lib - brute), 1e-9);
        EXPECT_LT(std::abs(lib - orthogonality_rhs(pp, static_cast<i64>(m))), 1e-9);
      }
    }
  }
}

TEST(Characters, OrthogonalityRejectsNonUnit) {
  try {
    (void)wild_char_sum(PrimePower(3, 2), 6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotAUnit);
  }
}

TEST(Characters, LargeModulusFallsBackToDiscreteLog) {
  // q above the table limit: values through Pohlig-Hellman agree with powers of the generator
  const PrimePower pp(3, 14);
  const auto g = make_group(pp);
  const DirichletCharacter chi(g, 1, 1);
  const u64 gen = g->generator();
  u64 x = 1;
  for (u64 k = 0; k < 20; ++k) {
    const cplx expect = unit_root(k * chi.multiplier() % g->order(), g->order());
    EXPECT_LT(std::abs(chi(static_cast<i64>(x)) - expect), 1e-12);
    x = mul_mod(x, gen, pp.q);
  }
}
