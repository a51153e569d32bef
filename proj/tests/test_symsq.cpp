#include <gtest/gtest.h>

#include "oracles.hpp"
#include "symtwist/symsq.hpp"

using namespace symtwist;

namespace {

const std::array<i64, 5> k11a1{0, -1, 1, -10, -20};
const std::array<i64, 5> k14a1{1, 0, 1, 4, -6};

// h_k(alpha^2, alpha beta, beta^2) = sum_{i + j + l = k} alpha^(2i + j) beta^(j + 2l)
oracle::cd complete_homogeneous(oracle::cd x, oracle::cd y, oracle::cd z, int k) {
  oracle::cd s{0.0, 0.0};
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; i + j <= k; ++j) s += std::pow(x, i) * std::pow(y, j) * std::pow(z, k - i - j);
  }
  return s;
}

// Sym^2 coefficient at m from Satake parameters built on brute-force traces.
double oracle_symsq(const std::array<i64, 5>& a, u64 conductor, u64 m) {
  double prod = 1.0;
  u64 rest = m;
  for (u64 r = 2; r <= rest; ++r) {
    int k = 0;
    while (rest % r == 0) {
      rest /= r;
      ++k;
    }
    if (k == 0) continue;
    if (conductor % r == 0) continue;  // local factor 1 - X
    const double t = static_cast<double>(oracle::trace(a, r));
    const oracle::cd alpha(t / 2.0, std::sqrt(4.0 * r - t * t) / 2.0);
    const oracle::cd beta = std::conj(alpha);
    prod *= complete_homogeneous(alpha * alpha, alpha * beta, beta * beta, k).real();
  }
  return prod;
}

}  // namespace

TEST(SymSq, CoefficientsMatchSatakeOracle) {
  for (const auto& [a, N] : {std::pair{k11a1, 11ULL}, std::pair{k14a1, 14ULL}}) {
    const auto b = symsq_coefficients(EllipticCurve(a), 600);
    for (u64 m = 1; m <= 600; ++m) EXPECT_NEAR(static_cast<double>(b[m]), oracle_symsq(a, N, m), 1e-6 * (1 + std::abs(b[m]))) << m;
  }
}

TEST(SymSq, FirstCoefficientsOfElevenAOne) {
  const auto b = symsq_coefficients(EllipticCurve(k11a1), 10);
  EXPECT_EQ(b, (std::vector<i64>{0, 1, 2, -2, 0, -4, -4, -3, 0, 10, -8}));
}

TEST(SymSq, BadPrimePowersAreOne) {
  const auto b = symsq_coefficients(EllipticCurve(k11a1), 14641);
  EXPECT_EQ(b[11], 1);
  EXPECT_EQ(b[121], 1);
  EXPECT_EQ(b[14641], 1);
}

TEST(SymSq, LocalFactorShape) {
  const auto good = symsq_local_factor(-2, 7, ReductionKind::Good);
  EXPECT_EQ(good.coeffs, (std::vector<i64>{1, -(4 - 7), 7 * (4 - 7), -343}));
  EXPECT_EQ(symsq_local_factor(1, 11, ReductionKind::SplitMultiplicative).coeffs, (std::vector<i64>{1, -1}));
  EXPECT_EQ(symsq_local_factor(-1, 3, ReductionKind::NonsplitMultiplicative).coeffs, (std::vector<i64>{1, -1}));
  EXPECT_THROW((void)symsq_local_factor(0, 2, ReductionKind::Additive), Error);
}

TEST(SymSq, ConductorIsSquare) {
  EXPECT_EQ(symsq_conductor(EllipticCurve(k11a1)), 121u);
  EXPECT_EQ(symsq_conductor(EllipticCurve(k14a1)), 196u);
}

TEST(SymSq, AdditiveCurveRejected) {
  try {
    (void)symsq_coefficients(EllipticCurve(0, 0, 0, -1, 0), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AdditiveReduction);
  }
}

TEST(SymSq, UnitarizedSpec) {
  const auto s = unitarize_gl3(EllipticCurve(k11a1), 100);
  EXPECT_EQ(s.degree, 3u);
  EXPECT_EQ(s.mu, (std::vector<double>{-1.0, -1.0, -2.0}));
  EXPECT_EQ(s.conductor, 121u);
  EXPECT_DOUBLE_EQ(s.coeffs[1], 1.0);
  EXPECT_DOUBLE_EQ(s.coeffs[2], 1.0);
  EXPECT_DOUBLE_EQ(s.coeffs[9], 10.0 / 9.0);
  EXPECT_FALSE(s.root_number.has_value());
}

TEST(SymSq, TwistHasSameSymmetricSquare) {
  const EllipticCurve E(k11a1);
  EXPECT_EQ(symsq_twist_coefficients(E, 5, 500), symsq_coefficients(E, 500));
  // independent check away from 2 D N: Sym^2 of E_D from its own traces
  const auto ED = quadratic_twist(E, 5);
  const auto b = symsq_coefficients(E, 200);
  for (u64 r = 3; r < 200; ++r) {
    if (!is_prime(r) || r == 5 || r == 11) continue;
    const i64 t = oracle::trace(ED.coefficients(), r);
    EXPECT_EQ(b[r], t * t - static_cast<i64>(r));
  }
  const auto spec = unitarize_gl3_twist(E, 5, 50);
  EXPECT_EQ(spec.conductor, 121u);
  EXPECT_DOUBLE_EQ(spec.coeffs[9], 10.0 / 9.0);
  EXPECT_THROW((void)symsq_twist_coefficients(E, 4, 10), Error);
}

TEST(SymSq, SatakeInvariantsAreUnitaryAndSelfDual) {
  const EllipticCurve E(k11a1);
  for (u64 l : {2ULL, 3ULL, 5ULL, 7ULL, 13ULL, 101ULL}) {
    const auto t = satake_invariants(E, l);
    for (const auto& x : t.params) EXPECT_NEAR(std::abs(x), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(t.e1 - t.e2), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(t.e3 - 1.0), 0.0, 1e-12);
    const double a = static_cast<double>(oracle::trace(k11a1, l));
    EXPECT_NEAR(t.e1.real(), a * a / l - 1.0, 1e-12);
    EXPECT_NEAR(t.e1.imag(), 0.0, 1e-12);
  }
  EXPECT_THROW((void)satake_invariants(E, 11), Error);
}

TEST(SymSq, CoefficientMassGrowsSlowerThanPower) {
  const auto s = unitarize_gl3(EllipticCurve(k11a1), 100000);
  const double r1 = coefficient_mass_ratio(s, 1000), r2 = coefficient_mass_ratio(s, 100000);
  EXPECT_GT(r1, 0.0);
  EXPECT_LT(r2, r1);
  EXPECT_THROW((void)coefficient_mass_ratio(s, 100001), Error);
}

TEST(SymSq, ZetaSpec) {
  const auto z = zeta_spec(10);
  EXPECT_EQ(z.degree, 1u);
  EXPECT_EQ(z.max_m(), 10u);
  EXPECT_DOUBLE_EQ(z.coeffs[7], 1.0);
  EXPECT_DOUBLE_EQ(z.polar_residue, 1.0);
}
