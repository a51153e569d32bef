#include <gtest/gtest.h>

#include "oracles.hpp"
#include "symtwist/padic_measure.hpp"

using namespace symtwist;

namespace {

const std::array<i64, 5> k11a1{0, -1, 1, -10, -20};
const std::array<i64, 5> k15a1{1, 1, 1, -10, -10};

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::InvalidInput;
}

}  // namespace

TEST(Measure, SymSqPeriodsFromNeronPeriods) {
  const EllipticCurve E(k11a1);
  const auto per = neron_periods(E);
  const auto s = symsq_periods(E);
  EXPECT_LT(std::abs(s.product - per.omega_plus * per.omega_minus), 1e-15);
  const cplx tpi(0.0, 2.0 * std::numbers::pi);
  EXPECT_LT(std::abs(s.j2 / s.j1 - tpi * tpi), 1e-12);
  // Omega- is purely imaginary, so both values are real
  EXPECT_NEAR(s.j1.imag(), 0.0, 1e-15);
  EXPECT_NEAR(s.j2.imag(), 0.0, 1e-12);
}

TEST(Measure, ComplexUnitRootSolvesFrobeniusPolynomial) {
  for (const auto& [a, p] : {std::pair<i64, u64>{-1, 3}, {1, 5}, {-2, 7}, {4, 13}}) {
    for (int emb : {1, -1}) {
      const cplx al = complex_unit_root(a, p, emb);
      EXPECT_LT(std::abs(al * al - static_cast<double>(a) * al + static_cast<double>(p)), 1e-12);
      EXPECT_NEAR(std::norm(al), static_cast<double>(p), 1e-12);
      EXPECT_EQ(al.imag() > 0, emb > 0);
    }
    // the p-adic unit root solves the same polynomial and is congruent to a_p
    const auto h = hensel_unit_root(a, p, 6);
    const u64 q = ipow(p, 6);
    EXPECT_EQ(h.value % p, reduce(a, p));
    const i128 x = h.value;
    EXPECT_EQ((((x * x - static_cast<i128>(a) * x + static_cast<i128>(p)) % q) + q) % q, 0);
  }
}

TEST(Measure, OddAndTameCharacters) {
  auto ctx = MeasureContext::for_curve(EllipticCurve(k11a1), 3, 2);
  const auto G = ctx.group(2);
  // order-2 tame character mod 9 is odd
  const DirichletCharacter odd(G, 0, 1);
  ASSERT_FALSE(odd.is_even());
  for (int j : {1, 2}) {
    const auto v = ctx.value(odd, j);
    EXPECT_TRUE(v.forced_zero);
    EXPECT_EQ(v.value, cplx(0.0, 0.0));
  }
  auto ctx5 = MeasureContext::for_curve(EllipticCurve(k11a1), 5, 2);
  const DirichletCharacter even_tame(ctx5.group(2), 1, 2);
  ASSERT_TRUE(even_tame.is_even());
  EXPECT_EQ(code_of([&] { (void)ctx5.value(even_tame, 2); }), Errc::NonWildCharacter);
  EXPECT_EQ(code_of([&] { (void)ctx.value(ctx.characters(2)[0], 3); }), Errc::ParameterOutOfRange);
  EXPECT_EQ(code_of([&] { (void)ctx.value(ctx.characters(2)[0], 2); (void)ctx.value(ctx5.characters(2)[0], 2); }),
            Errc::InvalidInput);
  EXPECT_EQ(code_of([&] { (void)ctx.value(DirichletCharacter(ctx.group(3), 3, 0), 2); }), Errc::NotPrimitive);
  EXPECT_EQ(code_of([&] { (void)ctx.value(ctx.characters(3)[0], 2); }), Errc::ParameterOutOfRange);
}

TEST(Measure, TrailRecombinesAndFactorsAreConsistent) {
  const EllipticCurve E(k11a1);
  auto ctx = MeasureContext::for_curve(E, 3, 3);
  const cplx alpha(-0.5, std::sqrt(11.0) / 2.0);  // a_3 = -1
  for (unsigned m : {2U, 3U}) {
    for (const auto& chi : ctx.characters(m)) {
      for (int j : {1, 2}) {
        const auto v = ctx.value(chi, j);
        ASSERT_FALSE(v.forced_zero);
        EXPECT_EQ(v.value, recombine(v.trail));
        EXPECT_LT(std::abs(v.trail.alpha - alpha), 1e-15);
        EXPECT_LT(std::abs(v.trail.alpha_factor - std::pow(alpha, -2 * static_cast<int>(m))), 1e-12);
        const double q = std::pow(3.0, m);
        // |tau|^2 = q for primitive characters
        EXPECT_NEAR(std::abs(v.trail.tau_factor), j == 2 ? q * q : std::sqrt(q), 1e-9 * q * q);
        EXPECT_NEAR(std::abs(v.trail.eta), 1.0, 1e-7);
        EXPECT_EQ(v.trail.period, ctx.periods().at(j));
      }
    }
  }
}

TEST(Measure, TrailLValueIsBalanceInvariant) {
  const EllipticCurve E(k11a1);
  auto ctx = MeasureContext::for_curve(E, 3, 3);  // coefficients to spare at conductor 9
  const auto chi = ctx.characters(2)[0];
  const auto v = ctx.value(chi, 2);
  const SmoothedCutoffs cut(std::make_shared<const TestFunction>(), {-1.0, -1.0, -2.0}, cplx(1.0, 0.0));
  const double X = analytic_conductor(ctx.spec(), &chi);
  const auto r = l_value_afe(ctx.spec(), cut, &chi, 1.3 * balanced_y(cut, X));
  EXPECT_LT(std::abs(r.value - v.trail.l_value), 1e-8 * std::abs(r.value));
}

TEST(Measure, ConjugateCharacterGivesConjugateValue) {
  auto ctx = MeasureContext::for_curve(EllipticCurve(k11a1), 3, 3);
  for (const auto& chi : ctx.characters(3)) {
    for (int j : {1, 2}) {
      const auto a = ctx.value(chi, j, 1);
      const auto b = ctx.value(chi.conj(), j, -1);
      EXPECT_LT(std::abs(a.value - std::conj(b.value)), 1e-8 * std::abs(a.value)) << chi.wild_exponent() << " j=" << j;
    }
  }
}

TEST(Measure, MultiplicativePrime) {
  auto ctx = MeasureContext::for_curve(EllipticCurve(k15a1), 3, 2);
  EXPECT_EQ(ctx.kind(), ReductionKind::NonsplitMultiplicative);
  const DirichletCharacter triv(ctx.group(2), 0, 0);
  const auto t = ctx.value(triv, 2);
  EXPECT_TRUE(t.forced_zero);
  for (const auto& chi : ctx.characters(2)) {
    const auto v = ctx.value(chi, 2);
    EXPECT_EQ(v.trail.alpha_factor, cplx(1.0, 0.0));
    EXPECT_NEAR(std::abs(v.trail.eta), 1.0, 1e-7);
  }
}

TEST(Measure, ContextErrors) {
  const EllipticCurve E(k11a1);
  EXPECT_EQ(code_of([&] { (void)MeasureContext::for_curve(E, 19, 2); }), Errc::Supersingular);  // a_19 = 0
  EXPECT_EQ(code_of([&] { (void)MeasureContext::for_curve(E, 9, 2); }), Errc::InvalidInput);
  EXPECT_EQ(code_of([&] { (void)MeasureContext::for_twist(E, 3, 3, 2); }), Errc::InvalidInput);
  EXPECT_EQ(code_of([&] { (void)MeasureContext::for_curve(EllipticCurve(0, 0, 0, 0, 3), 3, 2); }), Errc::AdditiveAtP);
}

TEST(Measure, TwistRatioFollowsUnitRoots) {
  // E and E_D share Sym^2 data, so value_E / value_ED = (alpha_D / alpha)^(2m) times a period ratio
  const EllipticCurve E(k11a1);
  const cplx alpha = complex_unit_root(oracle::trace(k11a1, 3), 3);
  for (i64 D : {5, 13}) {
    auto A = MeasureContext::for_curve(E, 3, 3);
    auto B = MeasureContext::for_twist(E, D, 3, 3);
    const auto ED = quadratic_twist(E, D);
    EXPECT_EQ(B.a_p(), oracle::trace(ED.coefficients(), 3));
    EXPECT_EQ(A.spec().coeffs, B.spec().coeffs);
    const auto rep = interpolation_ratio_experiment(A, B, {2, 3});
    EXPECT_TRUE(rep.chi_independent);
    EXPECT_EQ(rep.skipped, 0u);
    ASSERT_EQ(rep.b_estimates.size(), 1u);
    const cplx alpha_D = complex_unit_root(B.a_p(), 3);
    const cplx expected = std::pow(alpha_D / alpha, 2);
    EXPECT_LT(std::abs(rep.b_estimates[0] - expected), 1e-9) << D;
    const cplx C = rep.per_conductor[0] / std::pow(expected, 2);
    EXPECT_LT(std::abs(C - B.periods().j2 / A.periods().j2), 1e-9 * std::abs(C));
    EXPECT_FALSE(rep.b_stable);  // one estimate cannot establish stability
  }
}
