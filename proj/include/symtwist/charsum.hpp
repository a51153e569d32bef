#pragma once

// Averages of twisted L-values over the primitive wild characters of conductor p^a,
// their limit as a grows, convergence tables and the nonvanishing scan.

#include <chrono>
#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symtwist/lfunc.hpp"

namespace symtwist {

struct AverageResult {
  u64 p = 3;
  unsigned a = 2;
  i64 s = 1, r = 1;
  double beta = 1.0;
  cplx value;
  cplx limit;
  double abs_error = 0.0;
  std::size_t num_chars = 0;
  double seconds = 0.0;
  std::vector<cplx> l_values;  // per character, in enumeration order
};

inline void check_beta_range(double beta) {
  if (!(beta >= 0.5 && beta <= 1.0)) throw Error(Errc::ParameterOutOfRange, "beta must lie in [1/2, 1]");
}

inline void check_average_args(u64 p, unsigned a, i64 s, i64 r) {
  if (!is_prime(p) || p == 2) throw Error(Errc::InvalidInput, "p must be an odd prime");
  if (s <= 0 || r <= 0) throw Error(Errc::InvalidInput, "s and r must be positive");
  if (reduce(s, p) == 0 || reduce(r, p) == 0) throw Error(Errc::NotAUnit, "s and r must be prime to p");
  if (a < 2) throw Error(Errc::EmptyCharacterSet, "no primitive wild characters of conductor p^a for a < 2");
}

/// p^-a sum over primitive wild chi of conj(chi(s)) chi(r) L(chi); the weight is one
/// lookup chi(r s^-1 mod p^a).
template <class LValue>
cplx character_average(const std::shared_ptr<const CharacterGroup>& group, i64 s, i64 r, LValue&& lvalue,
                       std::vector<cplx>* keep = nullptr) {
  const auto& pp = group->modulus();
  const i64 m = static_cast<i64>(mul_mod(reduce(r, pp.q), inv_mod(s, pp.q), pp.q));
  cplx sum{0.0, 0.0};
  for (const auto& chi : enumerate_wild_primitive(group)) {
    const cplx L = lvalue(chi);
    if (keep != nullptr) keep->push_back(L);
    sum += chi(m) * L;
  }
  return sum / static_cast<double>(pp.q);
}

/// (1/p)(1 - 1/p) a_pi(s/r) (s/r)^-beta when r | s, else 0.
inline cplx limit_value(const LSpec& spec, u64 p, i64 s, i64 r, double beta) {
  if (s <= 0 || r <= 0) throw Error(Errc::InvalidInput, "s and r must be positive");
  if (s % r != 0) return {0.0, 0.0};
  const auto n = static_cast<std::size_t>(s / r);
  if (n > spec.max_m()) throw Error(Errc::ParameterOutOfRange, "coefficient a_pi(s/r) not available");
  const double P = static_cast<double>(p);
  return (1.0 / P) * (1.0 - 1.0 / P) * spec.coeffs[n] * std::pow(static_cast<double>(n), -beta);
}

/// Coefficients needed to evaluate every twist of conductor p^a, a <= a_max, at the
/// balanced y (times y_spread in either direction).
inline std::size_t coefficients_needed(u64 conductor, unsigned degree, const SmoothedCutoffs& cut, u64 p,
                                       unsigned a_max, double y_spread = 1.0) {
  const double X = static_cast<double>(conductor) * std::pow(static_cast<double>(ipow(p, a_max)), degree);
  const double y = balanced_y(cut, X);
  return std::max(afe_terms_needed(cut, X, y * y_spread), afe_terms_needed(cut, X, y / y_spread));
}

inline AverageResult twisted_average(const LSpec& spec, const SmoothedCutoffs& cut, u64 p, unsigned a, i64 s,
                                     i64 r, bool keep_values = false) {
  check_average_args(p, a, s, r);
  const double beta = cut.beta().real();
  check_beta_range(beta);
  if (spec.conductor % p == 0) throw Error(Errc::ConductorNotCoprime, "p divides the conductor of the spec");
  const auto t0 = std::chrono::steady_clock::now();
  const PrimePower pp(p, a);
  const auto group = make_group(pp);
  const double X = static_cast<double>(spec.conductor) * std::pow(static_cast<double>(pp.q), spec.degree);
  const auto sums = twisted_sums(spec, cut, pp.q, X, balanced_y(cut, X));
  AverageResult res;
  res.p = p;
  res.a = a;
  res.s = s;
  res.r = r;
  res.beta = beta;
  std::vector<cplx> values;
  res.value = character_average(
      group, s, r,
      [&](const DirichletCharacter& chi) {
        return combine_afe(sums, character_table(&chi), twisted_root_number(spec, &chi)).value;
      },
      &values);
  res.num_chars = values.size();
  if (keep_values) res.l_values = std::move(values);
  res.limit = limit_value(spec, p, s, r, beta);
  res.abs_error = std::abs(res.value - res.limit);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

struct ConvergenceTable {
  std::vector<AverageResult> rows;
  bool final_below_initial = false;
  bool strictly_decreasing = false;
};

inline ConvergenceTable convergence_table(const LSpec& spec, const SmoothedCutoffs& cut, u64 p,
                                          const std::vector<unsigned>& a_values, i64 s, i64 r) {
  if (a_values.empty()) throw Error(Errc::InvalidInput, "empty range of a");
  ConvergenceTable t;
  for (unsigned a : a_values) t.rows.push_back(twisted_average(spec, cut, p, a, s, r));
  t.final_below_initial = t.rows.back().abs_error < t.rows.front().abs_error;
  t.strictly_decreasing = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    if (!(t.rows[i].abs_error < t.rows[i - 1].abs_error)) t.strictly_decreasing = false;
  }
  return t;
}

struct ScanRow {
  unsigned a = 2;
  std::size_t total = 0;
  std::size_t nonvanishing = 0;
  std::size_t vanishing = 0;
  double min_abs = 0.0;
};

/// Counts values with |L| above and at or below the threshold.
inline ScanRow scan_values(unsigned a, const std::vector<cplx>& values, double threshold = 1e-8) {
  ScanRow row;
  row.a = a;
  row.total = values.size();
  row.min_abs = values.empty() ? 0.0 : std::abs(values.front());
  for (const auto& v : values) {
    const double m = std::abs(v);
    row.min_abs = std::min(row.min_abs, m);
    if (m > threshold) {
      ++row.nonvanishing;
    } else {
      ++row.vanishing;
    }
  }
  return row;
}

/// beta admissible for the nonvanishing statement in degree n: outside [1/n, 1 - 1/n],
/// or beta > 1/2 for tempered data.
inline bool nonvanishing_beta_admissible(double beta, unsigned degree, bool tempered) {
  if (tempered) return beta > 0.5;
  const double n = static_cast<double>(degree);
  return beta > 1.0 - 1.0 / n || beta < 1.0 / n;
}

inline std::vector<ScanRow> nonvanishing_scan(const LSpec& spec, const SmoothedCutoffs& cut, u64 p,
                                              const std::vector<unsigned>& a_values, bool tempered = false,
                                              double threshold = 1e-8) {
  const double beta = cut.beta().real();
  check_beta_range(beta);
  if (!nonvanishing_beta_admissible(beta, spec.degree, tempered)) {
    throw Error(Errc::ParameterOutOfRange, "beta outside the admissible range for the scan");
  }
  std::vector<ScanRow> rows;
  for (unsigned a : a_values) {
    const auto avg = twisted_average(spec, cut, p, a, 1, 1, true);
    rows.push_back(scan_values(a, avg.l_values, threshold));
  }
  return rows;
}

/// Sym^2 data for E with enough coefficients for conductors up to p^a_max and its root
/// number solved for numerically, plus the cutoffs at beta.
struct SymSqSetup {
  LSpec spec;
  std::shared_ptr<const SmoothedCutoffs> cut;
};

inline SymSqSetup prepare_symsq(const EllipticCurve& E, u64 p, unsigned a_max, double beta,
                                std::shared_ptr<const TestFunction> tf = nullptr, double y_spread = 1.0,
                                CutoffOptions opt = {}) {
  check_beta_range(beta);
  if (!tf) tf = std::make_shared<const TestFunction>();
  auto cut = std::make_shared<const SmoothedCutoffs>(tf, std::vector<double>{-1.0, -1.0, -2.0}, cplx(beta, 0.0), opt);
  const u64 C = symsq_conductor(E);
  std::size_t M = coefficients_needed(C, 3, *cut, p, a_max, y_spread);
  M = std::max<std::size_t>(M, afe_terms_needed(*cut, static_cast<double>(C), 3.0 * balanced_y(*cut, C)));
  return {symsq_spec_for(E, M, *cut), cut};
}

}  // namespace symtwist
