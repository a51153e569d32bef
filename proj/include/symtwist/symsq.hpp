#pragma once

// Symmetric-square L-function of a semistable elliptic curve: Euler factors,
// Dirichlet coefficients, conductor, unitarized degree-3 data and Satake invariants.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "symtwist/elliptic.hpp"

namespace symtwist {

/// Analytic data of an L-function normalized so that the functional equation
/// relates s and 1 - s: L(pi_inf, s) = prod_j Gamma_R(s - mu_j).
struct LSpec {
  std::string name;
  unsigned degree = 3;
  std::vector<double> coeffs;  // coeffs[m] = a_pi(m), index 0 unused
  std::vector<double> mu;
  u64 conductor = 1;
  std::optional<std::complex<double>> root_number;
  double polar_residue = 0.0;  // residue at s = 1 (nonzero only for the zeta rig)

  std::size_t max_m() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  double eta() const {
    double e = mu.empty() ? 0.0 : mu[0];
    for (double m : mu) e = std::max(e, m);
    return e;
  }
};

using GL3LSpec = LSpec;

/// Riemann zeta as a degree-1 spec (test rig for the evaluator).
inline LSpec zeta_spec(std::size_t M) {
  LSpec s;
  s.name = "zeta";
  s.degree = 1;
  s.coeffs.assign(M + 1, 1.0);
  s.coeffs[0] = 0.0;
  s.mu = {0.0};
  s.conductor = 1;
  s.root_number = std::complex<double>(1.0, 0.0);
  s.polar_residue = 1.0;
  return s;
}

struct SymSqLocal {
  u64 r = 2;
  std::vector<i64> coeffs;  // P_r(X) = sum coeffs[i] X^i
};

inline SymSqLocal symsq_local_factor(i64 a_r, u64 r, ReductionKind kind) {
  if (kind == ReductionKind::Additive) {
    throw Error(Errc::AdditiveReduction, "additive reduction at " + std::to_string(r));
  }
  if (kind != ReductionKind::Good) return {r, {1, -1}};
  const i64 R = static_cast<i64>(r);
  const i64 t = a_r * a_r - R;
  return {r, {1, -t, R * t, -R * R * R}};
}

/// P_r(X) = (1 - alpha^2 X)(1 - beta^2 X)(1 - rX) at good r, 1 - X at multiplicative r.
inline SymSqLocal symsq_local_factor(const EllipticCurve& E, u64 r) {
  const auto info = reduction_info(E, r);
  return symsq_local_factor(info.a_r, r, info.kind);
}

namespace detail {

// Dirichlet coefficients of prod_r P_r(r^-s)^-1 given a_r and the multiplicative set.
inline std::vector<i64> symsq_from_traces(const std::vector<i64>& ap, const std::vector<std::uint32_t>& spf,
                                          const std::vector<char>& multiplicative, std::size_t M) {
  std::vector<i64> b(M + 1, 0);
  if (M >= 1) b[1] = 1;
  for (std::size_t m = 2; m <= M; ++m) {
    const std::size_t r = spf[m];
    std::size_t pk = 1, rest = m;
    while (rest % r == 0) {
      rest /= r;
      pk *= r;
    }
    if (rest != 1) {
      b[m] = b[pk] * b[rest];
      continue;
    }
    if (multiplicative[r]) {
      b[m] = 1;
      continue;
    }
    const i64 R = static_cast<i64>(r);
    const i64 t = ap[r] * ap[r] - R;
    const std::size_t k1 = pk / r;
    const i64 bk1 = b[k1];
    const i64 bk2 = k1 >= r ? b[k1 / r] : 0;
    const i64 bk3 = k1 >= r * r ? b[k1 / r / r] : 0;
    b[m] = t * bk1 - R * t * bk2 + R * R * R * bk3;
  }
  return b;
}

inline void require_semistable(const EllipticCurve& E) {
  const auto rep = conductor_report(E);
  if (!rep.additive_primes.empty()) {
    throw Error(Errc::AdditiveReduction,
                "additive reduction at " + std::to_string(rep.additive_primes.front()));
  }
}

}  // namespace detail

/// b(1..M) with L(Sym^2 E, s) = sum b(m) m^-s (index 0 unused).
inline std::vector<i64> symsq_coefficients(const EllipticCurve& E, std::size_t M) {
  detail::require_semistable(E);
  const auto spf = smallest_prime_factors(M);
  const auto ap = prime_traces(E, M, spf);
  std::vector<char> mult(M + 1, 0);
  for (u64 r : E.bad_primes()) {
    if (r <= M) mult[r] = 1;
  }
  return detail::symsq_from_traces(ap, spf, mult, M);
}

/// Coefficients used for a quadratic twist E_D. Away from 2D the traces of E and E_D
/// differ by the sign (D / r), to which Sym^2 is blind; at the primes of D, where E_D
/// acquires additive reduction, the local factor of E is kept.
inline std::vector<i64> symsq_twist_coefficients(const EllipticCurve& E, i64 D, std::size_t M) {
  (void)quadratic_twist(E, D);  // validates D
  return symsq_coefficients(E, M);
}

/// C = N^2 for semistable E.
inline u64 symsq_conductor(const EllipticCurve& E) {
  const u64 N = semistable_conductor(E);
  return N * N;
}

/// a_pi(m) = b(m)/m, mu = (-1, -1, -2), conductor C; the root number is left unset.
inline LSpec unitarize_gl3(const EllipticCurve& E, std::size_t M) {
  LSpec s;
  s.name = "Sym2" + E.label();
  s.degree = 3;
  const auto b = symsq_coefficients(E, M);
  s.coeffs.assign(M + 1, 0.0);
  for (std::size_t m = 1; m <= M; ++m) s.coeffs[m] = static_cast<double>(b[m]) / static_cast<double>(m);
  s.mu = {-1.0, -1.0, -2.0};
  s.conductor = symsq_conductor(E);
  return s;
}

inline LSpec unitarize_gl3_twist(const EllipticCurve& E, i64 D, std::size_t M) {
  LSpec s = unitarize_gl3(E, 1);
  s.name = "Sym2" + E.label() + "^D=" + std::to_string(D);
  const auto b = symsq_twist_coefficients(E, D, M);
  s.coeffs.assign(M + 1, 0.0);
  for (std::size_t m = 1; m <= M; ++m) s.coeffs[m] = static_cast<double>(b[m]) / static_cast<double>(m);
  return s;
}

struct SatakeTriple {
  u64 l = 2;
  std::array<std::complex<double>, 3> params;
  std::complex<double> e1, e2, e3;
};

/// Unitarized parameters {alpha^2/l, 1, beta^2/l} at a good prime and their
/// elementary symmetric functions.
inline SatakeTriple satake_invariants(const EllipticCurve& E, u64 l) {
  const i64 a = trace_of_frobenius(E, l);
  const double L = static_cast<double>(l);
  const double disc = 4.0 * L - static_cast<double>(a * a);
  const std::complex<double> alpha(a / 2.0, std::sqrt(std::max(disc, 0.0)) / 2.0);
  const std::complex<double> beta(a / 2.0, -std::sqrt(std::max(disc, 0.0)) / 2.0);
  SatakeTriple t;
  t.l = l;
  t.params = {alpha * alpha / L, std::complex<double>(1.0, 0.0), beta * beta / L};
  const auto& p = t.params;
  t.e1 = p[0] + p[1] + p[2];
  t.e2 = p[0] * p[1] + p[0] * p[2] + p[1] * p[2];
  t.e3 = p[0] * p[1] * p[2];
  return t;
}

/// sum_{m <= M} |a_pi(m)|^2 / M^1.1
inline double coefficient_mass_ratio(const LSpec& spec, std::size_t M) {
  if (M > spec.max_m()) throw Error(Errc::ParameterOutOfRange, "not enough coefficients");
  double s = 0.0;
  for (std::size_t m = 1; m <= M; ++m) s += spec.coeffs[m] * spec.coeffs[m];
  return s / std::pow(static_cast<double>(M), 1.1);
}

}  // namespace symtwist
