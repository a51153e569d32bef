#pragma once

// Complex-side interpolation values of the measures mu_p(Omega+(Sym^2 E(j))), j = 1, 2,
// at wild characters, with every factor kept in a trail, and ratio experiments between
// two curves.

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symtwist/charsum.hpp"

namespace symtwist {

/// Omega+(Sym^2 E(1)) = Omega+ Omega- / (2 pi i) and Omega+(Sym^2 E(2)) = 2 pi i Omega+ Omega-,
/// from the Neron periods of a minimal model.
struct SymSqPeriods {
  cplx product;  // Omega+(E) Omega-(E)
  cplx j1;
  cplx j2;

  const cplx& at(int j) const { return j == 1 ? j1 : j2; }
};

inline SymSqPeriods symsq_periods(const EllipticCurve& E) {
  const auto per = neron_periods(minimal_model(E));
  const cplx two_pi_i(0.0, 2.0 * std::numbers::pi);
  SymSqPeriods out;
  out.product = per.omega_plus * per.omega_minus;
  out.j1 = out.product / two_pi_i;
  out.j2 = two_pi_i * out.product;
  return out;
}

/// Root of X^2 - a_p X + p with the sign of its imaginary part given by embedding.
inline cplx complex_unit_root(i64 a_p, u64 p, int embedding = 1) {
  const double disc = 4.0 * static_cast<double>(p) - static_cast<double>(a_p * a_p);
  const double im = std::sqrt(std::max(disc, 0.0)) / 2.0;
  return {static_cast<double>(a_p) / 2.0, embedding >= 0 ? im : -im};
}

struct MeasureTrail {
  cplx alpha;          // complex avatar of the unit root
  cplx alpha_factor;   // alpha^(-2 m), or 1 at multiplicative p
  cplx tau_factor;     // tau(conj chi) for j = 1, tau(conj chi)^2 p^m for j = 2
  double p_power = 1;  // p^m (j = 2) or 1
  cplx l_value;        // L(Sym^2 E, chi, j)
  cplx period;         // Omega+(Sym^2 E(j))
  cplx eta;            // root number of the unitary twist, used for j = 1
};

struct MeasureValue {
  std::string curve;
  u64 p = 3;
  unsigned m_chi = 0;
  u64 u = 0, v = 0;
  int j = 2;
  ReductionKind kind = ReductionKind::Good;
  cplx value;
  bool forced_zero = false;
  std::string zero_reason;
  MeasureTrail trail;
};

/// Recombines a trail in the same order as measure values are assembled.
inline cplx recombine(const MeasureTrail& t) { return t.alpha_factor * t.tau_factor * t.l_value / t.period; }

/// Measure values for one curve at one prime. L-data come from l_curve (semistable);
/// periods and the unit root from period_curve, which for a quadratic twist is E_D
/// while the Sym^2 L-data are those of E.
class MeasureContext {
 public:
  MeasureContext(const EllipticCurve& l_curve, const EllipticCurve& period_curve, u64 p, unsigned a_max,
                 std::string label = {}, std::shared_ptr<const TestFunction> tf = nullptr)
      : p_(p), a_max_(a_max), label_(label.empty() ? period_curve.label() : std::move(label)) {
    if (!is_prime(p) || p == 2) throw Error(Errc::InvalidInput, "p must be an odd prime");
    const auto pc = minimal_model(period_curve);
    const auto info = reduction_type(pc, p);
    kind_ = info.kind;
    if (kind_ == ReductionKind::Additive) throw Error(Errc::AdditiveAtP, "additive reduction at p");
    if (kind_ == ReductionKind::Good) {
      a_p_ = trace_of_frobenius(pc, p);
      if (reduce(a_p_, p) == 0) throw Error(Errc::Supersingular, "p divides a_p: supersingular at p");
    }
    periods_ = symsq_periods(pc);
    if (!tf) tf = std::make_shared<const TestFunction>();
    cut_ = std::make_shared<const SmoothedCutoffs>(tf, std::vector<double>{-1.0, -1.0, -2.0}, cplx(1.0, 0.0));
    const u64 C = symsq_conductor(l_curve);
    bad_ = C % p == 0;
    u64 f_away = C;
    while (f_away % p == 0) f_away /= p;
    f_away_ = f_away;
    const double spread = bad_ ? kBadSpread : 1.0;
    std::size_t M = coefficients_needed(f_away, 3, *cut_, p, a_max, spread);
    M = std::max<std::size_t>(M, afe_terms_needed(*cut_, static_cast<double>(C), 3.0 * balanced_y(*cut_, C)));
    spec_ = symsq_spec_for(l_curve, M, *cut_);
  }

  static MeasureContext for_curve(const EllipticCurve& E, u64 p, unsigned a_max,
                                  std::shared_ptr<const TestFunction> tf = nullptr) {
    return MeasureContext(E, E, p, a_max, E.label(), std::move(tf));
  }

  static MeasureContext for_twist(const EllipticCurve& E, i64 D, u64 p, unsigned a_max,
                                  std::shared_ptr<const TestFunction> tf = nullptr) {
    if (reduce(D, p) == 0) throw Error(Errc::InvalidInput, "twist discriminant must be prime to p");
    return MeasureContext(E, quadratic_twist(E, D), p, a_max, E.label() + "^D=" + std::to_string(D), std::move(tf));
  }

  u64 p() const { return p_; }
  unsigned a_max() const { return a_max_; }
  const std::string& label() const { return label_; }
  ReductionKind kind() const { return kind_; }
  i64 a_p() const { return a_p_; }
  const SymSqPeriods& periods() const { return periods_; }
  const LSpec& spec() const { return spec_; }

  /// L(Sym^2 E, chi, 2) = L(pi (x) chi, 1) with the root number of the unitary twist.
  std::pair<cplx, cplx> l_value_at_2(const DirichletCharacter* chi) {
    const unsigned m = chi == nullptr ? 0 : chi->conductor_exponent();
    const auto tbl = character_table(chi);
    if (!bad_ || m == 0) {
      const auto& sums = good_sums(chi);
      const cplx eta = twisted_root_number(spec_, m == 0 ? nullptr : chi);
      return {combine_afe(sums, tbl, eta).value, eta};
    }
    const auto& pair = bad_sums(*chi);
    const auto r1 = combine_afe(pair.first, tbl, {0.0, 0.0});
    const auto r2 = combine_afe(pair.second, tbl, {0.0, 0.0});
    const cplx eta = solve_root_number(r1, r2, cut_->beta());
    return {combine_afe(pair.first, tbl, eta).value, eta};
  }

  MeasureValue value(const DirichletCharacter& chi, int j, int embedding = 1) {
    if (j != 1 && j != 2) throw Error(Errc::ParameterOutOfRange, "j must be 1 or 2");
    MeasureValue out;
    out.curve = label_;
    out.p = p_;
    out.j = j;
    out.kind = kind_;
    out.u = chi.wild_exponent();
    out.v = chi.tame_exponent();
    out.m_chi = chi.conductor_exponent();
    if (chi.group().modulus().p != p_) throw Error(Errc::InvalidInput, "character modulus is not a power of p");
    if (!chi.is_even()) {
      out.forced_zero = true;
      out.zero_reason = j == 2 ? "odd character" : "L(Sym^2 E, chi, 1) = 0 for odd chi";
      return out;
    }
    if (!chi.is_wild()) throw Error(Errc::NonWildCharacter, "even character with a nontrivial tame part");
    if (!chi.is_trivial() && !chi.is_primitive()) {
      throw Error(Errc::NotPrimitive, "pass the primitive character of conductor p^m");
    }
    if (out.m_chi > a_max_) throw Error(Errc::ParameterOutOfRange, "conductor exceeds the prepared range");
    if (bad_ && chi.is_trivial()) {
      out.forced_zero = true;
      out.zero_reason = "trivial character at multiplicative p";
      return out;
    }
    const DirichletCharacter* cp = chi.is_trivial() ? nullptr : &chi;
    MeasureTrail& t = out.trail;
    t.alpha = kind_ == ReductionKind::Good ? complex_unit_root(a_p_, p_, embedding) : cplx{0.0, 0.0};
    t.alpha_factor = kind_ == ReductionKind::Good ? std::pow(t.alpha, -2 * static_cast<int>(out.m_chi)) : cplx{1.0, 0.0};
    const cplx tau_bar = cp == nullptr ? cplx{1.0, 0.0} : gauss_sum(chi.conj());
    const double q = static_cast<double>(ipow(p_, out.m_chi));
    if (j == 2) {
      const auto [L, eta] = l_value_at_2(cp);
      t.l_value = L;
      t.eta = eta;
      t.p_power = q;
      t.tau_factor = tau_bar * tau_bar * q;
    } else {
      // L(chi, 1) = eta X^(1/2) / (2 pi^2) L(conj chi, 2) from the functional equation.
      std::optional<DirichletCharacter> cb;
      if (cp != nullptr) cb = chi.conj();
      const auto eta = l_value_at_2(cp).second;
      const auto Lbar = l_value_at_2(cb ? &*cb : nullptr).first;
      const double X = static_cast<double>(bad_ ? f_away_ : spec_.conductor) * q * q * q;
      t.eta = eta;
      t.l_value = eta * std::sqrt(X) / (2.0 * std::numbers::pi * std::numbers::pi) * Lbar;
      t.tau_factor = tau_bar;
    }
    t.period = periods_.at(j);
    out.value = recombine(t);
    return out;
  }

  /// Primitive wild characters of conductor p^m in the order of their wild exponent.
  std::vector<DirichletCharacter> characters(unsigned m) {
    return enumerate_wild_primitive(group(m));
  }

  std::shared_ptr<const CharacterGroup> group(unsigned m) {
    auto it = groups_.find(m);
    if (it == groups_.end()) it = groups_.emplace(m, make_group(PrimePower(p_, m))).first;
    return it->second;
  }

 private:
  static constexpr double kBadSpread = 1.7;

  const TwistedSums& good_sums(const DirichletCharacter* chi) {
    const unsigned m = chi == nullptr ? 0 : chi->conductor_exponent();
    auto it = good_.find(m);
    if (it == good_.end()) {
      const u64 q = chi == nullptr ? 1 : chi->group().modulus().q;
      const double X = analytic_conductor(spec_, m == 0 ? nullptr : chi);
      it = good_.emplace(m, twisted_sums(spec_, *cut_, q, X, balanced_y(*cut_, X))).first;
    }
    return it->second;
  }

  const std::pair<TwistedSums, TwistedSums>& bad_sums(const DirichletCharacter& chi) {
    const unsigned m = chi.conductor_exponent();
    auto it = bad_pairs_.find(m);
    if (it == bad_pairs_.end()) {
      const u64 q = chi.group().modulus().q;
      const double X = static_cast<double>(f_away_) * std::pow(static_cast<double>(chi.conductor()), 3);
      const double y = balanced_y(*cut_, X);
      auto a = twisted_sums(spec_, *cut_, q, X, y);
      auto b = twisted_sums(spec_, *cut_, q, X, kBadSpread * y);
      it = bad_pairs_.emplace(m, std::make_pair(std::move(a), std::move(b))).first;
    }
    return it->second;
  }

  u64 p_;
  unsigned a_max_;
  std::string label_;
  ReductionKind kind_ = ReductionKind::Good;
  i64 a_p_ = 0;
  bool bad_ = false;
  u64 f_away_ = 1;
  SymSqPeriods periods_;
  std::shared_ptr<const SmoothedCutoffs> cut_;
  LSpec spec_;
  std::map<unsigned, TwistedSums> good_;
  std::map<unsigned, std::pair<TwistedSums, TwistedSums>> bad_pairs_;
  std::map<unsigned, std::shared_ptr<const CharacterGroup>> groups_;
};

struct RatioRow {
  unsigned a = 2;
  u64 u = 0;
  cplx ratio;
  bool skipped = false;  // denominator below 1e-12
};

struct RatioReport {
  std::vector<RatioRow> rows;
  std::vector<unsigned> conductors;
  std::vector<cplx> per_conductor;       // mean ratio at each conductor
  std::vector<double> chi_spread;        // max relative deviation from that mean
  std::vector<cplx> b_estimates;         // successive quotients of per-conductor ratios
  double b_spread = 0.0;                 // max relative deviation among the B estimates
  bool chi_independent = false;          // every spread <= 1e-6
  bool b_stable = false;                 // b_spread <= 1e-4
  std::size_t skipped = 0;

  bool fit_ok() const { return chi_independent && b_stable; }
};

/// value_A(chi, j) / value_B(chi, j) over primitive wild chi of conductor p^a, a in a_values,
/// with the B^m C shape test.
inline RatioReport interpolation_ratio_experiment(MeasureContext& A, MeasureContext& B,
                                                  const std::vector<unsigned>& a_values, int j = 2,
                                                  double chi_tol = 1e-6, double b_tol = 1e-4) {
  if (A.p() != B.p()) throw Error(Errc::InvalidInput, "both contexts must use the same prime");
  RatioReport rep;
  for (unsigned a : a_values) {
    if (a < 2) throw Error(Errc::EmptyCharacterSet, "no primitive wild characters of conductor p");
    std::vector<cplx> ratios;
    for (const auto& chi : A.characters(a)) {
      const auto va = A.value(chi, j);
      const DirichletCharacter chib(B.group(a), chi.wild_exponent(), chi.tame_exponent());
      const auto vb = B.value(chib, j);
      RatioRow row{a, chi.wild_exponent(), {0.0, 0.0}, false};
      if (std::abs(vb.value) < 1e-12) {
        row.skipped = true;
        ++rep.skipped;
      } else {
        row.ratio = va.value / vb.value;
        ratios.push_back(row.ratio);
      }
      rep.rows.push_back(row);
    }
    if (ratios.empty()) continue;
    cplx mean{0.0, 0.0};
    for (const auto& r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    double spread = 0.0;
    for (const auto& r : ratios) spread = std::max(spread, std::abs(r - mean) / std::abs(mean));
    rep.conductors.push_back(a);
    rep.per_conductor.push_back(mean);
    rep.chi_spread.push_back(spread);
  }
  rep.chi_independent = !rep.chi_spread.empty();
  for (double s : rep.chi_spread) rep.chi_independent = rep.chi_independent && s <= chi_tol;
  for (std::size_t i = 1; i < rep.per_conductor.size(); ++i) {
    const double steps = static_cast<double>(rep.conductors[i] - rep.conductors[i - 1]);
    rep.b_estimates.push_back(std::pow(rep.per_conductor[i] / rep.per_conductor[i - 1], 1.0 / steps));
  }
  for (std::size_t i = 1; i < rep.b_estimates.size(); ++i) {
    rep.b_spread = std::max(rep.b_spread, std::abs(rep.b_estimates[i] - rep.b_estimates[0]) / std::abs(rep.b_estimates[0]));
  }
  rep.b_stable = rep.b_estimates.size() >= 2 && rep.b_spread <= b_tol;
  return rep;
}

}  // namespace symtwist
