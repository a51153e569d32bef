#pragma once

// Dirichlet characters modulo p^a stored by exponent pair (u, v):
//   chi(g) = e(u / p^(a-1) + v / (p-1))
// for a fixed primitive root g. Wild characters are those with v = 0.

#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <vector>

#include "symtwist/arith.hpp"

namespace symtwist {

using cplx = std::complex<double>;

/// e(j/n) with the angle reduced to the shortest representative, so that
/// unit_root(n - j, n) == conj(unit_root(j, n)) bit for bit.
inline cplx unit_root(u64 j, u64 n) {
  j %= n;
  if (j == 0) return {1.0, 0.0};
  if (2 * j > n) return std::conj(unit_root(n - j, n));
  if (2 * j == n) return {-1.0, 0.0};
  if (4 * j == n) return {0.0, 1.0};
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

class CharacterGroup {
 public:
  static constexpr u64 kTableLimit = u64{1} << 22;

  explicit CharacterGroup(PrimePower pp) : pp_(pp), g_(primitive_root(pp)) {
    const u64 n = pp_.group_order();
    roots_.resize(n);
    for (u64 j = 0; j < n; ++j) roots_[j] = unit_root(j, n);
    additive_.resize(pp_.q);
    for (u64 m = 0; m < pp_.q; ++m) additive_[m] = unit_root(m, pp_.q);
    if (pp_.q <= kTableLimit) {
      dlog_.assign(pp_.q, kNoLog);
      u64 cur = 1;
      for (u64 k = 0; k < n; ++k) {
        dlog_[cur] = k;
        cur = mul_mod(cur, g_, pp_.q);
      }
    }
  }

  const PrimePower& modulus() const { return pp_; }
  u64 generator() const { return g_; }
  u64 order() const { return pp_.group_order(); }
  u64 wild_order() const { return pp_.wild_order(); }
  u64 tame_order() const { return pp_.p - 1; }

  /// Discrete log base g; throws NotAUnit when p | m.
  u64 dlog(i64 m) const {
    const u64 r = reduce(m, pp_.q);
    if (r % pp_.p == 0) throw Error(Errc::NotAUnit, "character argument divisible by p");
    if (!dlog_.empty()) return dlog_[r];
    return discrete_log(static_cast<i64>(r), g_, pp_);
  }

  /// e(j / phi(q))
  const cplx& root(u64 j) const { return roots_[j % roots_.size()]; }
  /// e(m / q)
  const cplx& additive(i64 m) const { return additive_[reduce(m, pp_.q)]; }

 private:
  static constexpr u64 kNoLog = ~u64{0};
  PrimePower pp_;
  u64 g_;
  std::vector<cplx> roots_;
  std::vector<cplx> additive_;
  std::vector<u64> dlog_;
};

class DirichletCharacter {
 public:
  DirichletCharacter(std::shared_ptr<const CharacterGroup> group, u64 u, u64 v)
      : group_(std::move(group)) {
    const auto& pp = group_->modulus();
    u_ = u % group_->wild_order();
    v_ = v % group_->tame_order();
    // chi(g^k) = e(k * mult / phi(q))
    mult_ = (u_ * (pp.p - 1) + v_ * group_->wild_order()) % group_->order();
    if (u_ == 0) {
      conductor_exp_ = v_ == 0 ? 0 : 1;
    } else {
      conductor_exp_ = pp.a - static_cast<unsigned>(valuation(static_cast<i128>(u_), pp.p));
    }
    const u64 wild_part = group_->wild_order() / std::gcd(u_, group_->wild_order());
    const u64 tame_part = group_->tame_order() / std::gcd(v_, group_->tame_order());
    order_ = std::lcm(wild_part, tame_part);
  }

  const CharacterGroup& group() const { return *group_; }
  const std::shared_ptr<const CharacterGroup>& group_ptr() const { return group_; }
  u64 wild_exponent() const { return u_; }
  u64 tame_exponent() const { return v_; }
  u64 order() const { return order_; }
  /// Conductor is p^conductor_exponent().
  unsigned conductor_exponent() const { return conductor_exp_; }
  u64 conductor() const { return ipow(group_->modulus().p, conductor_exp_); }
  bool is_primitive() const { return conductor_exp_ == group_->modulus().a; }
  bool is_wild() const { return v_ == 0; }
  bool is_trivial() const { return u_ == 0 && v_ == 0; }
  /// chi(-1) = (-1)^v
  int parity() const { return v_ % 2 == 0 ? 1 : -1; }
  bool is_even() const { return parity() == 1; }

  cplx operator()(i64 m) const {
    const u64 r = reduce(m, group_->modulus().q);
    if (r % group_->modulus().p == 0) return {0.0, 0.0};
    return group_->root(mul_mod(group_->dlog(static_cast<i64>(r)), mult_, group_->order()));
  }

  /// Index j with chi(g^k) = e(k j / phi(q)); used by callers that tabulate values.
  u64 multiplier() const { return mult_; }

  DirichletCharacter conj() const {
    return {group_, group_->wild_order() - u_, group_->tame_order() - v_};
  }

  bool operator==(const DirichletCharacter& o) const {
    return group_->modulus() == o.group_->modulus() && u_ == o.u_ && v_ == o.v_;
  }

 private:
  std::shared_ptr<const CharacterGroup> group_;
  u64 u_ = 0;
  u64 v_ = 0;
  u64 mult_ = 0;
  u64 order_ = 1;
  unsigned conductor_exp_ = 0;
};

inline std::shared_ptr<const CharacterGroup> make_group(const PrimePower& pp) {
  return std::make_shared<const CharacterGroup>(pp);
}

/// Wild characters of conductor exactly p^a, ordered by wild exponent u.
inline std::vector<DirichletCharacter> enumerate_wild_primitive(
    const std::shared_ptr<const CharacterGroup>& group) {
  std::vector<DirichletCharacter> out;
  const auto& pp = group->modulus();
  if (pp.a < 2) return out;
  for (u64 u = 1; u < group->wild_order(); ++u) {
    if (u % pp.p != 0) out.emplace_back(group, u, 0);
  }
  return out;
}

inline std::vector<DirichletCharacter> enumerate_wild_primitive(const PrimePower& pp) {
  return enumerate_wild_primitive(make_group(pp));
}

/// tau(chi) = sum_{m mod q} chi(m) e(m/q) for primitive chi.
inline cplx gauss_sum(const DirichletCharacter& chi) {
  if (!chi.is_primitive()) {
    throw Error(Errc::NotPrimitive, "Gauss sum requested for an imprimitive character");
  }
  const auto& group = chi.group();
  const auto& pp = group.modulus();
  cplx sum{0.0, 0.0};
  for (u64 m = 1; m < pp.q; ++m) {
    if (m % pp.p == 0) continue;
    sum += chi(static_cast<i64>(m)) * group.additive(static_cast<i64>(m));
  }
  return sum;
}

/// S_a: residues mod p^a of exponent dividing p-1 (Teichmueller lifts), ascending.
inline std::vector<u64> exponent_set(const PrimePower& pp) {
  std::vector<u64> out;
  out.reserve(pp.p - 1);
  for (u64 x = 1; x < pp.p; ++x) out.push_back(teichmuller(static_cast<i64>(x), pp.p, pp.a).value);
  std::sort(out.begin(), out.end());
  return out;
}

inline bool in_exponent_set(i64 m, u64 p, unsigned a) {
  if (a == 0) return true;
  const u64 q = ipow(p, a);
  const u64 r = reduce(m, q);
  if (r % p == 0) return false;
  return pow_mod(r, p - 1, q) == 1;
}

/// Sum of chi(m) over the primitive wild characters mod p^a, by direct summation.
inline cplx wild_char_sum(const std::shared_ptr<const CharacterGroup>& group, i64 m) {
  const auto& pp = group->modulus();
  if (reduce(m, pp.p) == 0) throw Error(Errc::NotAUnit, "orthogonality sum needs a unit");
  cplx sum{0.0, 0.0};
  for (const auto& chi : enumerate_wild_primitive(group)) sum += chi(m);
  return sum;
}

inline cplx wild_char_sum(const PrimePower& pp, i64 m) { return wild_char_sum(make_group(pp), m); }

/// p^(a-1) delta_{S_a}(m) - p^(a-2) delta_{S_(a-1)}(m mod p^(a-1)) for a >= 2.
inline double orthogonality_rhs(const PrimePower& pp, i64 m) {
  if (pp.a < 2) return 0.0;
  const double top = static_cast<double>(ipow(pp.p, pp.a - 1));
  const double low = static_cast<double>(ipow(pp.p, pp.a - 2));
  return top * (in_exponent_set(m, pp.p, pp.a) ? 1.0 : 0.0) -
         low * (in_exponent_set(m, pp.p, pp.a - 1) ? 1.0 : 0.0);
}

}  // namespace symtwist
