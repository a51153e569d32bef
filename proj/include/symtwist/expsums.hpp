#pragma once

// Hyper-Kloosterman sums over (Z/p^a)^x, their case-wise upper bounds, and the
// two routes to the Gauss-sum power average over primitive wild characters.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "symtwist/characters.hpp"

namespace symtwist {

struct KloostermanBound {
  bool applies = false;
  double bound = 0.0;
  std::string label = "no case";
};

struct KloostermanResult {
  unsigned n = 1;
  i64 z = 1;
  PrimePower pp;
  cplx value;
  KloostermanBound bound;

  double ratio() const { return bound.applies ? std::abs(value) / bound.bound : 0.0; }
};

/// Bound for the n-variable sum mod q = p^a; the n = p-1 column splits on a.
inline KloostermanBound kloosterman_bound(unsigned n, const PrimePower& pp) {
  const double q = static_cast<double>(pp.q);
  const double p = static_cast<double>(pp.p);
  const double base = std::pow(q, n / 2.0);
  if (pp.a < 2 || n < 2) return {};
  if (n < pp.p - 1) return {true, (n + 1) * base, "1<n<p-1, a>1"};
  if (n == pp.p - 1) {
    if (pp.a >= 5) return {true, std::sqrt(p) * base, "n=p-1, a>=5"};
    if (pp.a == 4) return {true, p * base, "n=p-1, a=4"};
    if (pp.a == 3) return {true, std::sqrt(p) * base, "n=p-1, a=3"};
    return {true, base, "n=p-1, a=2"};
  }
  return {};
}

/// Loop budget for direct enumeration: q^n must stay below 2^31.
inline bool kloosterman_within_budget(unsigned n, const PrimePower& pp) {
  return n * pp.a * std::log2(static_cast<double>(pp.p)) <= 31.0;
}

namespace detail {

inline void check_kloosterman_args(unsigned n, const PrimePower& pp) {
  if (n < 1) throw Error(Errc::ParameterOutOfRange, "need at least one variable");
  if (!kloosterman_within_budget(n, pp)) {
    throw Error(Errc::ParameterOutOfRange, "q^n exceeds the direct enumeration budget");
  }
}

inline std::vector<u64> units_mod(const PrimePower& pp) {
  std::vector<u64> units;
  units.reserve(pp.group_order());
  for (u64 x = 1; x < pp.q; ++x) {
    if (x % pp.p != 0) units.push_back(x);
  }
  return units;
}

inline std::vector<u64> inverse_table(const PrimePower& pp) {
  std::vector<u64> inv(pp.q, 0);
  for (u64 x = 1; x < pp.q; ++x) {
    if (x % pp.p != 0) inv[x] = inv_mod(static_cast<i64>(x), pp.q);
  }
  return inv;
}

// Walks all (n-1)-tuples of units and calls body(sum, product) for each;
// the last variable is left to the caller's inner loop.
template <class Body>
void for_each_prefix(unsigned n, const std::vector<u64>& units, u64 q, Body&& body) {
  const unsigned outer = n - 1;
  const std::size_t nu = units.size();
  std::vector<std::size_t> idx(outer, 0);
  std::vector<u64> psum(outer + 1, 0), pprod(outer + 1, 1);
  auto refresh = [&](unsigned from) {
    for (unsigned i = from; i < outer; ++i) {
      psum[i + 1] = (psum[i] + units[idx[i]]) % q;
      pprod[i + 1] = pprod[i] * units[idx[i]] % q;
    }
  };
  refresh(0);
  while (true) {
    body(psum[outer], pprod[outer]);
    if (outer == 0) return;
    int i = static_cast<int>(outer) - 1;
    while (i >= 0 && ++idx[i] == nu) {
      idx[i] = 0;
      --i;
    }
    if (i < 0) return;
    refresh(static_cast<unsigned>(i));
  }
}

}  // namespace detail

/// Direct sum of e((x_1 + ... + x_n + z x_1' ... x_n') / q) over units x_i.
inline KloostermanResult hyper_kloosterman(unsigned n, i64 z, const PrimePower& pp) {
  detail::check_kloosterman_args(n, pp);
  if (reduce(z, pp.p) == 0) throw Error(Errc::NotAUnit, "Kloosterman parameter must be prime to p");
  const u64 q = pp.q;
  const u64 zr = reduce(z, q);
  const auto units = detail::units_mod(pp);
  const auto inv = detail::inverse_table(pp);
  // Histogram of exponents mod q, then a single weighted sum of roots of unity.
  std::vector<u64> hist(q, 0);
  detail::for_each_prefix(n, units, q, [&](u64 s, u64 pr) {
    for (u64 x : units) hist[(s + x + zr * inv[pr * x % q]) % q] += 1;
  });
  cplx value{0.0, 0.0};
  for (u64 r = 0; r < q; ++r) {
    if (hist[r] != 0) value += static_cast<double>(hist[r]) * unit_root(r, q);
  }
  return {n, z, pp, value, kloosterman_bound(n, pp)};
}

/// All n-variable sums mod q at once: one pass over the tuples records
/// H(P) = sum over tuples with product P of e(sum / q), after which
/// K(z) = sum_P H(P) e(z P' / q) costs O(q) per parameter.
class KloostermanFamily {
 public:
  KloostermanFamily(unsigned n, const PrimePower& pp) : n_(n), pp_(pp) {
    detail::check_kloosterman_args(n, pp);
    const u64 q = pp.q;
    const auto units = detail::units_mod(pp);
    inv_ = detail::inverse_table(pp);
    std::vector<u64> counts(q * q, 0);
    detail::for_each_prefix(n, units, q, [&](u64 s, u64 pr) {
      for (u64 x : units) counts[(pr * x % q) * q + (s + x) % q] += 1;
    });
    h_.assign(q, cplx{0.0, 0.0});
    for (u64 prod : units) {
      cplx acc{0.0, 0.0};
      for (u64 s = 0; s < q; ++s) {
        const u64 c = counts[prod * q + s];
        if (c != 0) acc += static_cast<double>(c) * unit_root(s, q);
      }
      h_[prod] = acc;
    }
  }

  unsigned variables() const { return n_; }
  const PrimePower& modulus() const { return pp_; }

  cplx operator()(i64 z) const {
    const u64 q = pp_.q;
    const u64 zr = reduce(z, q);
    if (zr % pp_.p == 0) throw Error(Errc::NotAUnit, "Kloosterman parameter must be prime to p");
    cplx value{0.0, 0.0};
    for (u64 prod = 1; prod < q; ++prod) {
      if (prod % pp_.p == 0) continue;
      value += h_[prod] * unit_root(mul_mod(zr, inv_[prod], q), q);
    }
    return value;
  }

 private:
  unsigned n_;
  PrimePower pp_;
  std::vector<u64> inv_;
  std::vector<cplx> h_;
};

inline void check_gauss_power_args(unsigned n, i64 r, const PrimePower& pp) {
  if (reduce(r, pp.p) == 0) throw Error(Errc::NotAUnit, "r must be prime to p");
  if (n <= 2 || n > pp.p) throw Error(Errc::ParameterOutOfRange, "power must satisfy 2 < n <= p");
  if (pp.a < 2) throw Error(Errc::EmptyCharacterSet, "no primitive wild characters of conductor p");
}

/// A = sum over primitive wild chi mod p^a of conj(chi(r)) tau(chi)^n, directly.
inline cplx gauss_power_sum(unsigned n, i64 r, const PrimePower& pp) {
  check_gauss_power_args(n, r, pp);
  cplx total{0.0, 0.0};
  for (const auto& chi : enumerate_wild_primitive(pp)) {
    total += std::conj(chi(r)) * std::pow(gauss_sum(chi), static_cast<int>(n));
  }
  return total;
}

/// The same A through (n-1)-variable Kloosterman sums:
///   p^(a-1) sum_{b in S_a} T(br) - p^(a-2) sum_{c in S_(a-1)} sum_i T(cr + i p^(a-1)).
inline cplx gauss_power_sum_via_l1(unsigned n, i64 r, const PrimePower& pp) {
  check_gauss_power_args(n, r, pp);
  const u64 q = pp.q;
  const u64 lower = q / pp.p;
  const KloostermanFamily T(n - 1, pp);
  cplx first{0.0, 0.0};
  for (u64 b : exponent_set(pp)) first += T(static_cast<i64>(mul_mod(b, reduce(r, q), q)));
  cplx second{0.0, 0.0};
  for (u64 c : exponent_set(PrimePower(pp.p, pp.a - 1))) {
    const u64 base = mul_mod(c, reduce(r, lower), lower);
    for (u64 i = 0; i < pp.p; ++i) second += T(static_cast<i64>((base + i * lower) % q));
  }
  return static_cast<double>(lower) * first - static_cast<double>(lower / pp.p) * second;
}

/// |A| / p^(1/2 + a(n+1)/2), the constant implied by the Gauss-power bound.
inline double gauss_power_constant(const cplx& a_value, unsigned n, const PrimePower& pp) {
  return std::abs(a_value) /
         std::pow(static_cast<double>(pp.p), 0.5 + pp.a * (n + 1) / 2.0);
}

}  // namespace symtwist
