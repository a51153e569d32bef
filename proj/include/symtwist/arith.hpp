#pragma once

// Exact modular arithmetic on machine words, the cyclic structure of
// (Z/p^a)^x and fixed-precision p-adic helpers (Teichmueller lifts, unit roots).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "symtwist/error.hpp"

namespace symtwist {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

/// Least non-negative residue of x mod m.
inline u64 reduce(i64 x, u64 m) {
  if (m == 1) return 0;
  i128 r = static_cast<i128>(x) % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<u64>(r);
}

inline u64 reduce(i128 x, u64 m) {
  if (m == 1) return 0;
  i128 r = x % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<u64>(r);
}

inline u64 pow_mod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

inline u64 ipow(u64 base, unsigned exp) {
  u64 r = 1;
  for (unsigned i = 0; i < exp; ++i) r *= base;
  return r;
}

inline u64 inv_mod(i64 x, u64 m) {
  if (m == 1) return 0;
  i128 a = reduce(x, m), b = m, s0 = 1, s1 = 0;
  while (b != 0) {
    i128 q = a / b;
    i128 t = a - q * b;
    a = b;
    b = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  if (a != 1) {
    throw Error(Errc::NotInvertible,
                std::to_string(x) + " is not invertible modulo " + std::to_string(m));
  }
  return reduce(s0, m);
}

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % small == 0) return n == small;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  // Deterministic witness set for 64-bit inputs.
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace detail {

inline u64 pollard_rho(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    u64 x = 2, y = 2, d = 1;
    auto f = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

inline void factor_into(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace detail

/// Distinct prime divisors of n, ascending.
inline std::vector<u64> prime_divisors(u64 n) {
  std::vector<u64> out;
  for (u64 d = 2; d < 1000 && d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  detail::factor_into(n, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline int valuation(i128 n, u64 p) {
  if (n == 0) return 1 << 20;
  int v = 0;
  while (n % static_cast<i128>(p) == 0) {
    n /= static_cast<i128>(p);
    ++v;
  }
  return v;
}

/// Kronecker symbol (a|n) for n > 0.
inline int kronecker(i64 a, u64 n) {
  int result = 1;
  while (n % 2 == 0) {
    n /= 2;
    const u64 r = reduce(a, 8);
    if (a % 2 == 0) return 0;
    if (r == 3 || r == 5) result = -result;
  }
  if (n == 1) return result;
  u64 x = reduce(a, n), y = n;
  while (x != 0) {
    while (x % 2 == 0) {
      x /= 2;
      const u64 r = y % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(x, y);
    if (x % 4 == 3 && y % 4 == 3) result = -result;
    x %= y;
  }
  return y == 1 ? result : 0;
}

/// An odd prime power q = p^a with q < 2^40.
struct PrimePower {
  u64 p = 3;
  unsigned a = 1;
  u64 q = 3;

  PrimePower() = default;
  PrimePower(u64 prime, unsigned exponent) : p(prime), a(exponent) {
    if (prime < 3 || !is_prime(prime)) {
      throw Error(Errc::InvalidInput, "p must be an odd prime");
    }
    if (exponent < 1) throw Error(Errc::InvalidInput, "exponent must be at least 1");
    const double bits = exponent * std::log2(static_cast<double>(prime));
    if (bits >= 40.0) throw Error(Errc::ParameterOutOfRange, "p^a must be below 2^40");
    q = ipow(prime, exponent);
  }

  /// phi(p^a) = p^(a-1)(p-1)
  u64 group_order() const { return q / p * (p - 1); }
  u64 wild_order() const { return q / p; }

  bool operator==(const PrimePower&) const = default;
};

/// Smallest positive g generating (Z/p)^x, lifted so that it generates mod p^a.
inline u64 primitive_root(const PrimePower& pp) {
  const u64 p = pp.p;
  const auto ell = prime_divisors(p - 1);
  u64 g = 2;
  for (;; ++g) {
    bool ok = true;
    for (u64 l : ell) {
      if (pow_mod(g, (p - 1) / l, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) break;
  }
  if (pp.a >= 2 && pow_mod(g, p - 1, p * p) == 1) g += p;
  return g % pp.q;
}

/// Multiplicative order check used by tests and by CharacterGroup validation.
inline bool generates(u64 g, const PrimePower& pp) {
  const u64 n = pp.group_order();
  if (std::gcd(g, pp.p) != 1) return false;
  for (u64 l : prime_divisors(n)) {
    if (pow_mod(g, n / l, pp.q) == 1) return false;
  }
  return true;
}

namespace detail {

// Solve base^k = target inside a cyclic subgroup of order n (baby-step giant-step).
inline u64 bsgs(u64 base, u64 target, u64 n, u64 modulus) {
  const u64 m = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(n)))) + 1;
  std::unordered_map<u64, u64> baby;
  baby.reserve(m * 2);
  u64 cur = 1;
  for (u64 j = 0; j < m; ++j) {
    baby.emplace(cur, j);
    cur = mul_mod(cur, base, modulus);
  }
  const u64 giant = inv_mod(static_cast<i64>(pow_mod(base, m, modulus)), modulus);
  u64 gamma = target;
  for (u64 i = 0; i <= m; ++i) {
    auto it = baby.find(gamma);
    if (it != baby.end()) return (i * m + it->second) % n;
    gamma = mul_mod(gamma, giant, modulus);
  }
  throw Error(Errc::InvalidInput, "discrete logarithm does not exist in subgroup");
}

}  // namespace detail

/// Exponent k in [0, phi(p^a)) with g^k = x mod p^a (Pohlig-Hellman over the
/// p^(a-1) and p-1 cyclic factors).
inline u64 discrete_log(i64 x_in, u64 g, const PrimePower& pp) {
  const u64 x = reduce(x_in, pp.q);
  if (x % pp.p == 0) throw Error(Errc::NotAUnit, std::to_string(x_in) + " is divisible by p");
  const u64 wild = pp.wild_order();
  const u64 tame = pp.p - 1;
  // component in the p-power part
  const u64 k_wild =
      wild == 1 ? 0 : detail::bsgs(pow_mod(g, tame, pp.q), pow_mod(x, tame, pp.q), wild, pp.q);
  const u64 k_tame = detail::bsgs(pow_mod(g, wild, pp.q), pow_mod(x, wild, pp.q), tame, pp.q);
  // CRT: k = k_wild mod wild, k = k_tame mod tame
  const u64 n = wild * tame;
  const u64 t = mul_mod(reduce(static_cast<i64>(k_tame) - static_cast<i64>(k_wild % tame), tame),
                        inv_mod(static_cast<i64>(wild % tame), tame), tame);
  return (k_wild + wild * t) % n;
}

/// Element of Z_p known modulo p^k.
struct PadicInt {
  u64 p = 3;
  unsigned k = 1;
  u64 value = 0;

  u64 modulus() const { return ipow(p, k); }
  bool is_unit() const { return value % p != 0; }
  bool operator==(const PadicInt&) const = default;
};

inline PadicInt teichmuller(i64 x, u64 p, unsigned k) {
  if (reduce(x, p) == 0) throw Error(Errc::NotAUnit, "Teichmueller lift needs a unit");
  const u64 m = ipow(p, k);
  u64 t = reduce(x, m);
  // t -> t^p converges p-adically to the root of unity congruent to x.
  for (unsigned i = 0; i <= k; ++i) {
    const u64 next = pow_mod(t, p, m);
    if (next == t) break;
    t = next;
  }
  return {p, k, t};
}

/// The unit root of X^2 - a_p X + p modulo p^k (Newton iteration from a_p mod p).
inline PadicInt hensel_unit_root(i64 a_p, u64 p, unsigned k) {
  if (reduce(a_p, p) == 0) {
    throw Error(Errc::Supersingular, "p divides a_p: no unit root of X^2 - a_p X + p");
  }
  const u64 m = ipow(p, k);
  const u64 a = reduce(a_p, m);
  u64 alpha = a % p;
  for (unsigned iter = 0; iter < 2 * k + 2; ++iter) {
    const u64 f = (mul_mod(alpha, alpha, m) + m - mul_mod(a, alpha, m) + p % m) % m;
    if (f == 0) break;
    const u64 df = reduce(static_cast<i64>(2 * alpha % m) - static_cast<i64>(a), m);
    alpha = reduce(static_cast<i64>(alpha) - static_cast<i64>(mul_mod(f, inv_mod(static_cast<i64>(df), m), m)), m);
  }
  return {p, k, alpha};
}

/// Default p-adic working precision for conductor p^a computations.
inline unsigned default_padic_precision(unsigned a) { return 2 * a + 4; }

}  // namespace symtwist
