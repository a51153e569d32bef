#pragma once

// Elliptic curves over Q given by integral Weierstrass coefficients: reduction
// types, traces of Frobenius by point counting, Hecke coefficients, quadratic
// twists and the real/imaginary periods of the Neron differential.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symtwist/arith.hpp"

namespace symtwist {

enum class ReductionKind { Good, SplitMultiplicative, NonsplitMultiplicative, Additive };

constexpr const char* reduction_name(ReductionKind k) {
  switch (k) {
    case ReductionKind::Good: return "good";
    case ReductionKind::SplitMultiplicative: return "split_mult";
    case ReductionKind::NonsplitMultiplicative: return "nonsplit_mult";
    case ReductionKind::Additive: return "additive";
  }
  return "unknown";
}

inline bool is_multiplicative(ReductionKind k) {
  return k == ReductionKind::SplitMultiplicative || k == ReductionKind::NonsplitMultiplicative;
}

struct ReductionInfo {
  u64 r = 2;
  ReductionKind kind = ReductionKind::Good;
  i64 a_r = 0;
};

inline std::string to_string(i128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  u128 m = neg ? static_cast<u128>(-v) : static_cast<u128>(v);
  std::string s;
  while (m > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(m % 10)));
    m /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

class EllipticCurve {
 public:
  EllipticCurve() : EllipticCurve(0, -1, 1, -10, -20) {}
  EllipticCurve(i64 a1, i64 a2, i64 a3, i64 a4, i64 a6) : a_{a1, a2, a3, a4, a6} {
    const i128 A1 = a1, A2 = a2, A3 = a3, A4 = a4, A6 = a6;
    b2_ = A1 * A1 + 4 * A2;
    b4_ = 2 * A4 + A1 * A3;
    b6_ = A3 * A3 + 4 * A6;
    b8_ = A1 * A1 * A6 + 4 * A2 * A6 - A1 * A3 * A4 + A2 * A3 * A3 - A4 * A4;
    c4_ = b2_ * b2_ - 24 * b4_;
    c6_ = -b2_ * b2_ * b2_ + 36 * b2_ * b4_ - 216 * b6_;
    disc_ = -b2_ * b2_ * b8_ - 8 * b4_ * b4_ * b4_ - 27 * b6_ * b6_ + 9 * b2_ * b4_ * b6_;
    if (disc_ == 0) throw Error(Errc::InvalidInput, "singular Weierstrass equation");
  }
  explicit EllipticCurve(const std::array<i64, 5>& a) : EllipticCurve(a[0], a[1], a[2], a[3], a[4]) {}

  i64 a1() const { return a_[0]; }
  i64 a2() const { return a_[1]; }
  i64 a3() const { return a_[2]; }
  i64 a4() const { return a_[3]; }
  i64 a6() const { return a_[4]; }
  const std::array<i64, 5>& coefficients() const { return a_; }
  i128 b2() const { return b2_; }
  i128 b4() const { return b4_; }
  i128 b6() const { return b6_; }
  i128 b8() const { return b8_; }
  i128 c4() const { return c4_; }
  i128 c6() const { return c6_; }
  i128 discriminant() const { return disc_; }

  bool divides_discriminant(u64 r) const { return disc_ % static_cast<i128>(r) == 0; }

  /// Primes dividing the discriminant, ascending.
  std::vector<u64> bad_primes() const {
    i128 rest = disc_ < 0 ? -disc_ : disc_;
    std::vector<u64> out;
    for (u64 r = 2; r < 1000; ++r) {
      if (rest % r == 0) {
        out.push_back(r);
        while (rest % r == 0) rest /= r;
      }
    }
    if (rest > 1) {
      if (rest > static_cast<i128>(~u64{0})) {
        throw Error(Errc::ParameterOutOfRange, "discriminant cofactor exceeds 64 bits");
      }
      for (u64 r : prime_divisors(static_cast<u64>(rest))) out.push_back(r);
    }
    return out;
  }

  std::string label() const {
    std::string s = "[";
    for (int i = 0; i < 5; ++i) s += (i ? "," : "") + std::to_string(a_[i]);
    return s + "]";
  }

  bool operator==(const EllipticCurve& o) const { return a_ == o.a_; }

 private:
  std::array<i64, 5> a_;
  i128 b2_, b4_, b6_, b8_, c4_, c6_, disc_;
};

/// Projective points of the reduction mod r, singular point included, by brute force.
inline u64 count_points_naive(const EllipticCurve& E, u64 r) {
  u64 c[5];
  for (int i = 0; i < 5; ++i) c[i] = reduce(E.coefficients()[i], r);
  u64 count = 1;
  for (u64 x = 0; x < r; ++x) {
    const u64 x2 = mul_mod(x, x, r);
    const u64 rhs = (mul_mod(x2, x, r) + mul_mod(c[1], x2, r) + mul_mod(c[3], x, r) + c[4]) % r;
    for (u64 y = 0; y < r; ++y) {
      const u64 lhs = (mul_mod(y, y, r) + mul_mod(mul_mod(c[0], x, r), y, r) + mul_mod(c[2], y, r)) % r;
      if (lhs == rhs) ++count;
    }
  }
  return count;
}

namespace detail {

// Legendre symbols (v / r) for every residue v, r an odd prime.
inline void fill_legendre(u64 r, std::vector<signed char>& t) {
  t.assign(r, -1);
  t[0] = 0;
  for (u64 x = 1; x <= r / 2; ++x) t[x * x % r] = 1;
}

// sum over x mod r of (f(x) / r), f(x) = 4x^3 + b2 x^2 + 2 b4 x + b6, stepping f by
// forward differences.
inline i64 legendre_cubic_sum(const EllipticCurve& E, u64 r, const std::vector<signed char>& leg) {
  const u64 B = reduce(E.b2(), r), Cc = reduce(2 * E.b4(), r), D = reduce(E.b6(), r);
  auto f = [&](u64 x) {
    x %= r;
    const u64 x2 = mul_mod(x, x, r);
    return (mul_mod(4 % r, mul_mod(x2, x, r), r) + mul_mod(B, x2, r) + mul_mod(Cc, x, r) + D) % r;
  };
  const u64 f0 = f(0), f1 = f(1), f2 = f(2), f3 = f(3);
  u64 v = f0;
  u64 e1 = (f1 + r - f0) % r;
  u64 e2 = (f2 + 2 * (r - f1) + f0) % r;
  const u64 e3 = (f3 + 3 * (r - f2) + 3 * f1 + (r - f0)) % r;
  i64 sum = 0;
  for (u64 x = 0; x < r; ++x) {
    sum += leg[v];
    v += e1;
    if (v >= r) v -= r;
    e1 += e2;
    if (e1 >= r) e1 -= r;
    e2 += e3;
    if (e2 >= r) e2 -= r;
  }
  return sum;
}

inline i64 trace_odd_good(const EllipticCurve& E, u64 r, std::vector<signed char>& leg) {
  fill_legendre(r, leg);
  return -legendre_cubic_sum(E, r, leg);
}

// Above this prime the trace comes from point orders instead of a character sum.
inline constexpr u64 kBsgsThreshold = 1000;

// Arithmetic in F_r, r < 2^31, kept in Montgomery form (R = 2^32).
struct MontField {
  std::uint32_t r, ninv, r2;

  explicit MontField(std::uint32_t mod) : r(mod) {
    std::uint32_t inv = mod;  // Newton iteration for mod^-1 mod 2^32
    for (int i = 0; i < 5; ++i) inv *= 2U - mod * inv;
    ninv = 0U - inv;
    r2 = static_cast<std::uint32_t>((static_cast<u64>(1) << 63) % mod * 2 % mod);  // 2^64 mod r
  }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    const u64 t = static_cast<u64>(a) * b;
    const std::uint32_t m = static_cast<std::uint32_t>(t) * ninv;
    const std::uint32_t u = static_cast<std::uint32_t>((t + static_cast<u64>(m) * r) >> 32);
    return u >= r ? u - r : u;
  }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    const std::uint32_t s = a + b;
    return s >= r ? s - r : s;
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return a >= b ? a - b : a + r - b; }
  std::uint32_t to(u64 a) const { return mul(static_cast<std::uint32_t>(a % r), r2); }
  std::uint32_t one() const { return to(1); }
  std::uint32_t inv(std::uint32_t a) const {
    std::uint32_t res = one(), b = a;
    for (u64 e = r - 2; e > 0; e >>= 1U) {
      if (e & 1U) res = mul(res, b);
      b = mul(b, b);
    }
    return res;
  }
};

// Jacobian points on Y^2 = X^3 + A X + B; Z = 0 is the identity. Additions are mixed
// (second operand affine), which is all the search below needs.
struct JacobianCurve {
  const MontField& F;
  std::uint32_t A;

  struct Jac {
    std::uint32_t X = 0, Y = 0, Z = 0;
  };
  struct Aff {
    std::uint32_t x, y;
  };

  Jac dbl(const Jac& P) const {
    if (P.Z == 0 || P.Y == 0) return {};
    const auto YY = F.mul(P.Y, P.Y);
    const auto S = F.mul(F.add(F.add(P.X, P.X), F.add(P.X, P.X)), YY);
    const auto ZZ = F.mul(P.Z, P.Z);
    const auto XX = F.mul(P.X, P.X);
    const auto M = F.add(F.add(F.add(XX, XX), XX), F.mul(A, F.mul(ZZ, ZZ)));
    const auto X3 = F.sub(F.mul(M, M), F.add(S, S));
    auto Y4 = F.mul(YY, YY);
    Y4 = F.add(Y4, Y4);
    Y4 = F.add(Y4, Y4);
    Y4 = F.add(Y4, Y4);
    const auto Y3 = F.sub(F.mul(M, F.sub(S, X3)), Y4);
    const auto YZ = F.mul(P.Y, P.Z);
    return {X3, Y3, F.add(YZ, YZ)};
  }

  Jac add(const Jac& P, const Aff& Q) const {
    if (P.Z == 0) return {Q.x, Q.y, F.one()};
    const auto ZZ = F.mul(P.Z, P.Z);
    const auto H = F.sub(F.mul(Q.x, ZZ), P.X);
    const auto R = F.sub(F.mul(Q.y, F.mul(P.Z, ZZ)), P.Y);
    if (H == 0) return R == 0 ? dbl(P) : Jac{};
    const auto HH = F.mul(H, H);
    const auto HHH = F.mul(H, HH);
    const auto V = F.mul(P.X, HH);
    const auto X3 = F.sub(F.sub(F.mul(R, R), HHH), F.add(V, V));
    const auto Y3 = F.sub(F.mul(R, F.sub(V, X3)), F.mul(P.Y, HHH));
    return {X3, Y3, F.mul(P.Z, H)};
  }

  Jac mul(const Aff& P, u64 k) const {
    Jac acc;
    for (int bit = 63 - std::countl_zero(k | 1U); bit >= 0; --bit) {
      acc = dbl(acc);
      if ((k >> bit) & 1U) acc = add(acc, P);
    }
    return acc;
  }

  // Affine x (and y) for points with nonzero Z, sharing one inversion.
  void normalize(const std::vector<Jac>& pts, std::vector<Aff>& out) const {
    const std::size_t n = pts.size();
    out.resize(n);
    std::vector<std::uint32_t> prefix(n + 1);
    prefix[0] = F.one();
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = F.mul(prefix[i], pts[i].Z);
    std::uint32_t inv = F.inv(prefix[n]);
    for (std::size_t i = n; i-- > 0;) {
      const auto zi = F.mul(inv, prefix[i]);
      inv = F.mul(inv, pts[i].Z);
      const auto zi2 = F.mul(zi, zi);
      out[i] = {F.mul(pts[i].X, zi2), F.mul(pts[i].Y, F.mul(zi2, zi))};
    }
  }
};

// All m in [lo, hi] with m P = O, or nullopt when P has small order (too many multiples).
inline std::optional<std::vector<u64>> multiples_in_interval(const JacobianCurve& C, const JacobianCurve::Aff& P,
                                                             u64 lo, u64 hi) {
  const u64 w = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(hi - lo + 1) / 2.0))) + 1;
  std::vector<JacobianCurve::Jac> jac;
  jac.reserve(w + 2);
  JacobianCurve::Jac J;
  for (u64 j = 1; j <= w; ++j) {
    J = C.add(J, P);
    if (J.Z == 0) return std::nullopt;
    jac.push_back(J);
  }
  const u64 first = lo + w;
  jac.push_back(C.mul(P, first));
  jac.push_back(C.mul(P, 2 * w));
  if (jac[w].Z == 0 || jac[w + 1].Z == 0) return std::nullopt;
  std::vector<JacobianCurve::Aff> aff;
  C.normalize(jac, aff);
  // open-addressing table x(jP) -> j; j = 0 marks an empty slot
  unsigned bits = 1;
  while ((u64{1} << bits) < 4 * w) ++bits;
  const std::size_t mask = (std::size_t{1} << bits) - 1;
  std::vector<std::uint32_t> keys(mask + 1), idx(mask + 1, 0);
  const auto slot = [&](std::uint32_t x) { return static_cast<std::size_t>((x * 0x9E3779B1U) >> (32 - bits)); };
  for (u64 j = 0; j < w; ++j) {
    std::size_t h = slot(aff[j].x);
    while (idx[h] != 0) h = (h + 1) & mask;
    keys[h] = aff[j].x;
    idx[h] = static_cast<std::uint32_t>(j + 1);
  }
  const auto step = aff[w + 1];

  std::vector<u64> bases;
  std::vector<JacobianCurve::Jac> giant;
  J = {aff[w].x, aff[w].y, C.F.one()};
  std::vector<u64> found;
  for (u64 base = first; base <= hi + w; base += 2 * w) {
    if (J.Z == 0) {
      if (base <= hi) found.push_back(base);
    } else {
      bases.push_back(base);
      giant.push_back(J);
    }
    J = C.add(J, step);
  }
  C.normalize(giant, aff);
  for (std::size_t k = 0; k < giant.size(); ++k) {
    for (std::size_t h = slot(aff[k].x); idx[h] != 0; h = (h + 1) & mask) {
      if (keys[h] != aff[k].x) continue;
      for (u64 cand : {bases[k] - idx[h], bases[k] + idx[h]}) {
        if (cand >= lo && cand <= hi && C.mul(P, cand).Z == 0) found.push_back(cand);
      }
    }
    if (found.size() > 8) return std::nullopt;
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

// a_r at a good prime 5 <= r < 2^31 in O(r^(1/4)) group operations. Each x0 with f = x0^3 + A x0 + B != 0
// gives the point (x0 f, f^2) on Y^2 = X^3 + A f^2 X + B f^3, which is E or its quadratic twist as f is a
// square or not; candidate point counts are intersected until one is left. Returns false if that does
// not happen within a few points.
inline bool trace_bsgs(const EllipticCurve& E, u64 r, i64& out) {
  if (r >= (u64{1} << 31)) return false;
  const u64 A = reduce(-27 * E.c4(), r);
  const u64 B = reduce(-54 * E.c6(), r);
  const double s = 2.0 * std::sqrt(static_cast<double>(r));
  const u64 lo = r + 1 - static_cast<u64>(std::floor(s));
  const u64 hi = r + 1 + static_cast<u64>(std::floor(s));
  const MontField F(static_cast<std::uint32_t>(r));
  std::optional<std::vector<u64>> counts;  // candidates for #E(F_r)
  int points = 0;
  for (u64 x = 0; x < r && points < 8; ++x) {
    const u64 f = ((x * x % r) * x % r + A * x % r + B) % r;
    if (f == 0) continue;
    ++points;
    const bool twist = kronecker(static_cast<i64>(f), r) != 1;
    const u64 f2 = f * f % r;
    const JacobianCurve C{F, F.to(A * f2 % r)};
    const auto mult = multiples_in_interval(C, {F.to(x * f % r), F.to(f2)}, lo, hi);
    if (!mult) continue;
    std::vector<u64> cand;
    for (u64 m : *mult) cand.push_back(twist ? 2 * (r + 1) - m : m);
    std::sort(cand.begin(), cand.end());
    if (counts) {
      std::vector<u64> both;
      std::set_intersection(counts->begin(), counts->end(), cand.begin(), cand.end(), std::back_inserter(both));
      cand = std::move(both);
    }
    counts = std::move(cand);
    if (counts->size() == 1) {
      out = static_cast<i64>(r + 1) - static_cast<i64>(counts->front());
      return true;
    }
    if (counts->empty()) return false;
  }
  return false;
}

}  // namespace detail

/// Reduction type at r. For odd r the node's tangent slopes are the square roots of
/// 12 x0 + b2 at the double root x0 of 4x^3 + b2 x^2 + 2 b4 x + b6; r = 2 uses a point count.
inline ReductionInfo reduction_type(const EllipticCurve& E, u64 r) {
  if (!is_prime(r)) throw Error(Errc::InvalidInput, "reduction type requested at a non-prime");
  ReductionInfo info{r, ReductionKind::Good, 0};
  if (!E.divides_discriminant(r)) return info;
  if (E.c4() % static_cast<i128>(r) == 0) {
    info.kind = ReductionKind::Additive;
    return info;
  }
  bool split = false;
  if (r == 2) {
    split = 3 - static_cast<i64>(count_points_naive(E, 2)) == 1;
  } else {
    const u64 B = reduce(E.b2(), r), Cc = reduce(2 * E.b4(), r), D = reduce(E.b6(), r);
    u64 x0 = r;
    for (u64 x = 0; x < r && x0 == r; ++x) {
      const u64 x2 = mul_mod(x, x, r);
      const u64 fx = (mul_mod(4 % r, mul_mod(x2, x, r), r) + mul_mod(B, x2, r) + mul_mod(Cc, x, r) + D) % r;
      const u64 dfx = (mul_mod(12 % r, x2, r) + mul_mod(2 * B % r, x, r) + Cc) % r;
      if (fx == 0 && dfx == 0) x0 = x;
    }
    if (x0 == r) throw Error(Errc::InvalidInput, "no singular point modulo a bad prime");
    split = kronecker(static_cast<i64>((mul_mod(12 % r, x0, r) + B) % r), r) == 1;
  }
  info.kind = split ? ReductionKind::SplitMultiplicative : ReductionKind::NonsplitMultiplicative;
  info.a_r = split ? 1 : -1;
  return info;
}

/// a_r = r + 1 - #E(F_r) at a prime of good reduction.
inline i64 trace_of_frobenius(const EllipticCurve& E, u64 r) {
  if (!is_prime(r)) throw Error(Errc::InvalidInput, "trace requested at a non-prime");
  if (E.divides_discriminant(r)) throw Error(Errc::BadReduction, "bad reduction at " + std::to_string(r));
  if (r == 2) return 3 - static_cast<i64>(count_points_naive(E, 2));
  i64 a = 0;
  if (r > detail::kBsgsThreshold && detail::trace_bsgs(E, r, a)) return a;
  std::vector<signed char> leg;
  return detail::trace_odd_good(E, r, leg);
}

/// Reduction data including a_r (trace at good primes, +-1 or 0 at bad ones).
inline ReductionInfo reduction_info(const EllipticCurve& E, u64 r) {
  ReductionInfo info = reduction_type(E, r);
  if (info.kind == ReductionKind::Good) info.a_r = trace_of_frobenius(E, r);
  return info;
}

/// Smallest prime factor of every n <= limit (0 and 1 map to 0).
inline std::vector<std::uint32_t> smallest_prime_factors(std::size_t limit) {
  std::vector<std::uint32_t> spf(limit + 1, 0);
  for (std::size_t i = 2; i <= limit; ++i) {
    if (spf[i] != 0) continue;
    for (std::size_t j = i; j <= limit; j += i) {
      if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
    }
  }
  return spf;
}

/// a_r for every prime r <= limit (entries at composite indices are 0).
inline std::vector<i64> prime_traces(const EllipticCurve& E, std::size_t limit,
                                     const std::vector<std::uint32_t>& spf) {
  std::vector<i64> a(limit + 1, 0);
  std::vector<signed char> leg;
  leg.reserve(limit + 1);
  for (std::size_t r = 2; r <= limit; ++r) {
    if (spf[r] != r) continue;
    if (E.divides_discriminant(r)) {
      a[r] = reduction_type(E, r).a_r;
    } else if (r == 2) {
      a[r] = trace_of_frobenius(E, 2);
    } else if (r <= detail::kBsgsThreshold || !detail::trace_bsgs(E, r, a[r])) {
      a[r] = detail::trace_odd_good(E, r, leg);
    }
  }
  return a;
}

/// c_1..c_M of L(E, s) (index 0 unused).
inline std::vector<i64> hecke_coefficients(const EllipticCurve& E, std::size_t M) {
  const auto spf = smallest_prime_factors(M);
  const auto ap = prime_traces(E, M, spf);
  std::vector<i64> c(M + 1, 0);
  if (M >= 1) c[1] = 1;
  for (std::size_t m = 2; m <= M; ++m) {
    const std::size_t r = spf[m];
    std::size_t pk = 1, rest = m;
    while (rest % r == 0) {
      rest /= r;
      pk *= r;
    }
    if (rest != 1) {
      c[m] = c[pk] * c[rest];
      continue;
    }
    if (pk == r) {
      c[m] = ap[r];
    } else if (E.divides_discriminant(r)) {
      c[m] = c[pk / r] * ap[r];
    } else {
      c[m] = ap[r] * c[pk / r] - static_cast<i64>(r) * c[pk / r / r];
    }
  }
  return c;
}

/// Product of multiplicative primes; throws AdditiveReduction when an additive prime exists.
inline u64 semistable_conductor(const EllipticCurve& E) {
  u64 N = 1;
  for (u64 r : E.bad_primes()) {
    const auto info = reduction_type(E, r);
    if (info.kind == ReductionKind::Additive) {
      throw Error(Errc::AdditiveReduction, "additive reduction at " + std::to_string(r));
    }
    N *= r;
  }
  return N;
}

struct ConductorReport {
  u64 multiplicative_part = 1;
  std::vector<u64> additive_primes;
};

inline ConductorReport conductor_report(const EllipticCurve& E) {
  ConductorReport rep;
  for (u64 r : E.bad_primes()) {
    if (reduction_type(E, r).kind == ReductionKind::Additive) {
      rep.additive_primes.push_back(r);
    } else {
      rep.multiplicative_part *= r;
    }
  }
  return rep;
}

/// Change of variables x = u^2 x' + r, y = u^3 y' + s u^2 x' + t; returns false when the
/// transformed coefficients are not integral.
inline bool transform_model(const std::array<i64, 5>& a, i64 u, i64 r, i64 s, i64 t,
                            std::array<i64, 5>& out) {
  const i128 a1 = a[0], a2 = a[1], a3 = a[2], a4 = a[3], a6 = a[4];
  const i128 R = r, S = s, T = t;
  const i128 n1 = a1 + 2 * S;
  const i128 n2 = a2 - S * a1 + 3 * R - S * S;
  const i128 n3 = a3 + R * a1 + 2 * T;
  const i128 n4 = a4 - S * a3 + 2 * R * a2 - (T + R * S) * a1 + 3 * R * R - 2 * S * T;
  const i128 n6 = a6 + R * a4 + R * R * a2 + R * R * R - T * a3 - T * T - R * T * a1;
  const i128 U = u;
  const i128 pw[5] = {U, U * U, U * U * U, U * U * U * U, U * U * U * U * U * U};
  const i128 num[5] = {n1, n2, n3, n4, n6};
  for (int i = 0; i < 5; ++i) {
    if (num[i] % pw[i] != 0) return false;
    const i128 v = num[i] / pw[i];
    if (v > INT64_MAX || v < INT64_MIN) return false;
    out[i] = static_cast<i64>(v);
  }
  return true;
}

/// Scales away every prime whose twelfth power divides the discriminant whenever an
/// integral model with u = that prime exists (exhaustive search over r, s, t).
inline EllipticCurve minimal_model(const EllipticCurve& E) {
  EllipticCurve cur = E;
  bool changed = true;
  while (changed) {
    changed = false;
    for (u64 pr : cur.bad_primes()) {
      if (valuation(cur.discriminant(), pr) < 12) continue;
      const i64 u = static_cast<i64>(pr);
      std::array<i64, 5> out{};
      bool found = false;
      for (i64 r = 0; r < u * u && !found; ++r) {
        for (i64 s = 0; s < u && !found; ++s) {
          for (i64 t = 0; t < u * u * u && !found; ++t) {
            found = transform_model(cur.coefficients(), u, r, s, t, out);
          }
        }
      }
      if (found) {
        cur = EllipticCurve(out);
        changed = true;
        break;
      }
    }
  }
  // Normalize a1, a3 in {0, 1} and a2 in {-1, 0, 1}.
  auto floor_mod = [](i64 v, i64 m) { return ((v % m) + m) % m; };
  const auto& a = cur.coefficients();
  const i64 s = (floor_mod(a[0], 2) - a[0]) / 2;
  const i64 a2s = a[1] - s * a[0] - s * s;
  i64 m3 = floor_mod(a2s, 3);
  if (m3 == 2) m3 = -1;
  const i64 r = (m3 - a2s) / 3;
  const i64 a3r = a[2] + r * a[0];
  const i64 t = (floor_mod(a3r, 2) - a3r) / 2;
  std::array<i64, 5> out{};
  if (transform_model(a, 1, r, s, t, out)) return EllipticCurve(out);
  return cur;
}

/// Model of E_D : D y^2 = 4x^3 + b2 x^2 + 2 b4 x + b6, i.e.
/// Y^2 = X^3 + b2 D X^2 + 8 b4 D^2 X + 16 b6 D^3, then minimalized.
inline EllipticCurve quadratic_twist(const EllipticCurve& E, i64 D) {
  if (D == 0) throw Error(Errc::InvalidInput, "twist parameter must be nonzero");
  for (u64 r : prime_divisors(static_cast<u64>(D < 0 ? -D : D))) {
    if ((D / static_cast<i64>(r)) % static_cast<i64>(r) == 0) {
      throw Error(Errc::InvalidInput, "twist parameter must be squarefree");
    }
  }
  const i128 d = D;
  const i128 a2 = E.b2() * d, a4 = 8 * E.b4() * d * d, a6 = 16 * E.b6() * d * d * d;
  auto fits = [](i128 v) { return v <= INT64_MAX && v >= INT64_MIN; };
  if (!fits(a2) || !fits(a4) || !fits(a6)) {
    throw Error(Errc::ParameterOutOfRange, "twisted model overflows 64-bit coefficients");
  }
  return minimal_model(EllipticCurve(0, static_cast<i64>(a2), 0, static_cast<i64>(a4), static_cast<i64>(a6)));
}

struct Periods {
  double omega_plus = 0.0;
  std::complex<double> omega_minus;
  bool rectangular = false;  // positive discriminant: two real components
};

inline double agm(double a, double b) {
  for (int i = 0; i < 200; ++i) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    if (std::abs(an - bn) <= 1e-17 * an) return an;
    a = an;
    b = bn;
  }
  return 0.5 * (a + b);
}

/// Real roots of 4x^3 + b2 x^2 + 2 b4 x + b6, ascending, polished by Newton in long double.
inline std::vector<double> two_division_real_roots(const EllipticCurve& E) {
  const long double c3 = 4.0L, c2 = static_cast<long double>(E.b2()),
                    c1 = 2.0L * static_cast<long double>(E.b4()), c0 = static_cast<long double>(E.b6());
  auto f = [&](long double x) { return ((c3 * x + c2) * x + c1) * x + c0; };
  auto df = [&](long double x) { return (3 * c3 * x + 2 * c2) * x + c1; };
  // Depressed cubic via trigonometric / Cardano formulas, then Newton polish.
  const long double a = c2 / c3, b = c1 / c3, c = c0 / c3;
  const long double Q = (a * a - 3 * b) / 9, R = (2 * a * a * a - 9 * a * b + 27 * c) / 54;
  std::vector<long double> roots;
  if (R * R < Q * Q * Q) {
    const long double theta = std::acos(std::clamp(R / std::sqrt(Q * Q * Q), -1.0L, 1.0L));
    const long double sq = -2 * std::sqrt(Q);
    const long double pi = std::numbers::pi_v<long double>;
    roots = {sq * std::cos(theta / 3) - a / 3, sq * std::cos((theta + 2 * pi) / 3) - a / 3,
             sq * std::cos((theta - 2 * pi) / 3) - a / 3};
  } else {
    const long double A = -std::copysign(std::cbrt(std::abs(R) + std::sqrt(R * R - Q * Q * Q)), R);
    const long double Bv = A == 0 ? 0 : Q / A;
    roots = {A + Bv - a / 3};
  }
  std::vector<double> out;
  for (long double x : roots) {
    for (int i = 0; i < 8; ++i) {
      const long double d = df(x);
      if (d == 0) break;
      x -= f(x) / d;
    }
    out.push_back(static_cast<double>(x));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Omega+ = integral of |dx / (2y + a1 x + a3)| over E(R); Omega- = i times twice the
/// imaginary part of the non-real generator, both from the AGM.
inline Periods neron_periods(const EllipticCurve& E) {
  constexpr double pi = std::numbers::pi;
  Periods out;
  const auto roots = two_division_real_roots(E);
  if (E.discriminant() > 0) {
    if (roots.size() != 3) throw Error(Errc::InvalidInput, "expected three real 2-torsion abscissae");
    const double e3 = roots[0], e2 = roots[1], e1 = roots[2];
    const double w1 = pi / agm(std::sqrt(e1 - e3), std::sqrt(e1 - e2));
    const double w2 = pi / agm(std::sqrt(e1 - e3), std::sqrt(e2 - e3));
    out.omega_plus = 2.0 * w1;
    out.omega_minus = {0.0, 2.0 * w2};
    out.rectangular = true;
  } else {
    const double e1 = roots.back();
    const double b2 = static_cast<double>(E.b2()), b4 = static_cast<double>(E.b4());
    const double a = 3.0 * e1 + b2 / 4.0;
    const double b = std::sqrt(3.0 * e1 * e1 + b2 / 2.0 * e1 + b4 / 2.0);
    out.omega_plus = 2.0 * pi / agm(2.0 * std::sqrt(b), std::sqrt(2.0 * b + a));
    out.omega_minus = {0.0, 2.0 * pi / agm(2.0 * std::sqrt(b), std::sqrt(2.0 * b - a))};
    out.rectangular = false;
  }
  return out;
}

}  // namespace symtwist
