#pragma once

// Smoothed approximate functional equation: the bump g and its Mellin transform
// k, the cutoffs F1 and F2 as vertical-line integrals, the Gamma ratio G, twisted
// epsilon factors, the evaluator itself and completed-L functional-equation checks.
//
// F1 and F2 are tabulated on a uniform grid in x = log y by one FFT per contour:
// with nodes s = sigma + i n h the trapezoid sum is a DFT in n, so x_j = x0 + j delta
// with delta = 2 pi / (h L) costs O(L log L) for all j at once.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "symtwist/characters.hpp"
#include "symtwist/parallel.hpp"
#include "symtwist/special.hpp"
#include "symtwist/symsq.hpp"

namespace symtwist {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place complex DFT of length data.size(); sign = FFTW_FORWARD or FFTW_BACKWARD.
inline void dft(std::vector<cplx>& data, int sign) {
  const int n = static_cast<int>(data.size());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

inline std::size_t next_pow2(double x) {
  std::size_t n = 1;
  while (static_cast<double>(n) < x) n <<= 1U;
  return n;
}

inline const GaussLegendre& cached_gauss_legendre(std::size_t n) {
  static std::mutex m;
  static std::map<std::size_t, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
  return it->second;
}

}  // namespace detail

/// g(u) = c exp(-kappa / (1 - (log u / width)^2)) on |log u| < width.
struct BumpShape {
  double width = 1.0;
  double kappa = 1.0;
};

class TestFunction {
 public:
  explicit TestFunction(BumpShape shape = {}) : shape_(shape) {
    if (!(shape.width > 0.0) || !(shape.kappa > 0.0)) {
      throw Error(Errc::InvalidInput, "bump width and sharpness must be positive");
    }
    // Trapezoid on a uniform grid is spectrally accurate for a flat-ended bump.
    const int n = 8192;
    const double dt = 2.0 * shape.width / n;
    long double s = 0.0L;
    for (int j = 1; j < n; ++j) s += phi(-shape.width + j * dt);
    c_ = 1.0 / static_cast<double>(s * dt);
  }

  const BumpShape& shape() const { return shape_; }
  double width() const { return shape_.width; }
  double normalizer() const { return c_; }

  /// Unnormalized profile in t = log u.
  double phi(double t) const {
    const double v = t / shape_.width;
    if (v <= -1.0 || v >= 1.0) return 0.0;
    return std::exp(-shape_.kappa / (1.0 - v * v));
  }
  double g(double u) const { return u > 0.0 ? c_ * phi(std::log(u)) : 0.0; }

  /// k(s) = int g(u) u^(s-1) du by Gauss-Legendre in t = log u.
  cplx k(cplx s) const {
    const double w = shape_.width;
    const std::size_t n = 160 + static_cast<std::size_t>(std::ceil(0.7 * w * std::abs(s.imag())));
    const auto& rule = detail::cached_gauss_legendre(n);
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double t = w * rule.nodes[i];
      acc += rule.weights[i] * phi(t) * std::exp(s * t);
    }
    return c_ * w * acc;
  }

  /// k(sigma + i n h) for n = 0..count-1 from one FFT of the sampled bump.
  std::vector<cplx> k_line(double sigma, double h, std::size_t count) const {
    const double w = shape_.width;
    const double alias_margin = 6000.0 / std::min(w, 1.0);
    std::size_t L = detail::next_pow2(std::max({2.0 * count + 2.0, count + alias_margin / h, 2.0 * M_PI / (h * w / 256.0)}));
    const double dt = 2.0 * std::numbers::pi / (h * static_cast<double>(L));
    std::vector<cplx> buf(L, cplx{0.0, 0.0});
    const auto J = static_cast<std::ptrdiff_t>(std::floor(w / dt));
    for (std::ptrdiff_t j = -J; j <= J; ++j) {
      const double t = static_cast<double>(j) * dt;
      const double val = c_ * phi(t) * std::exp(sigma * t) * dt;
      buf[static_cast<std::size_t>((j + static_cast<std::ptrdiff_t>(L)) % static_cast<std::ptrdiff_t>(L))] = val;
    }
    detail::dft(buf, FFTW_BACKWARD);
    buf.resize(count);
    return buf;
  }

 private:
  BumpShape shape_;
  double c_ = 1.0;
};

/// G(s) = L(pi~_inf, 1 - s) / L(pi_inf, s) for real self-dual shifts:
/// pi^(d(s - 1/2)) prod_j Gamma((1 - s - mu_j)/2) / Gamma((s - mu_j)/2).
inline cplx gamma_ratio_G(const std::vector<double>& mu, cplx s) {
  constexpr double pi = std::numbers::pi;
  cplx logv = static_cast<double>(mu.size()) * (s - 0.5) * std::log(pi);
  for (double m : mu) {
    const cplx top = (1.0 - s - m) / 2.0;
    const double nearest = std::round(top.real());
    if (nearest <= 0.0 && std::abs(top - cplx(nearest, 0.0)) < 1e-6) {
      throw Error(Errc::PoleProximity, "Gamma ratio evaluated within 1e-6 of a pole");
    }
    logv += lgamma_c(top) - lgamma_c((s - m) / 2.0);
  }
  return std::exp(logv);
}

inline cplx gamma_ratio_G(const LSpec& spec, cplx s) { return gamma_ratio_G(spec.mu, s); }

struct CutoffOptions {
  double sigma1 = 2.0;         // contour for F1
  double h1 = 0.2;
  double sigma_right = 0.25;   // F2 for y >= 1
  double sigma_left = -0.5;    // F2 for y < 1, plus the residue G(beta) at s = 0
  double h2 = 0.04;
  double t_max = 3000.0;       // largest admissible contour height
  double tail_tol = 1e-13;     // truncation criterion for the contour sums
  double weight_tol = 1e-12;   // AFE terms stop where |F2| stays below this
  double converge_tol = 1e-9;  // allowed change under doubling T or halving h
  double grid_step = 1e-3;     // target spacing in log y
  int interp_points = 12;
  bool stub_gamma = false;     // G == 1, for testing the machinery
};

namespace detail {

// One vertical line: integrand values phi_n = f(sigma + i n h) for |n| <= N and the
// transform tabulated on x_j = x0 + j delta.
struct ContourGrid {
  double sigma = 0.0;
  double h = 0.0;
  std::ptrdiff_t N = 0;
  double x0 = 0.0;
  double delta = 0.0;
  std::vector<cplx> values;

  std::vector<cplx> pos, neg;  // integrand at half step, tau = +-n h / 2

  double x_min() const { return x0; }
  double x_max() const { return x0 + delta * static_cast<double>(values.size() - 1); }
};

// Barycentric Lagrange interpolation on np equispaced grid values around x.
inline cplx interpolate(const ContourGrid& g, double x, int np) {
  const double pos = (x - g.x0) / g.delta;
  auto j0 = static_cast<std::ptrdiff_t>(std::floor(pos)) - (np / 2 - 1);
  j0 = std::clamp<std::ptrdiff_t>(j0, 0, static_cast<std::ptrdiff_t>(g.values.size()) - np);
  cplx num{0.0, 0.0};
  double den = 0.0;
  double binom = 1.0;
  for (int k = 0; k < np; ++k) {
    const double d = pos - static_cast<double>(j0 + k);
    if (d == 0.0) return g.values[static_cast<std::size_t>(j0 + k)];
    const double wk = ((k % 2) ? -binom : binom) / d;
    num += wk * g.values[static_cast<std::size_t>(j0 + k)];
    den += wk;
    binom = binom * static_cast<double>(np - 1 - k) / static_cast<double>(k + 1);
  }
  return num / den;
}

}  // namespace detail

/// F1 and F2 for one Gamma datum and one beta, calibrated at construction.
class SmoothedCutoffs {
 public:
  SmoothedCutoffs(std::shared_ptr<const TestFunction> tf, std::vector<double> mu, cplx beta,
                  CutoffOptions opt = {})
      : tf_(std::move(tf)), mu_(std::move(mu)), beta_(beta), opt_(opt) {
    build_f1();
    double pole_edge = -1e300;
    for (double m : mu_) pole_edge = std::max(pole_edge, beta_.real() - 1.0 + m);
    if (opt_.stub_gamma) pole_edge = -1e300;
    left_available_ = pole_edge < opt_.sigma_left - 0.25;
    // the residue at u = 0 only enters through the left contour; G(beta) may be a pole otherwise
    if (opt_.stub_gamma) g_beta_ = {1.0, 0.0};
    else if (left_available_) g_beta_ = gamma_ratio_G(mu_, beta_);
    else g_beta_ = {std::nan(""), std::nan("")};
    if (pole_edge > opt_.sigma_right - 0.25) {
      throw Error(Errc::PoleProximity, "Gamma-ratio pole too close to the F2 contour");
    }
    right_ = build_f2_line(opt_.sigma_right, /*left_scale=*/false);
    if (left_available_) left_ = build_f2_line(opt_.sigma_left, /*left_scale=*/true);
    locate_f2_tail();
  }

  const TestFunction& test_function() const { return *tf_; }
  std::shared_ptr<const TestFunction> test_function_ptr() const { return tf_; }
  const std::vector<double>& mu() const { return mu_; }
  cplx beta() const { return beta_; }
  const CutoffOptions& options() const { return opt_; }
  /// Residue of the F2 integrand at u = 0; NaN when the left contour is not used.
  cplx gamma_at_beta() const { return g_beta_; }
  bool uses_left_contour() const { return left_available_; }
  double height_f1() const { return static_cast<double>(f1_.N) * f1_.h; }
  double height_f2() const { return static_cast<double>(right_.N) * right_.h; }
  /// |F2(y)| < weight_tol for every y beyond this point.
  double f2_tail_point() const { return f2_tail_; }

  double F1(double y) const {
    if (!(y > 0.0)) throw Error(Errc::InvalidInput, "F1 needs y > 0");
    const double x = std::log(y);
    const double w = tf_->width();
    if (x <= -w) return 1.0;
    if (x >= w) return 0.0;
    return detail::interpolate(f1_, x, opt_.interp_points).real();
  }

  cplx F2(double y) const {
    if (!(y > 0.0)) throw Error(Errc::InvalidInput, "F2 needs y > 0");
    const double x = std::log(y);
    if (x >= 0.0 || !left_available_) {
      if (x > right_.x_max() - 1.0) return {0.0, 0.0};
      if (x < right_.x_min() + 1.0) throw Error(Errc::ParameterOutOfRange, "F2 argument below the tabulated range");
      return detail::interpolate(right_, x, opt_.interp_points);
    }
    if (x < left_.x_min() + 1.0) return g_beta_;
    return g_beta_ + detail::interpolate(left_, x, opt_.interp_points);
  }

  /// Direct trapezoid sums (no FFT, no interpolation) for verification.
  double F1_direct(double y, double h_scale = 1.0, double t_scale = 1.0) const {
    return direct(f1_, std::log(y), h_scale, t_scale).real();
  }
  cplx F2_direct(double y, double h_scale = 1.0, double t_scale = 1.0) const {
    const double x = std::log(y);
    if (x >= 0.0 || !left_available_) return direct(right_, x, h_scale, t_scale);
    return g_beta_ + direct(left_, x, h_scale, t_scale);
  }

 private:
  // Integrand for F1 at s = sigma + i tau: k(s) / s.
  std::vector<cplx> f1_integrand(double sigma, double h, std::size_t count) const {
    auto k = tf_->k_line(sigma, h, count);
    for (std::size_t n = 0; n < count; ++n) k[n] /= cplx(sigma, static_cast<double>(n) * h);
    return k;
  }

  // Integrand for F2 at u = sigma + i tau: k(-u) G(beta - u) / u, tau = n h, n >= 0;
  // the negative half uses k(-sigma + i tau) = conj k(-sigma - i tau).
  void f2_integrand(double sigma, double h, std::size_t count, std::vector<cplx>& pos,
                    std::vector<cplx>& neg) const {
    const auto k = tf_->k_line(-sigma, h, count);
    pos.resize(count);
    neg.resize(count);
    for (std::size_t n = 0; n < count; ++n) {
      const double tau = static_cast<double>(n) * h;
      const cplx up(sigma, tau), dn(sigma, -tau);
      const cplx gu = opt_.stub_gamma ? cplx{1.0, 0.0} : gamma_ratio_G(mu_, beta_ - up);
      const cplx gd = opt_.stub_gamma ? cplx{1.0, 0.0} : gamma_ratio_G(mu_, beta_ - dn);
      pos[n] = std::conj(k[n]) * gu / up;  // k(-sigma - i tau)
      neg[n] = k[n] * gd / dn;             // k(-sigma + i tau)
    }
  }

  // Smallest N with sum_{n > N} (|pos| + |neg|) h / 2pi * scale below tail_tol.
  std::ptrdiff_t choose_height(const std::vector<cplx>& pos, const std::vector<cplx>& neg,
                               std::size_t stride, double h, double scale) const {
    const std::size_t count = pos.size();
    double tail = 0.0;
    std::ptrdiff_t N = 0;
    std::size_t n = ((count - 1) / stride) * stride;
    for (; n > 0; n -= stride) {
      tail += (std::abs(pos[n]) + std::abs(neg[n])) * h / (2.0 * std::numbers::pi) * scale;
      if (tail >= opt_.tail_tol) {
        N = static_cast<std::ptrdiff_t>(n / stride);
        break;
      }
    }
    // The tail past the largest admissible height must itself be negligible.
    const std::size_t last = ((count - 1) / stride) * stride;
    const double edge = (std::abs(pos[last]) + std::abs(neg[last])) * scale;
    if (edge > opt_.converge_tol) {
      throw Error(Errc::QuadratureNotConverged, "contour integrand not decayed at the maximal height");
    }
    return N + 1;
  }

  detail::ContourGrid tabulate(std::vector<cplx> pos, std::vector<cplx> neg, double sigma, double h,
                               std::ptrdiff_t N) const {
    constexpr std::size_t stride = 2;
    detail::ContourGrid g;
    g.sigma = sigma;
    g.h = h;
    g.N = N;
    const std::size_t L =
        detail::next_pow2(std::max(2.0 * static_cast<double>(N) + 1.0, 2.0 * std::numbers::pi / (h * opt_.grid_step)));
    g.delta = 2.0 * std::numbers::pi / (h * static_cast<double>(L));
    g.x0 = -std::numbers::pi / h;  // makes exp(-i n h x0) = (-1)^n exactly
    std::vector<cplx> buf(L, cplx{0.0, 0.0});
    for (std::ptrdiff_t n = 0; n <= N; ++n) {
      const double sgn = (n % 2) ? -1.0 : 1.0;
      buf[static_cast<std::size_t>(n)] = sgn * pos[static_cast<std::size_t>(n) * stride];
      if (n > 0) buf[L - static_cast<std::size_t>(n)] = sgn * neg[static_cast<std::size_t>(n) * stride];
    }
    detail::dft(buf, FFTW_FORWARD);
    g.values.resize(L);
    for (std::size_t j = 0; j < L; ++j) {
      const double x = g.x0 + static_cast<double>(j) * g.delta;
      g.values[j] = h / (2.0 * std::numbers::pi) * std::exp(-sigma * x) * buf[j];
    }
    g.pos = std::move(pos);
    g.neg = std::move(neg);
    return g;
  }

  static cplx direct(const detail::ContourGrid& g, double x, double h_scale, double t_scale) {
    // h_scale in {1, 1/2}; t_scale in {1, 2}: the stored half-step integrand covers both.
    const double h = g.h * h_scale;
    const std::size_t stride = h_scale < 0.75 ? 1 : 2;
    const auto& pos = g.pos;
    const auto& neg = g.neg;
    auto N = static_cast<std::ptrdiff_t>(std::llround(static_cast<double>(g.N) * t_scale / h_scale));
    N = std::min<std::ptrdiff_t>(N, static_cast<std::ptrdiff_t>((pos.size() - 1) / stride));
    cplx acc = pos[0];
    for (std::ptrdiff_t n = 1; n <= N; ++n) {
      const double tau = static_cast<double>(n) * h;
      const cplx e = std::polar(1.0, -tau * x);
      acc += pos[static_cast<std::size_t>(n) * stride] * e + neg[static_cast<std::size_t>(n) * stride] * std::conj(e);
    }
    return h / (2.0 * std::numbers::pi) * std::exp(-g.sigma * x) * acc;
  }

  void build_f1() {
    const double hf = opt_.h1 / 2.0;
    const auto count = static_cast<std::size_t>(std::ceil(opt_.t_max / hf)) + 1;
    auto pos = f1_integrand(opt_.sigma1, hf, count);
    std::vector<cplx> neg(count);
    for (std::size_t n = 0; n < count; ++n) neg[n] = std::conj(pos[n]);
    const double scale = std::exp(opt_.sigma1 * tf_->width());
    const auto N = choose_height(pos, neg, 2, opt_.h1, scale);
    f1_ = tabulate(std::move(pos), std::move(neg), opt_.sigma1, opt_.h1, N);
    const double w = tf_->width();
    for (double frac : {-0.9, -0.5, 0.0, 0.5, 0.9}) verify(f1_, frac * w);
  }

  detail::ContourGrid build_f2_line(double sigma, bool left) {
    const double hf = opt_.h2 / 2.0;
    const auto count = static_cast<std::size_t>(std::ceil(opt_.t_max / hf)) + 1;
    std::vector<cplx> pos, neg;
    f2_integrand(sigma, hf, count, pos, neg);
    const auto N = choose_height(pos, neg, 2, opt_.h2, 1.0);
    auto g = tabulate(std::move(pos), std::move(neg), sigma, opt_.h2, N);
    const std::vector<double> xs = left ? std::vector<double>{-8.0, -3.0, -1.0, -0.1}
                                        : std::vector<double>{0.0, 0.5, 1.0, 2.0};
    for (double x : xs) verify(g, x);
    return g;
  }

  void verify(const detail::ContourGrid& g, double x) const {
    const cplx base = direct(g, x, 1.0, 1.0);
    const cplx taller = direct(g, x, 1.0, 2.0);
    const cplx finer = direct(g, x, 0.5, 1.0);
    const cplx tab = detail::interpolate(g, x, opt_.interp_points);
    const double dev = std::max({std::abs(taller - base), std::abs(finer - base), std::abs(tab - base)});
    if (dev > opt_.converge_tol) {
      throw Error(Errc::QuadratureNotConverged,
                  "contour sum moved by " + std::to_string(dev) + " under refinement");
    }
  }

  void locate_f2_tail() {
    f2_tail_ = 1.0;
    const auto& v = right_.values;
    for (std::size_t j = v.size(); j-- > 0;) {
      const double x = right_.x0 + static_cast<double>(j) * right_.delta;
      if (x < 0.0) break;
      if (x > right_.x_max() - 1.0) continue;
      if (std::abs(v[j]) >= opt_.weight_tol) {
        f2_tail_ = std::exp(x + right_.delta);
        break;
      }
    }
  }

  std::shared_ptr<const TestFunction> tf_;
  std::vector<double> mu_;
  cplx beta_;
  CutoffOptions opt_;
  cplx g_beta_{1.0, 0.0};
  bool left_available_ = false;
  detail::ContourGrid f1_, right_, left_;
  double f2_tail_ = 1.0;
};

/// e(pi (x) chi, s) = f^(1/2 - s) W chi(f) tau(chi)^n q^(-n s) for trivial central character.
inline cplx twisted_epsilon(const LSpec& spec, const DirichletCharacter* chi, cplx s) {
  if (!spec.root_number) throw Error(Errc::InvalidInput, "root number of the spec is not known");
  const double f = static_cast<double>(spec.conductor);
  cplx eps = std::pow(cplx(f, 0.0), 0.5 - s) * *spec.root_number;
  if (chi == nullptr || chi->conductor() == 1) return eps;
  const auto& pp = chi->group().modulus();
  if (spec.conductor % pp.p == 0) throw Error(Errc::ConductorNotCoprime, "twist modulus shares a prime with f");
  const double q = static_cast<double>(chi->conductor());
  const int n = static_cast<int>(spec.degree);
  return eps * (*chi)(static_cast<i64>(spec.conductor % pp.q)) * std::pow(gauss_sum(*chi), n) *
         std::pow(cplx(q, 0.0), -static_cast<double>(n) * s);
}

/// Both smoothed sums of the approximate functional equation, aggregated by residue
/// class mod q so that every character of modulus q is evaluated in O(q):
///   first[r]  = sum_{m = r (q)} a(m) m^-beta F1(m y / X),
///   second[r] = sum_{m = r (q)} a(m) m^(beta-1) F2(m / y).
struct TwistedSums {
  u64 q = 1;
  double X = 1.0;
  double y = 1.0;
  cplx beta;
  std::vector<cplx> first, second;
  std::size_t m1 = 0, m2 = 0;
  cplx polar{0.0, 0.0};
};

/// y balancing the two sum lengths e^w X / y and y Y2.
inline double balanced_y(const SmoothedCutoffs& cut, double X) {
  return std::sqrt(std::exp(cut.test_function().width()) * X / cut.f2_tail_point());
}

inline std::size_t afe_terms_needed(const SmoothedCutoffs& cut, double X, double y) {
  const double m1 = std::exp(cut.test_function().width()) * X / y;
  const double m2 = cut.f2_tail_point() * y;
  return static_cast<std::size_t>(std::ceil(std::max(m1, m2))) + 1;
}

inline TwistedSums twisted_sums(const LSpec& spec, const SmoothedCutoffs& cut, u64 q, double X, double y) {
  if (!(y > 0.0)) throw Error(Errc::InvalidInput, "balance parameter y must be positive");
  TwistedSums out;
  out.q = q;
  out.X = X;
  out.y = y;
  out.beta = cut.beta();
  out.first.assign(q, cplx{0.0, 0.0});
  out.second.assign(q, cplx{0.0, 0.0});
  const double w = cut.test_function().width();
  out.m1 = static_cast<std::size_t>(std::floor(std::exp(w) * X / y));
  out.m2 = static_cast<std::size_t>(std::floor(cut.f2_tail_point() * y));
  const std::size_t M = std::max(out.m1, out.m2);
  if (M > spec.max_m()) {
    throw Error(Errc::ParameterOutOfRange, "spec has " + std::to_string(spec.max_m()) +
                                               " coefficients, the evaluator needs " + std::to_string(M));
  }
  const cplx beta = cut.beta();
  constexpr std::size_t kChunks = 64;
  std::vector<std::vector<cplx>> part_first(kChunks), part_second(kChunks);
  parallel_chunks(kChunks, [&](std::size_t c) {
    auto& f = part_first[c];
    auto& g = part_second[c];
    f.assign(q, cplx{0.0, 0.0});
    g.assign(q, cplx{0.0, 0.0});
    const std::size_t lo = 1 + c * M / kChunks;
    const std::size_t hi = (c + 1) * M / kChunks;
    for (std::size_t m = lo; m <= hi; ++m) {
      const double a = spec.coeffs[m];
      if (a == 0.0) continue;
      const double lm = std::log(static_cast<double>(m));
      const std::size_t r = m % q;
      if (m <= out.m1) {
        const double f1 = cut.F1(static_cast<double>(m) * y / X);
        if (f1 != 0.0) f[r] += a * f1 * std::exp(-beta * lm);
      }
      if (m <= out.m2) g[r] += a * cut.F2(static_cast<double>(m) / y) * std::exp((beta - 1.0) * lm);
    }
  });
  for (std::size_t c = 0; c < kChunks; ++c) {
    for (std::size_t r = 0; r < q; ++r) {
      out.first[r] += part_first[c][r];
      out.second[r] += part_second[c][r];
    }
  }
  if (spec.polar_residue != 0.0 && q == 1) {  // only the untwisted sum has a pole
    const cplx one_minus = 1.0 - beta;
    out.polar = -spec.polar_residue * cut.test_function().k(one_minus) *
                std::exp(one_minus * std::log(X / y)) / one_minus;
  }
  return out;
}

/// chi(r) for r = 0..q-1, with q the modulus of chi's group (or {1} for the trivial twist).
inline std::vector<cplx> character_table(const DirichletCharacter* chi) {
  if (chi == nullptr) return {cplx{1.0, 0.0}};
  const u64 q = chi->group().modulus().q;
  std::vector<cplx> t(q, cplx{0.0, 0.0});
  for (u64 r = 1; r < q; ++r) t[r] = (*chi)(static_cast<i64>(r));
  return t;
}

struct AfeResult {
  cplx value;
  cplx first;   // sum chi(m) a(m) m^-beta F1
  cplx second;  // sum conj chi(m) a(m) m^(beta-1) F2, before the epsilon factor
  cplx eta;     // root number of the twisted L-function
  double X = 1.0;
  double y = 1.0;
  std::size_t terms_used = 0;
};

/// L = first + eta X^(1/2 - beta) second + polar.
inline AfeResult combine_afe(const TwistedSums& sums, const std::vector<cplx>& chi_table, cplx eta) {
  AfeResult res;
  cplx first{0.0, 0.0}, second{0.0, 0.0};
  for (std::size_t r = 0; r < sums.q; ++r) {
    first += chi_table[r] * sums.first[r];
    second += std::conj(chi_table[r]) * sums.second[r];
  }
  res.first = first;
  res.second = second;
  res.eta = eta;
  res.X = sums.X;
  res.y = sums.y;
  res.terms_used = std::max(sums.m1, sums.m2);
  res.value = first + eta * std::exp((0.5 - sums.beta) * std::log(sums.X)) * second + sums.polar;
  return res;
}

/// Root number of pi (x) chi for gcd(q, f) = 1: W chi(f) tau(chi)^n q^(-n/2).
inline cplx twisted_root_number(const LSpec& spec, const DirichletCharacter* chi) {
  if (!spec.root_number) throw Error(Errc::InvalidInput, "root number of the spec is not known");
  if (chi == nullptr || chi->conductor() == 1) return *spec.root_number;
  const auto& pp = chi->group().modulus();
  if (spec.conductor % pp.p == 0) throw Error(Errc::ConductorNotCoprime, "twist modulus shares a prime with f");
  if (!chi->is_primitive()) throw Error(Errc::NotPrimitive, "twist must be primitive");
  const int n = static_cast<int>(spec.degree);
  return *spec.root_number * (*chi)(static_cast<i64>(spec.conductor % pp.q)) * std::pow(gauss_sum(*chi), n) *
         std::pow(static_cast<double>(pp.q), -0.5 * n);
}

inline double analytic_conductor(const LSpec& spec, const DirichletCharacter* chi) {
  const double q = chi == nullptr ? 1.0 : static_cast<double>(chi->conductor());
  return static_cast<double>(spec.conductor) * std::pow(q, static_cast<double>(spec.degree));
}

/// L(pi (x) chi, beta) through the approximate functional equation; chi == nullptr is the
/// untwisted value. y defaults to the balanced choice.
inline AfeResult l_value_afe(const LSpec& spec, const SmoothedCutoffs& cut, const DirichletCharacter* chi,
                             std::optional<double> y = std::nullopt) {
  if (chi != nullptr && !chi->is_even()) {
    throw Error(Errc::ParameterOutOfRange, "the evaluator covers even twists only");
  }
  const cplx eta = twisted_root_number(spec, chi);
  const double X = analytic_conductor(spec, chi);
  const double yy = y.value_or(balanced_y(cut, X));
  const u64 q = chi == nullptr ? 1 : chi->group().modulus().q;
  const auto sums = twisted_sums(spec, cut, q, X, yy);
  return combine_afe(sums, character_table(chi), eta);
}

/// Solves L = A(y) + eta X^(1/2-beta) B(y) for eta from two balance parameters.
inline cplx solve_root_number(const AfeResult& r1, const AfeResult& r2, cplx beta) {
  const cplx scale = std::exp((0.5 - beta) * std::log(r1.X));
  const cplx den = scale * (r2.second - r1.second);
  if (std::abs(den) < 1e-12 * (std::abs(r1.first) + std::abs(r2.first) + 1e-300)) {
    throw Error(Errc::DivisionByNearZero, "balance parameters do not separate the two sums");
  }
  return (r1.first - r2.first) / den;
}

struct RootNumberReport {
  cplx raw;
  cplx value;  // snapped to +-1 when within tolerance
  bool snapped = false;
};

inline RootNumberReport snap_root_number(cplx w, double tol = 1e-6) {
  RootNumberReport rep{w, w, false};
  for (double s : {1.0, -1.0}) {
    if (std::abs(w - s) < tol) {
      rep.value = {s, 0.0};
      rep.snapped = true;
    }
  }
  return rep;
}

/// Root number of the untwisted spec from the y-dependence of the two sums.
inline RootNumberReport determine_root_number(const LSpec& spec, const SmoothedCutoffs& cut) {
  const double X = static_cast<double>(spec.conductor);
  const double y1 = balanced_y(cut, X);
  const double y2 = 3.0 * y1;
  const auto tbl = character_table(nullptr);
  const auto a1 = combine_afe(twisted_sums(spec, cut, 1, X, y1), tbl, {0.0, 0.0});
  const auto a2 = combine_afe(twisted_sums(spec, cut, 1, X, y2), tbl, {0.0, 0.0});
  return snap_root_number(solve_root_number(a1, a2, cut.beta()));
}

/// L(pi (x) chi, beta) when p divides the conductor of pi: the twisted conductor is taken
/// as f_(p') q^n and the root number is solved for from two balance parameters.
struct BadTwistResult {
  AfeResult afe;
  cplx eta;
  double eta_modulus_error = 0.0;
};

inline BadTwistResult l_value_bad_twist(const LSpec& spec, const SmoothedCutoffs& cut,
                                        const DirichletCharacter& chi) {
  const auto& pp = chi.group().modulus();
  u64 f_away = spec.conductor;
  while (f_away % pp.p == 0) f_away /= pp.p;
  const double X = static_cast<double>(f_away) * std::pow(static_cast<double>(chi.conductor()), spec.degree);
  const double y1 = balanced_y(cut, X);
  const double y2 = 1.7 * y1;
  const auto tbl = character_table(&chi);
  const auto s1 = twisted_sums(spec, cut, pp.q, X, y1);
  const auto s2 = twisted_sums(spec, cut, pp.q, X, y2);
  const auto r1 = combine_afe(s1, tbl, {0.0, 0.0});
  const auto r2 = combine_afe(s2, tbl, {0.0, 0.0});
  BadTwistResult out;
  out.eta = solve_root_number(r1, r2, cut.beta());
  out.eta_modulus_error = std::abs(std::abs(out.eta) - 1.0);
  out.afe = combine_afe(s1, tbl, out.eta);
  return out;
}

/// Gamma factor (2 pi)^-s pi^(-s/2) Gamma(s) Gamma(s/2) of L(Sym^2 E, s).
inline cplx symsq_gamma_factor(cplx s) {
  constexpr double pi = std::numbers::pi;
  return std::exp(-s * std::log(2.0 * pi) - s / 2.0 * std::log(pi) + lgamma_c(s) + lgamma_c(s / 2.0));
}

struct FeCheck {
  cplx s;
  cplx l_s, l_dual;          // L(Sym^2 E, chi, s) and L(Sym^2 E, conj chi, 3 - s)
  cplx lambda_s, lambda_dual;
  cplx W;                    // W(pi) chi(C) c^(1/2) tau(chi) / tau(conj chi)^2
  double residual = 0.0;
};

namespace detail {

inline FeCheck assemble_fe(const LSpec& spec, const DirichletCharacter* chi, cplx s, cplx l_s, cplx l_dual) {
  FeCheck fe;
  fe.s = s;
  fe.l_s = l_s;
  fe.l_dual = l_dual;
  const double c = chi == nullptr ? 1.0 : static_cast<double>(chi->conductor());
  const double Cc3 = static_cast<double>(spec.conductor) * c * c * c;
  auto lambda = [&](cplx z, cplx L) { return std::exp(z / 2.0 * std::log(Cc3)) * symsq_gamma_factor(z) * L; };
  fe.lambda_s = lambda(s, l_s);
  fe.lambda_dual = lambda(3.0 - s, l_dual);
  cplx W = *spec.root_number;
  if (chi != nullptr && chi->conductor() > 1) {
    const auto& pp = chi->group().modulus();
    const cplx tau = gauss_sum(*chi);
    const cplx taubar = gauss_sum(chi->conj());
    W *= (*chi)(static_cast<i64>(spec.conductor % pp.q)) * std::sqrt(c) * tau / (taubar * taubar);
  }
  fe.W = W;
  fe.residual = std::abs(fe.lambda_s - W * fe.lambda_dual) /
                (std::abs(fe.lambda_s) + std::abs(fe.lambda_dual) + 1e-30);
  return fe;
}

inline void check_fe_inputs(const LSpec& spec, const DirichletCharacter* chi) {
  if (!spec.root_number) throw Error(Errc::InvalidInput, "root number of the spec is not known");
  if (chi != nullptr && spec.conductor % chi->group().modulus().p == 0) {
    throw Error(Errc::ConductorNotCoprime, "conductor of chi must be prime to N");
  }
}

}  // namespace detail

/// Completed Lambda(Sym^2 E, chi, s) on both sides of s <-> 3 - s from two independent
/// evaluator runs (different beta, different y) and the residual of the functional equation.
inline FeCheck completed_lambda_and_fe(const LSpec& spec, std::shared_ptr<const TestFunction> tf,
                                       const DirichletCharacter* chi, cplx s, CutoffOptions opt = {},
                                       double dual_spread = 1.37) {
  detail::check_fe_inputs(spec, chi);
  const SmoothedCutoffs cut1(tf, spec.mu, s - 1.0, opt);
  const SmoothedCutoffs cut2(tf, spec.mu, 2.0 - s, opt);
  const double X = analytic_conductor(spec, chi);
  std::optional<DirichletCharacter> chibar;
  if (chi != nullptr) chibar = chi->conj();
  const DirichletCharacter* cb = chibar ? &*chibar : nullptr;
  const auto r1 = l_value_afe(spec, cut1, chi);
  const auto r2 = l_value_afe(spec, cut2, cb, dual_spread * balanced_y(cut2, X));
  return detail::assemble_fe(spec, chi, s, r1.value, r2.value);
}

/// The same check for many characters; characters sharing modulus and conductor share the
/// two smoothed sums, so each extra character costs O(q).
inline std::vector<FeCheck> completed_lambda_and_fe(const LSpec& spec, std::shared_ptr<const TestFunction> tf,
                                                    const std::vector<DirichletCharacter>& chars, cplx s,
                                                    CutoffOptions opt = {}, double dual_spread = 1.37) {
  const SmoothedCutoffs cut1(tf, spec.mu, s - 1.0, opt);
  const SmoothedCutoffs cut2(tf, spec.mu, 2.0 - s, opt);
  std::map<std::pair<u64, u64>, std::pair<TwistedSums, TwistedSums>> cache;  // (q, conductor) -> sums
  std::vector<FeCheck> out;
  out.reserve(chars.size());
  for (const auto& chi : chars) {
    detail::check_fe_inputs(spec, &chi);
    if (!chi.is_even()) throw Error(Errc::ParameterOutOfRange, "the evaluator covers even twists only");
    const u64 q = chi.group().modulus().q;
    const double X = analytic_conductor(spec, &chi);
    auto it = cache.find({q, chi.conductor()});
    if (it == cache.end()) {
      auto s1 = twisted_sums(spec, cut1, q, X, balanced_y(cut1, X));
      auto s2 = twisted_sums(spec, cut2, q, X, dual_spread * balanced_y(cut2, X));
      it = cache.emplace(std::make_pair(q, chi.conductor()), std::make_pair(std::move(s1), std::move(s2))).first;
    }
    const auto chibar = chi.conj();
    const auto r1 = combine_afe(it->second.first, character_table(&chi), twisted_root_number(spec, &chi));
    const auto r2 = combine_afe(it->second.second, character_table(&chibar), twisted_root_number(spec, &chibar));
    out.push_back(detail::assemble_fe(spec, &chi, s, r1.value, r2.value));
  }
  return out;
}

/// Sym^2 spec with enough coefficients for every conductor p^a, a <= a_max, with root
/// number solved for numerically.
inline LSpec symsq_spec_for(const EllipticCurve& E, std::size_t M, const SmoothedCutoffs& cut_half) {
  LSpec spec = unitarize_gl3(E, M);
  const auto rn = determine_root_number(spec, cut_half);
  if (!rn.snapped) {
    throw Error(Errc::QuadratureNotConverged, "root number of Sym^2 is not +-1 to 1e-6");
  }
  spec.root_number = rn.value;
  return spec;
}

}  // namespace symtwist
