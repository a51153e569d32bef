#pragma once

// Complex log-gamma and Gauss-Legendre rules.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace symtwist {

/// log Gamma(z) up to a multiple of 2 pi i. Lanczos (g = 7, n = 9) on Re z >= 1/2,
/// reflection elsewhere with log sin written to stay finite for large |Im z|.
inline std::complex<double> lgamma_c(std::complex<double> z) {
  using C = std::complex<double>;
  constexpr double pi = std::numbers::pi;
  if (z.real() < 0.5) {
    // log sin(pi z) = -i pi z + log(1 - e^{2 pi i z}) - log(2i) in the upper half plane;
    // the lower half plane follows by conjugation.
    const bool upper = z.imag() >= 0.0;
    const C w = upper ? z : std::conj(z);
    const C e2 = std::exp(C(0.0, 2.0 * pi) * w);
    C logsin = C(0.0, -pi) * w + std::log(C(1.0, 0.0) - e2) - std::log(C(0.0, 2.0));
    if (!upper) logsin = std::conj(logsin);
    return std::log(pi) - logsin - lgamma_c(C(1.0, 0.0) - z);
  }
  static constexpr std::array<double, 9> coef = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  const C zm = z - 1.0;
  C x = coef[0];
  for (int i = 1; i < 9; ++i) x += coef[i] / (zm + static_cast<double>(i));
  const C t = zm + 7.5;
  return 0.5 * std::log(2.0 * pi) + (zm + 0.5) * std::log(t) - t + std::log(x);
}

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule on [-1, 1] by Newton iteration on P_n.
inline GaussLegendre gauss_legendre(std::size_t n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace symtwist
