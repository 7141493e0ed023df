#pragma once

/**
 * Moments of the composite power gain X = |h|^2 under perfect phase alignment
 * and the Gamma law matched to them.
 *
 * Gamma parameters use the RATE convention throughout:
 *   f(u) = β^α u^{α-1} e^{-βu} / Γ(α),  mean α/β,  E[u^2] = α(α+1)/β^2.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

#include "risfbl/channel.hpp"
#include "risfbl/error.hpp"
#include "risfbl/specfun.hpp"

namespace risfbl {

struct MomentPair {
  double m1 = 0.0; // E[X]
  double m2 = 0.0; // E[X^2]
};

struct GammaParams {
  double shape = 1.0; // α
  double rate = 1.0;  // β

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }

  void validate() const {
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
      throw DegenerateDistributionError("GammaParams: shape and rate must be finite and positive");
  }
};

/// Cross term between the direct path and the coherent RIS sum in E[X].
/// `corrected` uses 2·E|h_d|·N·E|h_n|E|g_n| = (π^{3/2} N / 4)√(ςϱϑ), the value
/// a direct expansion and simulation both give; `reduced` uses the
/// (πN/4)√(ςϱϑ) coefficient, which undershoots by √π.
enum class MomentForm { corrected, reduced };

namespace detail {

template <std::size_t K> double sum_smallest_first(std::array<double, K> terms) {
  std::sort(terms.begin(), terms.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  double s = 0.0;
  for (double t : terms)
    s += t;
  return s;
}

} // namespace detail

/// E[X] and E[X^2] of X = |h_d + Σ|h_n||g_n||^2 (phases aligned).
inline MomentPair moments_x(const LinkGains &gains, std::size_t n,
                            MomentForm form = MomentForm::corrected) {
  gains.validate();
  if (n < 1)
    throw DomainError("moments_x: N >= 1 required");
  constexpr double pi = std::numbers::pi;
  const double pi15 = pi * std::sqrt(pi);
  const double N = static_cast<double>(n);
  const double s = gains.direct;
  const double pt = gains.ap_ris * gains.ris_ac; // ϱϑ
  // √(ςϱϑ) and friends built from square roots so no intermediate underflows.
  const double rs = std::sqrt(s), rpt = std::sqrt(gains.ap_ris) * std::sqrt(gains.ris_ac);
  const double cross = rs * rpt;

  const double cross_coef = form == MomentForm::corrected ? pi15 * N / 4.0 : pi * N / 4.0;
  const double m1 = detail::sum_smallest_first<4>(
      {s, N * pt, pi * pi * N * (N - 1.0) / 16.0 * pt, cross_coef * cross});

  const double pt2_poly = pi * pi * pi * pi * (N - 3.0) * (N - 2.0) * (N - 1.0) +
                          48.0 * pi * pi * (2.0 * N - 1.0) * (N - 1.0) + 768.0 * N + 256.0;
  const double m2 = detail::sum_smallest_first<5>({
      2.0 * s * s,
      s * pt * N * (6.0 + 3.0 * (N - 1.0) * pi * pi / 8.0),
      3.0 * N * pi15 / 4.0 * (s * cross),
      (pt * pt) * N / 256.0 * pt2_poly,
      (cross * pt) * N * pi15 / 32.0 * (pi * pi * (N - 2.0) * (N - 1.0) + 48.0 * N - 12.0),
  });
  if (!std::isfinite(m1) || !std::isfinite(m2))
    throw OverflowError("moments_x: moments exceed the double range");
  return {m1, m2};
}

inline GammaParams gamma_match(const MomentPair &m) {
  const double var = m.m2 - m.m1 * m.m1;
  if (!(m.m1 > 0.0) || !(var > 0.0) || !std::isfinite(var))
    throw DegenerateDistributionError("gamma_match: need m1 > 0 and m2 > m1^2");
  return {m.m1 * m.m1 / var, m.m1 / var};
}

/// Law of γ = ρX: same shape, rate divided by ρ.
inline GammaParams snr_params(const MomentPair &m, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw DomainError("snr_params: rho must be finite and positive");
  GammaParams g = gamma_match(m);
  g.rate /= rho;
  return g;
}

inline double gamma_pdf(const GammaParams &g, double x) {
  g.validate();
  if (!(x >= 0.0))
    throw DomainError("gamma_pdf: x must be non-negative");
  if (x == 0.0)
    return g.shape < 1.0 ? std::numeric_limits<double>::infinity()
                         : (g.shape == 1.0 ? g.rate : 0.0);
  if (std::isinf(x))
    return 0.0;
  return std::exp(g.shape * std::log(g.rate) + (g.shape - 1.0) * std::log(x) -
                  g.rate * x - ln_gamma(g.shape));
}

inline double gamma_cdf(const GammaParams &g, double x) {
  g.validate();
  if (!(x >= 0.0))
    throw DomainError("gamma_cdf: x must be non-negative");
  if (x == 0.0)
    return 0.0;
  if (std::isinf(x))
    return 1.0;
  return regularized_gamma_p(g.shape, g.rate * x);
}

} // namespace risfbl
