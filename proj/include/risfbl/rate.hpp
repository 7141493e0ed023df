#pragma once

/**
 * Finite-blocklength rate of a quasi-static AWGN use and its average over a
 * Gamma-distributed SNR.
 *
 *   R(γ) = C(γ) - Q^{-1}(ε)·√(V(γ)/r),   C = log2(1+γ),
 *   V(γ) = (log2 e)^2 (1 - (1+γ)^{-2}).
 *
 * The average R̄ = r1 - (Q^{-1}(ε)/√r)·r2 with r1 = E[C(γ)], r2 = E[√V(γ)]
 * (the O(log r / r) correction is dropped). Three evaluations are offered:
 *
 *  - avg_rate_exact: the Kummer-U series
 *      r1 = (1/ln2) Σ_{k>=1} p_k / k,      p_k = E[(γ/(1+γ))^k]
 *                                             = β^α/Γ(α)·Γ(k+α)U(k+α,1+α,β)
 *      r2 = (1/ln2) Σ_{n>=0} c_n w_{2n},   w_m = E[(1+γ)^{-m}]
 *                                             = β^α U(α, 1+α-m, β)
 *    with c_n = (-1)^n (1/2 choose n). Terms come from the contiguous
 *    relations of U, each run in its numerically stable direction.
 *  - avg_rate_lower_bound: the closed form built on Jensen's inequality for r1
 *    and a first-order Taylor bound for r2.
 *  - avg_rate_quadrature: direct integration against the Gamma density.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <limits>
#include <numbers>
#include <vector>

#include "risfbl/error.hpp"
#include "risfbl/quadrature.hpp"
#include "risfbl/snrstats.hpp"
#include "risfbl/specfun.hpp"

namespace risfbl {

struct FblParams {
  std::int64_t blocklength = 100; // r, channel uses
  std::int64_t payload_bits = 80; // L, reporting only
  double epsilon = 1e-9;

  void validate() const {
    if (blocklength < 100)
      throw DomainError("FblParams: blocklength r must be >= 100");
    if (payload_bits < 1)
      throw DomainError("FblParams: payload L must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0))
      throw DomainError("FblParams: epsilon must lie in (0, 1)");
  }

  /// Q^{-1}(ε)/√r, the factor multiplying √V.
  double penalty() const {
    validate();
    return inv_q(epsilon) / std::sqrt(static_cast<double>(blocklength));
  }
};

struct SeriesDiagnostics {
  std::size_t r1_terms = 0;
  std::size_t r2_terms = 0;
  bool fallback = false; // a series hit max_terms; values come from quadrature
};

struct RateBreakdown {
  double r1 = 0.0;       // bpcu
  double r2 = 0.0;       // bpcu, before the Q^{-1}(ε)/√r factor
  double avg_rate = 0.0; // bpcu
  SeriesDiagnostics diagnostics;
};

inline double capacity(double gamma) {
  if (!(gamma >= 0.0))
    throw DomainError("capacity: SNR must be non-negative");
  return std::log1p(gamma) / std::numbers::ln2;
}

inline double dispersion(double gamma) {
  if (!(gamma >= 0.0))
    throw DomainError("dispersion: SNR must be non-negative");
  constexpr double log2e_sq = std::numbers::log2e * std::numbers::log2e;
  // 1 - t^2 = (1 - t)(1 + t) with t = 1/(1+γ), exact for tiny γ
  const double t = 1.0 / (1.0 + gamma);
  return log2e_sq * (gamma * t) * (1.0 + t);
}

/// Rate for SNR γ given the precomputed penalty factor Q^{-1}(ε)/√r.
inline double fbl_rate_with_penalty(double gamma, double penalty) {
  return capacity(gamma) - penalty * std::sqrt(dispersion(gamma));
}

/// May be negative at low SNR; clamping is left to the caller.
inline double fbl_rate(double gamma, const FblParams &p) {
  return fbl_rate_with_penalty(gamma, p.penalty());
}

namespace detail {

struct SeriesSum {
  double value = 0.0;
  std::size_t terms = 0;
  bool capped = false;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// A term at index k is negligible when |term|·(k+1) falls below the
/// tolerance: for terms decaying like k^{-q} that bounds the whole tail, not
/// just the next term. Three negligible terms in a row end the series.
class TruncationRule {
public:
  explicit TruncationRule(const SeriesControl &c) : ctrl_(c) {}

  bool stop(double term, std::size_t k, double partial_sum) {
    const double bound = std::max(ctrl_.abs_tol, ctrl_.rel_tol * std::abs(partial_sum));
    if (std::abs(term) * static_cast<double>(k + 1) < bound)
      ++run_;
    else
      run_ = 0;
    return run_ >= 3;
  }

private:
  SeriesControl ctrl_;
  int run_ = 0;
};

/// Σ_{k>=1} p_k/k. p_k solves
///   k·p_{k+1} = (2k+α-1+β)·p_k - (k-1+α)·p_{k-1},  p_0 = 1,
/// as its minimal solution, so ratios p_k/p_{k-1} are generated backward from
/// a cut-off K (Miller's algorithm) and K is doubled until the sum settles.
inline SeriesSum r1_series(double alpha, double beta, const SeriesControl &ctrl) {
  std::vector<double> ratio;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t cutoff = 64;; cutoff *= 2) {
    const std::size_t k_max = std::min(cutoff, ctrl.max_terms);
    ratio.assign(k_max + 1, 0.0);
    double next = 0.0;
    for (std::size_t k = k_max; k >= 1; --k) {
      const double kk = static_cast<double>(k);
      next = (kk - 1.0 + alpha) / ((2.0 * kk + alpha - 1.0 + beta) - kk * next);
      ratio[k] = next;
    }

    CompensatedSum sum;
    TruncationRule rule(ctrl);
    double p = 1.0;
    bool stopped = false;
    std::size_t used = k_max;
    for (std::size_t k = 1; k <= k_max; ++k) {
      p *= ratio[k];
      const double term = p / static_cast<double>(k);
      sum.add(term);
      if (rule.stop(term, k, sum.value())) {
        stopped = true;
        used = k;
        break;
      }
    }
    const double value = sum.value();
    if (stopped && std::abs(value - previous) <= ctrl.rel_tol * std::abs(value))
      return {value, used, false};
    if (k_max >= ctrl.max_terms)
      return {value, used, !stopped};
    previous = value;
  }
}

/// ln w_m = ln E[(1+γ)^{-m}] by quadrature, γ ~ Gamma(α, β).
inline double log_inverse_moment(double m, double alpha, double beta,
                                 const QuadratureSpec &spec) {
  auto log_h = [m](double log_y) { return -m * log1p_exp(log_y); };
  const auto r = log_gamma_expectation(alpha, beta, log_h, spec);
  if (!r.converged)
    throw NonConvergenceError("log_inverse_moment: quadrature did not converge");
  return r.log_value;
}

/// Σ_{n>=0} c_n w_{2n}. The w_m obey
///   m·w_{m+1} = (m-α-β)·w_m + β·w_{m-1},  w_0 = 1.
/// Below m0 ≈ α+β the sequence is recessive and the ratios w_m/w_{m-1} are
/// run downward from one quadrature-anchored ratio at m0; above m0 it is
/// dominant and the recurrence runs upward.
inline SeriesSum r2_series(double alpha, double beta, const SeriesControl &ctrl,
                           const QuadratureSpec &spec) {
  const double ab = alpha + beta;
  const auto m0 = static_cast<std::size_t>(std::ceil(ab)) + 1;
  std::vector<double> log_ratio(m0 + 2, 0.0);
  double sigma = std::exp(log_inverse_moment(static_cast<double>(m0 + 1), alpha, beta, spec) -
                          log_inverse_moment(static_cast<double>(m0), alpha, beta, spec));
  log_ratio[m0 + 1] = std::log(sigma);
  for (std::size_t m = m0; m >= 1; --m) {
    const double mm = static_cast<double>(m);
    sigma = beta / (mm * sigma - (mm - ab));
    log_ratio[m] = std::log(sigma);
  }

  CompensatedSum sum;
  sum.add(1.0); // c_0 w_0
  TruncationRule rule(ctrl);
  double log_w = 0.0;
  double sigma_fwd = std::exp(log_ratio[m0 + 1]);
  std::size_t m = 0;
  double c = 1.0;
  auto advance = [&] {
    if (m + 1 <= m0 + 1) {
      log_w += log_ratio[m + 1];
    } else {
      const double mm = static_cast<double>(m);
      sigma_fwd = ((mm - ab) + beta / sigma_fwd) / mm;
      log_w += std::log(sigma_fwd);
    }
    ++m;
  };
  for (std::size_t n = 1; n < ctrl.max_terms; ++n) {
    advance();
    advance();
    c *= (static_cast<double>(n) - 1.5) / static_cast<double>(n);
    const double term = c * std::exp(log_w);
    sum.add(term);
    if (rule.stop(term, n, sum.value()))
      return {sum.value(), n + 1, false};
  }
  return {sum.value(), ctrl.max_terms, true};
}

inline double log_capacity_nats(double log_y) {
  // ln ln(1+y); for tiny y, ln(1+y) = y to double precision
  return log_y < -40.0 ? log_y : std::log(log1p_exp(log_y));
}

inline double log_sqrt_dispersion_nats(double log_y) {
  // ln √(1-(1+y)^{-2}) = ½[ln y + ln(2+y)] - ln(1+y)
  return 0.5 * (log_y + std::numbers::ln2 + log1p_exp(log_y - std::numbers::ln2)) -
         log1p_exp(log_y);
}

} // namespace detail

/// Reference evaluation of r1 and r2 by adaptive quadrature against the
/// Gamma(α, β) density (rate convention).
inline RateBreakdown avg_rate_quadrature(const GammaParams &g, const FblParams &p,
                                         const QuadratureSpec &spec = {}) {
  g.validate();
  const double penalty = p.penalty();
  const auto q1 = log_gamma_expectation(g.shape, g.rate, detail::log_capacity_nats, spec);
  const auto q2 = log_gamma_expectation(g.shape, g.rate, detail::log_sqrt_dispersion_nats, spec);
  if (!q1.converged || !q2.converged)
    throw NonConvergenceError("avg_rate_quadrature: subdivision cap reached");
  RateBreakdown out;
  out.r1 = std::exp(q1.log_value) / std::numbers::ln2;
  out.r2 = std::exp(q2.log_value) / std::numbers::ln2;
  out.avg_rate = out.r1 - penalty * out.r2;
  return out;
}

/// Average rate from the Kummer-U series (exact for a Gamma-distributed SNR).
/// If either series needs more than ctrl.max_terms terms, the result falls
/// back to avg_rate_quadrature with a warning on stderr and
/// diagnostics.fallback set, or throws when ctrl.on_cap says so.
inline RateBreakdown avg_rate_exact(const GammaParams &g, const FblParams &p,
                                    const SeriesControl &ctrl = {},
                                    const QuadratureSpec &spec = {}) {
  g.validate();
  ctrl.validate();
  const double penalty = p.penalty();
  const auto s1 = detail::r1_series(g.shape, g.rate, ctrl);
  const auto s2 = detail::r2_series(g.shape, g.rate, ctrl, spec);

  RateBreakdown out;
  out.diagnostics.r1_terms = s1.terms;
  out.diagnostics.r2_terms = s2.terms;
  if (s1.capped || s2.capped) {
    if (ctrl.on_cap == SeriesControl::OnCap::throw_error)
      throw NonConvergenceError("avg_rate_exact: series did not converge within max_terms");
    std::cerr << "warning: avg_rate_exact: series cap reached (alpha=" << g.shape
              << ", beta=" << g.rate << "); using quadrature\n";
    const auto diag = out.diagnostics;
    out = avg_rate_quadrature(g, p, spec);
    out.diagnostics = diag;
    out.diagnostics.fallback = true;
    return out;
  }
  out.r1 = s1.value / std::numbers::ln2;
  out.r2 = s2.value / std::numbers::ln2;
  out.avg_rate = out.r1 - penalty * out.r2;
  return out;
}

/// Closed-form lower bound:
///   r̃1 = log2(1 + α²/(β(α+1))),
///   r̃2 = (2 - β + β(α+β-1)·e^β E_α(β)) / (2 ln 2).
/// e^β E_α(β) is evaluated as one scaled quantity, never as a product.
inline RateBreakdown avg_rate_lower_bound(const GammaParams &g, const FblParams &p) {
  g.validate();
  const double penalty = p.penalty();
  const double a = g.shape, b = g.rate;
  RateBreakdown out;
  out.r1 = std::log1p(a * a / (b * (a + 1.0))) / std::numbers::ln2;
  const double f = scaled_exp_integral(a, b);
  if (!std::isfinite(f))
    throw OverflowError("avg_rate_lower_bound: e^beta E_alpha(beta) not representable");
  out.r2 = (2.0 - b + b * (a + b - 1.0) * f) / (2.0 * std::numbers::ln2);
  out.avg_rate = out.r1 - penalty * out.r2;
  return out;
}

} // namespace risfbl
