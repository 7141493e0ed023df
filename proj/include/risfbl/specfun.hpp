#pragma once

/**
 * Real-argument special functions used by the rate analysis: ln Γ, the
 * regularized and upper incomplete gamma functions, the generalized
 * exponential integral E_ν, Tricomi's confluent hypergeometric U, the Gaussian
 * tail Q and its inverse, and binomial coefficients of order 1/2.
 *
 * All functions are pure; none touch global state (lgamma_r is used instead of
 * lgamma so that signgam is never written).
 */

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

#include <math.h>

#include "risfbl/error.hpp"
#include "risfbl/quadrature.hpp"

namespace risfbl {

/// Truncation policy for the infinite series of the average-rate analysis.
struct SeriesControl {
  enum class OnCap { quadrature_fallback, throw_error };

  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_terms = std::size_t{1} << 23;
  OnCap on_cap = OnCap::quadrature_fallback;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol >= 0.0) || max_terms < 1)
      throw DomainError("SeriesControl: rel_tol > 0, abs_tol >= 0, "
                        "max_terms >= 1 required");
  }
};

inline double ln_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0)
    throw DomainError("ln_gamma: x must be finite and positive");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

namespace detail {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;
inline constexpr double tiny = 1e-300;
inline constexpr int max_iterations = 1000000;

/// log(1 + e^u) without overflow.
inline double log1p_exp(double u) {
  return u > 35.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

/// Series for the regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
inline double gamma_p_series(double a, double x) {
  if (x == 0.0)
    return 0.0;
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < max_iterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17)
      return sum * std::exp(-x + a * std::log(x) - ln_gamma(a));
  }
  throw NonConvergenceError("gamma_p_series: no convergence");
}

/// Legendre continued fraction for Γ(a, x)·x^{-a}·e^{x} (modified Lentz).
/// Valid for every real a and x > 0; converges quickly once x >~ 1 or x > a.
inline double gamma_q_continued_fraction_scaled(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < max_iterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny)
      d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny)
      c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16)
      return h;
  }
  throw NonConvergenceError("gamma_q_continued_fraction: no convergence");
}

/// e^z E_ν(z) for ν in [0.5, 1.5) and 0 < z <= 1.
///
/// Uses E_ν(z) = Γ(1-ν) z^{ν-1} - Σ_k (-z)^k / (k! (1-ν+k)); with ε = ν - 1
/// the k = 0 term and Γ(-ε) z^ε combine to -expm1(ln Γ(1-ε) + ε ln z)/ε,
/// which stays finite through ε = 0.
inline double scaled_exp_integral_small_z(double nu, double z) {
  const double eps = nu - 1.0;
  const double lnz = std::log(z);
  double head;
  if (eps == 0.0) {
    head = -euler_gamma - lnz;
  } else {
    head = -std::expm1(ln_gamma(1.0 - eps) + eps * lnz) / eps;
  }
  double sum = 0.0;
  double power = 1.0; // (-z)^k / k!
  for (int k = 1; k < 200; ++k) {
    power *= -z / k;
    const double term = power / (k - eps);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(head - sum))
      break;
  }
  return std::exp(z) * (head - sum);
}

} // namespace detail

/// Regularized lower incomplete gamma P(a, x) = γ(a, x)/Γ(a).
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a) || !(x >= 0.0) || std::isnan(x))
    throw DomainError("regularized_gamma_p: a > 0 and x >= 0 required");
  if (x == 0.0)
    return 0.0;
  if (std::isinf(x))
    return 1.0;
  if (x < a + 1.0)
    return detail::gamma_p_series(a, x);
  const double q = std::exp(-x + a * std::log(x) - ln_gamma(a)) *
                   detail::gamma_q_continued_fraction_scaled(a, x);
  return 1.0 - q;
}

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x)/Γ(a).
inline double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a) || !(x >= 0.0) || std::isnan(x))
    throw DomainError("regularized_gamma_q: a > 0 and x >= 0 required");
  if (x == 0.0)
    return 1.0;
  if (std::isinf(x))
    return 0.0;
  if (x < a + 1.0)
    return 1.0 - detail::gamma_p_series(a, x);
  return std::exp(-x + a * std::log(x) - ln_gamma(a)) *
         detail::gamma_q_continued_fraction_scaled(a, x);
}

/// e^z·E_ν(z) for real ν and z > 0. This is the form the rate lower bound
/// consumes; it never overflows for ν >= 0.
inline double scaled_exp_integral(double nu, double z) {
  if (!std::isfinite(nu) || !(z > 0.0) || !std::isfinite(z))
    throw DomainError("exp_integral: z must be finite and positive");
  const double a = 1.0 - nu; // E_ν(z) = z^{ν-1} Γ(1-ν, z)
  if (a > 0.5 && z < a + 1.0) {
    // ν < 1/2 with z left of the Gamma(a) bulk: Γ(a, z) = Γ(a)·Q(a, z).
    // Below a = 1/2, Q(a, z) = 1 - P loses digits as a -> 0.
    const double q = 1.0 - detail::gamma_p_series(a, z);
    const double log_value = ln_gamma(a) + std::log(q) - a * std::log(z) + z;
    if (log_value > std::log(std::numeric_limits<double>::max()))
      throw OverflowError("exp_integral: result overflows");
    return std::exp(log_value);
  }
  if (z >= 1.0)
    return detail::gamma_q_continued_fraction_scaled(a, z);
  // z < 1 and ν >= 1/2: start in [0.5, 1.5) and step up with
  // F_{ν+1} = (1 - z F_ν)/ν, which damps errors by z/ν < 1.
  const double shift = std::floor(nu - 0.5);
  double order = nu - shift;
  double f = detail::scaled_exp_integral_small_z(order, z);
  for (double s = 0; s < shift; s += 1.0) {
    f = (1.0 - z * f) / order;
    order += 1.0;
  }
  return f;
}

/// Generalized exponential integral E_ν(z) = ∫_1^∞ e^{-zt} t^{-ν} dt.
inline double exp_integral(double nu, double z) {
  return std::exp(-z) * scaled_exp_integral(nu, z);
}

/// ln Γ(a, z) for real a and z > 0.
inline double log_upper_incomplete_gamma(double a, double z) {
  if (!std::isfinite(a) || !(z > 0.0) || std::isnan(z))
    throw DomainError("upper_incomplete_gamma: z must be positive");
  if (std::isinf(z))
    return -std::numeric_limits<double>::infinity();
  if (a > 0.5 && z < a + 1.0)
    return ln_gamma(a) + std::log1p(-detail::gamma_p_series(a, z));
  // Γ(a, z) = z^a e^{-z} · [e^z E_{1-a}(z)]
  return a * std::log(z) - z + std::log(scaled_exp_integral(1.0 - a, z));
}

/// Γ(a, z) = ∫_z^∞ t^{a-1} e^{-t} dt, a any finite real, z > 0.
inline double upper_incomplete_gamma(double a, double z) {
  const double log_value = log_upper_incomplete_gamma(a, z);
  if (log_value > std::log(std::numeric_limits<double>::max()))
    throw OverflowError("upper_incomplete_gamma: result overflows");
  return std::exp(log_value);
}

/// ln E[h(Y)] for Y ~ Gamma(shape, rate), given ln h. Integrates in
/// s = ln(rate·y), where the integrand exp(ln h + shape·s - e^s) is unimodal
/// for every h used in this library.
template <class LogH>
LogQuadratureResult log_gamma_expectation(double shape, double rate,
                                          LogH &&log_h,
                                          const QuadratureSpec &spec = {}) {
  const double log_rate = std::log(rate);
  auto integrand = [&](double s) {
    return log_h(s - log_rate) + shape * s - std::exp(s);
  };
  auto r = integrate_log_unimodal(integrand, std::log(shape), spec);
  r.log_value -= ln_gamma(shape);
  return r;
}

/// ln U(a, b, z) from U = (1/Γ(a)) ∫_0^∞ (1+u)^{b-a-1} u^{a-1} e^{-zu} du.
inline double log_kummer_u(double a, double b, double z,
                           const QuadratureSpec &spec = {}) {
  if (!(a > 0.0) || !std::isfinite(a) || !(z > 0.0) || !std::isfinite(z) ||
      !std::isfinite(b))
    throw DomainError("kummer_u: a > 0, z > 0 and finite b required");
  const double c = b - a - 1.0;
  const double log_z = std::log(z);
  // u = y/z with y ~ Gamma(a, 1): U = z^{-a} E[(1 + y/z)^c]
  auto log_h = [&](double log_y) {
    return c == 0.0 ? 0.0 : c * detail::log1p_exp(log_y - log_z);
  };
  const auto r = log_gamma_expectation(a, 1.0, log_h, spec);
  if (!r.converged)
    throw NonConvergenceError("kummer_u: subdivision cap reached");
  return -a * log_z + r.log_value;
}

inline double kummer_u(double a, double b, double z,
                       const QuadratureSpec &spec = {}) {
  const double log_value = log_kummer_u(a, b, z, spec);
  if (log_value > std::log(std::numeric_limits<double>::max()))
    throw OverflowError("kummer_u: result overflows");
  return std::exp(log_value);
}

/// ln[Γ(k+α)·U(k+α, 1+α, β)] evaluated as the single integral
/// ∫_0^∞ (u/(1+u))^k u^{α-1} e^{-βu} du, which stays bounded where Γ(k+α)
/// alone would overflow.
inline double log_gamma_times_kummer_u(double k, double alpha, double beta,
                                       const QuadratureSpec &spec = {}) {
  if (!(k >= 0.0) || !(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(k) ||
      !std::isfinite(alpha) || !std::isfinite(beta))
    throw DomainError("log_gamma_times_kummer_u: k >= 0, alpha > 0, beta > 0");
  // (u/(1+u))^k with u = e^t:  k·(t - log(1 + e^t))
  auto log_h = [&](double log_u) {
    return k == 0.0 ? 0.0 : -k * detail::log1p_exp(-log_u);
  };
  const auto r = log_gamma_expectation(alpha, beta, log_h, spec);
  if (!r.converged)
    throw NonConvergenceError("log_gamma_times_kummer_u: no convergence");
  return r.log_value + ln_gamma(alpha) - alpha * std::log(beta);
}

/// Upper-tail standard normal probability Q(x).
inline double q_function(double x) {
  if (std::isnan(x))
    throw DomainError("q_function: NaN argument");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

namespace detail {

/// Lower-tail normal quantile, rational approximation with |rel err| < 1.2e-9
/// (P. J. Acklam). Only the seed for Newton refinement.
inline double normal_quantile_seed(double p) {
  constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                          -2.759285104469687e+02, 1.383577518672690e+02,
                          -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                          -1.556989798598866e+02, 6.680131188771972e+01,
                          -1.328068155288572e+01};
  constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                          -2.400758277161838e+00, -2.549732539343734e+00,
                          4.374664141464968e+00,  2.938163982698783e+00};
  constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                          2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
           q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

} // namespace detail

/// x such that Q(x) = p.
inline double inv_q(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("inv_q: p must lie in (0, 1)");
  if (p > 0.5)
    return -inv_q(1.0 - p); // 1 - p is exact for p >= 0.5
  double x = -detail::normal_quantile_seed(p);
  constexpr double inv_sqrt_2pi = 0.39894228040143267793994605993438;
  for (int i = 0; i < 2; ++i) {
    const double density = inv_sqrt_2pi * std::exp(-0.5 * x * x);
    x += (q_function(x) - p) / density;
  }
  return x;
}

/// Generalized binomial coefficient (1/2 choose k).
inline double binom_half(std::size_t k) {
  double value = 1.0;
  for (std::size_t i = 0; i < k; ++i)
    value *= (0.5 - static_cast<double>(i)) / static_cast<double>(i + 1);
  return value;
}

} // namespace risfbl
