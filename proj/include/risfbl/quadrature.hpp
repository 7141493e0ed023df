#pragma once

/**
 * Adaptive Gauss-Kronrod (7/15) integration and a log-domain driver for
 * unimodal integrands on the whole real line.
 *
 * Every analytical average in this library is an expectation under a Gamma
 * law. After the change of variable x = e^t such integrands become smooth,
 * unimodal and decay at least exponentially in both directions, which is what
 * integrate_log_unimodal() assumes.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "risfbl/error.hpp"

namespace risfbl {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_subdivisions = 200;
  /// Tail cutoff policy for infinite ranges: the integration window ends where
  /// the log-integrand has dropped this far below its peak (e^-60 ~ 1e-26).
  double tail_log_drop = 60.0;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol >= 0.0) || max_subdivisions < 1 ||
        !(tail_log_drop > 0.0))
      throw DomainError("QuadratureSpec: rel_tol > 0, abs_tol >= 0, "
                        "max_subdivisions >= 1 required");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

namespace detail {

inline constexpr double kronrod_nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kronrod_weights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kronrod_nodes[1], [3], [5], [7].
inline constexpr double gauss_weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
};

template <class F> Segment gk15(F &f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kronrod_weights[7];
  double gauss = fc * gauss_weights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kronrod_nodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kronrod_weights[i] * pair;
    if (i % 2 == 1)
      gauss += gauss_weights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

} // namespace detail

/// Adaptive bisection on [a, b], always refining the segment with the largest
/// error estimate. Stops when the summed error estimate is below
/// max(abs_tol, rel_tol * |integral|) or after spec.max_subdivisions splits.
template <class F>
QuadratureResult integrate_adaptive(F &&f, double a, double b,
                                    const QuadratureSpec &spec) {
  QuadratureResult out;
  if (a == b)
    return QuadratureResult{0.0, 0.0, 0, true};

  std::vector<detail::Segment> heap;
  heap.reserve(static_cast<std::size_t>(spec.max_subdivisions) + 2);
  auto by_error = [](const detail::Segment &l, const detail::Segment &r) {
    return l.error < r.error;
  };
  heap.push_back(detail::gk15(f, a, b));
  double total = heap.front().value;
  double error = heap.front().error;

  int splits = 0;
  for (;;) {
    const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
    if (error <= target) {
      out.converged = true;
      break;
    }
    if (splits >= spec.max_subdivisions)
      break;
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval no longer splittable in double precision.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    const detail::Segment left = detail::gk15(f, worst.a, mid);
    const detail::Segment right = detail::gk15(f, mid, worst.b);
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    ++splits;

    // Re-sum from the heap; running updates drift under cancellation.
    total = 0.0;
    error = 0.0;
    for (const auto &s : heap) {
      total += s.value;
      error += s.error;
    }
  }
  out.value = total;
  out.abs_error = error;
  out.subdivisions = splits;
  return out;
}

/// Result of integrating exp(log_f) in log form: the integral equals
/// exp(log_value).
struct LogQuadratureResult {
  double log_value = -std::numeric_limits<double>::infinity();
  double rel_error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

/// ∫_{-inf}^{inf} exp(log_f(t)) dt for a unimodal log_f.
///
/// The peak is located by expanding a bracket from `start` and refining with a
/// golden-section search; the window is then widened on each side until
/// log_f falls spec.tail_log_drop below the peak, and each half is integrated
/// adaptively with the peak value factored out.
template <class LogF>
LogQuadratureResult integrate_log_unimodal(LogF &&log_f, double start,
                                           const QuadratureSpec &spec) {
  spec.validate();
  auto g = [&](double t) {
    const double v = log_f(t);
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };

  // Bracket the maximum.
  double step = 1.0;
  double lo = start - step, mid = start, hi = start + step;
  double f_lo = g(lo), f_mid = g(mid), f_hi = g(hi);
  for (int it = 0; it < 200 && !(f_mid >= f_lo && f_mid >= f_hi); ++it) {
    if (f_hi > f_mid) {
      lo = mid;
      f_lo = f_mid;
      mid = hi;
      f_mid = f_hi;
      step *= 2.0;
      hi = mid + step;
      f_hi = g(hi);
    } else {
      hi = mid;
      f_hi = f_mid;
      mid = lo;
      f_mid = f_lo;
      step *= 2.0;
      lo = mid - step;
      f_lo = g(lo);
    }
  }
  if (!(f_mid >= f_lo && f_mid >= f_hi) || !std::isfinite(f_mid))
    throw NonConvergenceError("integrate_log_unimodal: could not bracket peak");

  // Golden-section refinement.
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-9 * (1.0 + std::abs(a)); ++it) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + inv_phi * (b - a);
      g2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - inv_phi * (b - a);
      g1 = g(x1);
    }
  }
  double peak = g1 > g2 ? x1 : x2;
  double f_peak = std::max(g1, g2);
  if (f_mid > f_peak) {
    peak = mid;
    f_peak = f_mid;
  }

  // Local width from a finite-difference curvature estimate.
  const double h = 1e-3 * (1.0 + std::abs(peak));
  const double curv = (g(peak + h) - 2.0 * f_peak + g(peak - h)) / (h * h);
  double width = (curv < 0.0 && std::isfinite(curv)) ? 1.0 / std::sqrt(-curv) : 1.0;
  width = std::clamp(width, 1e-8, 1e3);

  const double floor_level = f_peak - spec.tail_log_drop;
  auto reach = [&](double dir) {
    double d = width;
    for (int it = 0; it < 400; ++it) {
      if (g(peak + dir * d) < floor_level)
        return peak + dir * d;
      d *= 1.5;
    }
    throw NonConvergenceError("integrate_log_unimodal: tail does not decay");
  };
  const double left = reach(-1.0);
  const double right = reach(+1.0);

  auto scaled = [&](double t) { return std::exp(g(t) - f_peak); };
  QuadratureSpec half = spec;
  const auto lhs = integrate_adaptive(scaled, left, peak, half);
  const auto rhs = integrate_adaptive(scaled, peak, right, half);

  LogQuadratureResult out;
  const double sum = lhs.value + rhs.value;
  out.log_value = f_peak + std::log(sum);
  out.rel_error = (lhs.abs_error + rhs.abs_error) / sum;
  out.subdivisions = lhs.subdivisions + rhs.subdivisions;
  out.converged = lhs.converged && rhs.converged;
  return out;
}

} // namespace risfbl
