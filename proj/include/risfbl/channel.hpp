#pragma once

/**
 * Geometry, link budget and small-scale channel for a single-antenna AP and
 * actuator (AC) assisted by an N-element RIS.
 *
 * Composite coefficient: h = h_d + Σ_n β e^{jθ_n} conj(g_n) h_n, where
 * h_d ~ CN(0, ς) is the direct link, h_n ~ CN(0, ϱ) is AP->RIS element n and
 * g_n ~ CN(0, ϑ) is RIS element n -> AC. SNR is ρ|h|^2.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "risfbl/error.hpp"
#include "risfbl/random.hpp"

namespace risfbl {

using cdouble = std::complex<double>;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Geometry {
  Point2 ap{0.0, 0.0};
  Point2 ac{100.0, 0.0};
  Point2 ris{50.0, 10.0};

  void validate() const {
    if (!(distance(ap, ac) > 0.0) || !(distance(ap, ris) > 0.0) ||
        !(distance(ris, ac) > 0.0))
      throw DomainError("Geometry: AP, AC and RIS must be pairwise distinct");
  }
};

/// Transmit SNR ρ = p / (N0·W·NF). Pass noise_figure = 1 to use p/(N0·W).
struct LinkBudget {
  double tx_power_w = 0.2;
  double noise_density_w_per_hz = 0.0;
  double bandwidth_hz = 2e5;
  double noise_figure = 1.0; // linear
  double rho = 0.0;

  static LinkBudget make(double tx_power_w, double noise_density_w_per_hz,
                         double bandwidth_hz, double noise_figure) {
    LinkBudget b{tx_power_w, noise_density_w_per_hz, bandwidth_hz, noise_figure, 0.0};
    if (!(tx_power_w > 0.0) || !(noise_density_w_per_hz > 0.0) ||
        !(bandwidth_hz > 0.0) || !(noise_figure >= 1.0))
      throw DomainError("LinkBudget: powers and bandwidth must be positive, NF >= 1");
    b.rho = tx_power_w / (noise_density_w_per_hz * bandwidth_hz * noise_figure);
    return b;
  }
};

/// Mean power gains of the three hops (ς, ϱ, ϑ). direct == 0 models a blocked
/// AP-AC path.
struct LinkGains {
  double direct = 0.0;
  double ap_ris = 0.0;
  double ris_ac = 0.0;

  void validate() const {
    if (!(direct >= 0.0) || !(ap_ris >= 0.0) || !(ris_ac >= 0.0) ||
        !std::isfinite(direct) || !std::isfinite(ap_ris) || !std::isfinite(ris_ac))
      throw DomainError("LinkGains: gains must be finite and non-negative");
  }
};

/// RIS phase control policy.
struct PhaseMode {
  enum class Kind { perfect, quantized, unadjusted };
  Kind kind = Kind::perfect;
  int bits = 0;

  static PhaseMode perfect() { return {Kind::perfect, 0}; }
  static PhaseMode quantized(int b) {
    if (b < 1 || b > 30)
      throw DomainError("PhaseMode: quantizer bits must be in [1, 30]");
    return {Kind::quantized, b};
  }
  static PhaseMode unadjusted() { return {Kind::unadjusted, 0}; }

  /// "perfect", "b1", "b2", ..., "unadjusted".
  std::string name() const {
    switch (kind) {
    case Kind::perfect:
      return "perfect";
    case Kind::quantized:
      return "b" + std::to_string(bits);
    case Kind::unadjusted:
      return "unadjusted";
    }
    return {};
  }

  static PhaseMode parse(const std::string &text) {
    if (text == "perfect")
      return perfect();
    if (text == "unadjusted")
      return unadjusted();
    std::string digits = text;
    if (!digits.empty() && digits.front() == 'b')
      digits.erase(0, 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("unknown phase mode '" + text + "'");
    return quantized(std::stoi(digits));
  }

  friend bool operator==(const PhaseMode &, const PhaseMode &) = default;
};

struct RisConfig {
  std::size_t n_elements = 1024;
  PhaseMode mode = PhaseMode::perfect();
  double amplitude = 1.0;

  void validate() const {
    if (n_elements < 1)
      throw DomainError("RisConfig: at least one element required");
    if (!(amplitude >= 0.0 && amplitude <= 1.0))
      throw DomainError("RisConfig: amplitude must lie in [0, 1]");
  }
};

struct ChannelRealization {
  cdouble direct;
  std::vector<cdouble> ap_ris; // h_n
  std::vector<cdouble> ris_ac; // g_n
};

inline double pathloss_db(double distance_m) {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m))
    throw DomainError("pathloss_db: distance must be positive");
  return 34.53 + 38.0 * std::log10(distance_m);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

enum class DirectLink { present, blocked };

inline LinkGains link_gains(const Geometry &geom, DirectLink link = DirectLink::present) {
  geom.validate();
  LinkGains g;
  g.direct = link == DirectLink::present
                 ? db_to_linear(-pathloss_db(distance(geom.ap, geom.ac)))
                 : 0.0;
  g.ap_ris = db_to_linear(-pathloss_db(distance(geom.ap, geom.ris)));
  g.ris_ac = db_to_linear(-pathloss_db(distance(geom.ris, geom.ac)));
  return g;
}

namespace stream_block {
/// {|h_n|, arg h_n, |g_n|, arg g_n} for element n; slot direct_slot holds
/// {|h_d|, arg h_d, -, -}.
inline constexpr std::uint32_t channel = 0;
/// Uniform phase of element n in the unadjusted mode.
inline constexpr std::uint32_t random_phase = 1;
} // namespace stream_block

inline cdouble to_cartesian(PolarSample s) { return std::polar(s.magnitude, s.phase); }

/// One draw of (h_d, h, g) from the sample's stream.
inline ChannelRealization sample_realization(const LinkGains &gains, std::size_t n,
                                             const RandomStream &stream) {
  gains.validate();
  if (n < 1)
    throw DomainError("sample_realization: n >= 1 required");
  ChannelRealization r;
  r.direct = cdouble{0.0, 0.0};
  if (gains.direct > 0.0) {
    const auto u = stream.uniforms(RandomStream::direct_slot, stream_block::channel);
    r.direct = to_cartesian(complex_gaussian(gains.direct, u[0], u[1]));
  }
  r.ap_ris.resize(n);
  r.ris_ac.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = stream.uniforms(static_cast<std::uint32_t>(i), stream_block::channel);
    r.ap_ris[i] = to_cartesian(complex_gaussian(gains.ap_ris, u[0], u[1]));
    r.ris_ac[i] = to_cartesian(complex_gaussian(gains.ris_ac, u[2], u[3]));
  }
  return r;
}

/// Wrap to [-π, π).
inline double wrap_phase(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = x - two_pi * std::floor((x + std::numbers::pi) / two_pi);
  if (w >= std::numbers::pi)
    w -= two_pi;
  if (w < -std::numbers::pi)
    w = -std::numbers::pi;
  return w;
}

/// Phases that rotate every reflected term onto arg(h_d), or onto 0 when the
/// direct coefficient is exactly zero.
inline std::vector<double> optimal_phases(const ChannelRealization &r) {
  const double target = r.direct != cdouble{0.0, 0.0} ? std::arg(r.direct) : 0.0;
  std::vector<double> theta(r.ap_ris.size(), 0.0);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const cdouble product = std::conj(r.ris_ac[i]) * r.ap_ris[i];
    if (product != cdouble{0.0, 0.0})
      theta[i] = wrap_phase(target - std::arg(product));
  }
  return theta;
}

/// Index k of the grid point -π + kΔ (Δ = π/2^{b-1}, k = 0..2^b-1) nearest
/// to θ in wrapped distance. Ties go to the smaller grid value, which for the
/// tie between the last point and -π means -π.
namespace detail {

/// quantize_index for θ already in [-π, π), with levels = 2^b.
inline std::uint32_t grid_index(double wrapped, std::uint32_t levels) {
  const double pos = (wrapped + std::numbers::pi) * (static_cast<double>(levels >> 1) / std::numbers::pi);
  const double below = std::floor(pos);
  const double frac = pos - below;
  const std::uint32_t mask = levels - 1; // levels is a power of two
  const std::uint32_t k0 = static_cast<std::uint32_t>(below) & mask;
  const std::uint32_t k1 = (k0 + 1) & mask;
  if (frac < 0.5)
    return k0;
  if (frac > 0.5)
    return k1;
  return k1 == 0 ? 0 : k0;
}

} // namespace detail

inline std::uint32_t quantize_index(double theta, int bits) {
  if (bits < 1 || bits > 30)
    throw DomainError("quantize_phase: bits must be in [1, 30]");
  return detail::grid_index(wrap_phase(theta), std::uint32_t{1} << bits);
}

inline double quantize_phase(double theta, int bits) {
  const std::uint32_t k = quantize_index(theta, bits);
  const double step = std::numbers::pi / static_cast<double>(std::uint32_t{1} << (bits - 1));
  return -std::numbers::pi + static_cast<double>(k) * step;
}

inline std::vector<double> quantize_phases(std::span<const double> theta, int bits) {
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    out[i] = quantize_phase(theta[i], bits);
  return out;
}

inline cdouble composite_gain(const ChannelRealization &r, std::span<const double> theta,
                              double amplitude = 1.0) {
  if (theta.size() != r.ap_ris.size() || r.ap_ris.size() != r.ris_ac.size())
    throw DomainError("composite_gain: phase vector length must equal N");
  cdouble reflected{0.0, 0.0};
  for (std::size_t i = 0; i < theta.size(); ++i)
    reflected += std::polar(1.0, theta[i]) * std::conj(r.ris_ac[i]) * r.ap_ris[i];
  return r.direct + amplitude * reflected;
}

inline double instantaneous_snr(const LinkBudget &budget, cdouble gain) {
  return budget.rho * std::norm(gain);
}

} // namespace risfbl
