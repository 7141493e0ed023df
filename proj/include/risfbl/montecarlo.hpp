#pragma once

/**
 * Seeded Monte Carlo engine for the composite channel.
 *
 * Sample i draws every variate from RandomStream(seed, i), so a sample's
 * value does not depend on which worker produced it. Results are stored by
 * sample index and reduced in index order, which makes every summary
 * bit-identical for any worker count.
 *
 * Several phase modes can share one run: they then see the same channel
 * draws (common random numbers), which is what paired comparisons such as
 * the quantization loss rely on.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "risfbl/channel.hpp"
#include "risfbl/error.hpp"
#include "risfbl/random.hpp"
#include "risfbl/rate.hpp"
#include "risfbl/snrstats.hpp"

namespace risfbl {

/// Everything a simulation needs about the physical scenario.
struct SimScenario {
  LinkGains gains;
  double rho = 1.0;
  std::size_t n_elements = 1024;
  double amplitude = 1.0;
  FblParams fbl;

  void validate() const {
    gains.validate();
    fbl.validate();
    if (!(rho > 0.0) || !std::isfinite(rho))
      throw ConfigError("SimScenario: rho must be finite and positive");
    if (n_elements < 1)
      throw ConfigError("SimScenario: n_elements must be >= 1");
    if (!(amplitude >= 0.0 && amplitude <= 1.0))
      throw ConfigError("SimScenario: amplitude must lie in [0, 1]");
  }
};

struct SimConfig {
  SimScenario scenario;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::vector<PhaseMode> modes{PhaseMode::perfect()};

  void validate() const {
    scenario.validate();
    if (samples < 1)
      throw ConfigError("SimConfig: samples must be >= 1");
    if (workers < 1)
      throw ConfigError("SimConfig: workers must be >= 1");
    if (modes.empty())
      throw ConfigError("SimConfig: at least one phase mode required");
    for (const auto &m : modes)
      if (m.kind == PhaseMode::Kind::quantized && (m.bits < 1 || m.bits > 30))
        throw ConfigError("SimConfig: quantizer bits must be in [1, 30]");
  }
};

class EmpiricalCdf {
public:
  EmpiricalCdf() = default;
  explicit EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::size_t count() const { return sorted_.size(); }
  const std::vector<double> &sorted_values() const { return sorted_; }

  /// Fraction of samples <= x.
  double operator()(double x) const {
    if (sorted_.empty())
      return 0.0;
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
  }

  /// Smallest sample v with F(v) >= q, q in (0, 1].
  double quantile(double q) const {
    if (sorted_.empty())
      throw DomainError("EmpiricalCdf::quantile: empty sample");
    if (!(q > 0.0 && q <= 1.0))
      throw DomainError("EmpiricalCdf::quantile: q must lie in (0, 1]");
    const auto n = static_cast<double>(sorted_.size());
    auto idx = static_cast<std::size_t>(std::ceil(q * n));
    idx = std::clamp<std::size_t>(idx, 1, sorted_.size());
    return sorted_[idx - 1];
  }

private:
  std::vector<double> sorted_;
};

/// sup_x |F_n(x) - F(x)| for a continuous reference CDF F.
template <class Cdf>
  requires std::invocable<Cdf &, double>
double ks_distance(const EmpiricalCdf &emp, Cdf &&cdf) {
  const auto &v = emp.sorted_values();
  if (v.size() < 10)
    throw DomainError("ks_distance: at least 10 samples required");
  const auto n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return std::min(d, 1.0);
}

inline double ks_distance(const EmpiricalCdf &emp, const GammaParams &g) {
  g.validate();
  return ks_distance(emp, [&g](double x) { return gamma_cdf(g, std::max(x, 0.0)); });
}

struct SimSummary {
  double mean_snr = 0.0;
  double var_snr = 0.0;
  double mean_rate_unclamped = 0.0;
  double mean_rate_clamped = 0.0;
  double std_error_rate = 0.0; // of the unclamped mean
  double ks_vs_gamma = 0.0;    // against the perfect-phase matched Gamma
};

/// Per-mode output of a run. power_gain[i] is |h|^2 of sample i; the SNR is
/// rho·power_gain[i].
struct ModeResult {
  PhaseMode mode;
  std::vector<double> power_gain;
  EmpiricalCdf snr_cdf;
  SimSummary summary;
};

struct SimResult {
  std::vector<ModeResult> modes;

  const ModeResult &at(const PhaseMode &m) const {
    for (const auto &r : modes)
      if (r.mode == m)
        return r;
    throw DomainError("SimResult: mode '" + m.name() + "' was not simulated");
  }
};

namespace detail {

/// Per-run constants for each requested mode.
struct ModePlan {
  PhaseMode::Kind kind = PhaseMode::Kind::perfect;
  std::uint32_t levels = 0;
  double step = 0.0;
  std::vector<std::complex<double>> grid; // e^{jθ_k}, tabulated up to 16 bits
};

inline std::vector<ModePlan> plan_modes(const std::vector<PhaseMode> &modes) {
  std::vector<ModePlan> plan;
  for (const auto &m : modes) {
    ModePlan p;
    p.kind = m.kind;
    if (m.kind == PhaseMode::Kind::quantized) {
      p.levels = std::uint32_t{1} << m.bits;
      p.step = 2.0 * std::numbers::pi / static_cast<double>(p.levels);
      if (m.bits <= 16)
        for (std::uint32_t k = 0; k < p.levels; ++k)
          p.grid.push_back(std::polar(1.0, -std::numbers::pi + k * p.step));
    }
    plan.push_back(std::move(p));
  }
  return plan;
}

/// |h|^2 for each planned mode, written to out[mode]. Works in the frame
/// rotated by -arg(h_d): the perfectly aligned composite is then the real
/// number |h_d| + β Σ |h_n||g_n|, and phase θ_n on element n contributes
/// β|h_n||g_n| e^{j(θ_n - θ*_n)}.
inline void simulate_sample(const SimScenario &sc, const std::vector<ModePlan> &plan,
                            const RandomStream &stream, double *out) {
  const std::size_t n_modes = plan.size();
  double direct_mag = 0.0, psi = 0.0;
  if (sc.gains.direct > 0.0) {
    const auto u = stream.uniforms(RandomStream::direct_slot, stream_block::channel);
    const auto d = complex_gaussian(sc.gains.direct, u[0], u[1]);
    direct_mag = d.magnitude;
    psi = d.phase;
  }
  constexpr std::size_t max_modes = 16;
  std::complex<double> acc[max_modes] = {};
  double aligned = 0.0;
  bool need_phases = false;
  for (const auto &m : plan)
    need_phases = need_phases || m.kind != PhaseMode::Kind::perfect;
  const double gain_product = sc.gains.ap_ris * sc.gains.ris_ac;

  for (std::size_t i = 0; i < sc.n_elements; ++i) {
    const auto slot = static_cast<std::uint32_t>(i);
    const auto u = stream.uniforms(slot, stream_block::channel);
    // |h_n||g_n| with |h_n|^2 = -ϱ ln u0 and |g_n|^2 = -ϑ ln u2
    const double mag = std::sqrt(gain_product * std::log(u[0]) * std::log(u[2]));
    aligned += mag;
    if (!need_phases)
      continue;
    // arg(conj(g_n) h_n) and the aligning phase θ*_n
    const double product_phase = std::numbers::pi * 2.0 * (u[1] - u[3]);
    const double target = wrap_phase(psi - product_phase);
    const std::complex<double> undo_target = std::polar(mag, -target);
    for (std::size_t k = 0; k < n_modes; ++k) {
      const auto &m = plan[k];
      if (m.kind == PhaseMode::Kind::quantized) {
        const std::uint32_t idx = grid_index(target, m.levels);
        acc[k] += (m.grid.empty() ? std::polar(1.0, -std::numbers::pi + idx * m.step)
                                  : m.grid[idx]) *
                  undo_target;
      } else if (m.kind == PhaseMode::Kind::unadjusted) {
        const auto v = stream.uniforms(slot, stream_block::random_phase);
        acc[k] += std::polar(1.0, std::numbers::pi * (2.0 * v[0] - 1.0)) * undo_target;
      }
    }
  }
  for (std::size_t k = 0; k < n_modes; ++k) {
    if (plan[k].kind == PhaseMode::Kind::perfect) {
      const double a = direct_mag + sc.amplitude * aligned;
      out[k] = a * a;
    } else {
      out[k] = std::norm(direct_mag + sc.amplitude * acc[k]);
    }
  }
}

} // namespace detail

/// One draw of the phase-aligned composite |h|^2 for each mode, from the
/// stream of sample `index`. Equal to the general path
/// sample_realization -> optimal_phases [-> quantize_phases] -> composite_gain
/// up to rounding.
inline std::vector<double> simulate_power_gains(const SimScenario &sc,
                                                const std::vector<PhaseMode> &modes,
                                                std::uint64_t seed, std::uint64_t index) {
  if (modes.size() > 16)
    throw ConfigError("simulate_power_gains: at most 16 phase modes");
  std::vector<double> out(modes.size());
  detail::simulate_sample(sc, detail::plan_modes(modes), RandomStream(seed, index), out.data());
  return out;
}

/// Draws cfg.samples realizations and summarizes each mode. KS distances are
/// taken against `reference` (normally the perfect-phase matched SNR law);
/// pass nullptr to skip them.
inline SimResult run_simulation(const SimConfig &cfg, const GammaParams *reference = nullptr) {
  cfg.validate();
  const std::size_t n_modes = cfg.modes.size();
  if (n_modes > 16)
    throw ConfigError("run_simulation: at most 16 phase modes per run");
  const std::size_t n = cfg.samples;
  std::vector<double> gains(n * n_modes);
  const auto plan = detail::plan_modes(cfg.modes);

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(cfg.workers, n));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      const std::size_t begin = n * w / workers, end = n * (w + 1) / workers;
      for (std::size_t i = begin; i < end; ++i)
        detail::simulate_sample(cfg.scenario, plan, RandomStream(cfg.seed, i),
                                &gains[i * n_modes]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back(work, w);
    for (auto &t : pool)
      t.join();
  }
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);

  const double rho = cfg.scenario.rho;
  const double penalty = cfg.scenario.fbl.penalty();
  SimResult result;
  for (std::size_t k = 0; k < n_modes; ++k) {
    ModeResult mr;
    mr.mode = cfg.modes[k];
    mr.power_gain.resize(n);
    std::vector<double> snr(n);
    for (std::size_t i = 0; i < n; ++i) {
      mr.power_gain[i] = gains[i * n_modes + k];
      snr[i] = rho * mr.power_gain[i];
    }

    const double dn = static_cast<double>(n);
    double s = 0.0, r = 0.0, rc = 0.0;
    std::vector<double> rate(n);
    for (std::size_t i = 0; i < n; ++i) {
      s += snr[i];
      rate[i] = fbl_rate_with_penalty(snr[i], penalty);
      r += rate[i];
      rc += std::max(rate[i], 0.0);
    }
    auto &sum = mr.summary;
    sum.mean_snr = s / dn;
    sum.mean_rate_unclamped = r / dn;
    sum.mean_rate_clamped = rc / dn;
    double vs = 0.0, vr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      vs += (snr[i] - sum.mean_snr) * (snr[i] - sum.mean_snr);
      vr += (rate[i] - sum.mean_rate_unclamped) * (rate[i] - sum.mean_rate_unclamped);
    }
    sum.var_snr = n > 1 ? vs / (dn - 1.0) : 0.0;
    sum.std_error_rate = n > 1 ? std::sqrt(vr / (dn - 1.0) / dn) : 0.0;

    mr.snr_cdf = EmpiricalCdf(std::move(snr));
    if (reference != nullptr && n >= 10)
      sum.ks_vs_gamma = ks_distance(mr.snr_cdf, *reference);
    result.modes.push_back(std::move(mr));
  }
  return result;
}

/// 10·log10(mean SNR of `quantized` / mean SNR of `perfect`) from one paired
/// run (both modes must be present in it).
inline double empirical_quantization_loss(const SimResult &paired, const PhaseMode &quantized,
                                          const PhaseMode &perfect = PhaseMode::perfect()) {
  return 10.0 * std::log10(paired.at(quantized).summary.mean_snr /
                           paired.at(perfect).summary.mean_snr);
}

/// Convenience: run both modes on common random numbers and return the loss.
inline double empirical_quantization_loss(SimConfig cfg, const PhaseMode &quantized) {
  cfg.modes = {PhaseMode::perfect(), quantized};
  return empirical_quantization_loss(run_simulation(cfg), quantized);
}

} // namespace risfbl
