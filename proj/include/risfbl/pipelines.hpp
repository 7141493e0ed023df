#pragma once

/**
 * Curve-producing pipelines behind the CLI subcommands.
 *
 *   snr_cdf_curve     per-mode empirical SNR CDF next to the matched Gamma CDF
 *   rate_vs_n_curve   average rate against the number of RIS elements
 *   rate_vs_d_curve   average rate against the RIS position, with and without
 *                     the direct link
 *
 * The analytic Gamma law is always the perfect-phase one; quantized and
 * unadjusted modes exist only as simulated columns.
 */

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "risfbl/curve.hpp"
#include "risfbl/montecarlo.hpp"
#include "risfbl/rate.hpp"
#include "risfbl/scenario.hpp"
#include "risfbl/snrstats.hpp"

namespace risfbl {

/// Analytic quantities for one scenario.
struct AnalyticPoint {
  GammaParams snr_law;
  RateBreakdown exact;
  RateBreakdown lower_bound;
  double fbl_gap() const { return exact.r1 - exact.avg_rate; }
};

inline AnalyticPoint analyze(const SimScenario &s, MomentForm form = MomentForm::corrected) {
  AnalyticPoint p;
  p.snr_law = snr_params(moments_x(s.gains, s.n_elements, form), s.rho);
  p.exact = avg_rate_exact(p.snr_law, s.fbl);
  p.lower_bound = avg_rate_lower_bound(p.snr_law, s.fbl);
  return p;
}

namespace detail {

inline SimConfig sim_config(const ScenarioConfig &cfg, const SimScenario &s, unsigned workers) {
  SimConfig sc;
  sc.scenario = s;
  sc.samples = static_cast<std::size_t>(cfg.samples);
  sc.seed = cfg.seed;
  sc.workers = workers;
  sc.modes = cfg.modes();
  return sc;
}

inline void common_metadata(CurveOutput &out, const ScenarioConfig &cfg, const std::string &cmd) {
  out.metadata.emplace_back("command", cmd);
  out.metadata.emplace_back("seed", std::to_string(cfg.seed));
  out.metadata.emplace_back("samples", std::to_string(cfg.samples));
  out.metadata.emplace_back("scenario_hash", scenario_hash(cfg, cmd));
  out.metadata.emplace_back("tool_version", tool_version);
  out.metadata.emplace_back("rho", format_g17(cfg.budget().rho));
}

/// Columns shared by the rate sweeps, optionally prefixed. monte_carlo_rate_*
/// averages the normal-approximation rate as is (negative at low SNR, which is
/// what the analytic columns average too); the clamped variant averages
/// max(rate, 0).
inline std::vector<std::string> rate_columns(const std::string &prefix,
                                             const std::vector<PhaseMode> &modes) {
  std::vector<std::string> c{prefix + "avg_rate_exact", prefix + "avg_rate_lb",
                             prefix + "shannon_r1", prefix + "fbl_gap"};
  for (const auto &m : modes) {
    c.push_back(prefix + "monte_carlo_rate_" + m.name());
    c.push_back(prefix + "monte_carlo_se_" + m.name());
    c.push_back(prefix + "monte_carlo_rate_clamped_" + m.name());
  }
  c.push_back(prefix + "series_terms_r1");
  c.push_back(prefix + "series_terms_r2");
  return c;
}

inline void append_rate_values(std::vector<double> &row, const AnalyticPoint &a,
                               const SimResult &sim) {
  row.push_back(a.exact.avg_rate);
  row.push_back(a.lower_bound.avg_rate);
  row.push_back(a.exact.r1);
  row.push_back(a.fbl_gap());
  for (const auto &m : sim.modes) {
    row.push_back(m.summary.mean_rate_unclamped);
    row.push_back(m.summary.std_error_rate);
    row.push_back(m.summary.mean_rate_clamped);
  }
  row.push_back(static_cast<double>(a.exact.diagnostics.r1_terms));
  row.push_back(static_cast<double>(a.exact.diagnostics.r2_terms));
}

} // namespace detail

inline CurveOutput snr_cdf_curve(const ScenarioConfig &cfg, unsigned workers = 1) {
  cfg.validate();
  const SimScenario s = cfg.scenario();
  const GammaParams law = snr_params(moments_x(s.gains, s.n_elements), s.rho);
  const SimResult sim = run_simulation(detail::sim_config(cfg, s, workers), &law);

  CurveOutput out;
  for (const auto &m : sim.modes) {
    out.columns.push_back(m.mode.name() + "_snr_db");
    out.columns.push_back(m.mode.name() + "_empirical_cdf");
    out.columns.push_back(m.mode.name() + "_analytic_gamma_cdf");
  }
  const std::size_t n = static_cast<std::size_t>(cfg.samples);
  out.rows.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    auto &row = out.rows[i];
    for (const auto &m : sim.modes) {
      const double snr = m.snr_cdf.sorted_values()[i];
      row.push_back(linear_to_db(snr));
      row.push_back(static_cast<double>(i + 1) / static_cast<double>(n));
      row.push_back(gamma_cdf(law, snr));
    }
  }
  detail::common_metadata(out, cfg, "snr-cdf");
  out.metadata.emplace_back("gamma_shape", format_g17(law.shape));
  out.metadata.emplace_back("gamma_rate", format_g17(law.rate));
  for (const auto &m : sim.modes)
    if (n >= 10)
      out.metadata.emplace_back("ks_" + m.mode.name(), format_g17(m.summary.ks_vs_gamma));
  return out;
}

inline CurveOutput rate_vs_n_curve(const ScenarioConfig &cfg, unsigned workers = 1) {
  cfg.validate();
  const auto modes = cfg.modes();
  CurveOutput out;
  out.columns.push_back("N");
  for (auto &c : detail::rate_columns("", modes))
    out.columns.push_back(std::move(c));
  for (const std::int64_t n : cfg.n_list) {
    const SimScenario s = cfg.scenario(n, cfg.direct_link, cfg.geometry);
    const AnalyticPoint a = analyze(s);
    const SimResult sim = run_simulation(detail::sim_config(cfg, s, workers));
    std::vector<double> row{static_cast<double>(n)};
    detail::append_rate_values(row, a, sim);
    out.rows.push_back(std::move(row));
  }
  detail::common_metadata(out, cfg, "rate-vs-n");
  out.metadata.emplace_back("direct_link", cfg.direct_link ? "true" : "false");
  out.metadata.emplace_back("gap_limit", format_g17(cfg.fbl().penalty() * std::numbers::log2e));
  return out;
}

inline CurveOutput rate_vs_d_curve(const ScenarioConfig &cfg, unsigned workers = 1) {
  cfg.validate();
  const auto modes = cfg.modes();
  CurveOutput out;
  out.columns.push_back("d");
  for (const char *prefix : {"direct_", "blocked_"})
    for (auto &c : detail::rate_columns(prefix, modes))
      out.columns.push_back(std::move(c));
  for (const double d : cfg.d_grid) {
    std::vector<double> row{d};
    for (const bool direct : {true, false}) {
      const SimScenario s = cfg.scenario(cfg.d_sweep_elements, direct, cfg.geometry_at(d));
      const AnalyticPoint a = analyze(s);
      const SimResult sim = run_simulation(detail::sim_config(cfg, s, workers));
      detail::append_rate_values(row, a, sim);
    }
    out.rows.push_back(std::move(row));
  }
  detail::common_metadata(out, cfg, "rate-vs-d");
  out.metadata.emplace_back("n_elements", std::to_string(cfg.d_sweep_elements));
  return out;
}

} // namespace risfbl
