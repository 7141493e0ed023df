#pragma once

/**
 * Validation suite: numbered criteria checking the analytic model against
 * simulation, high-precision oracles and known values of the default scenario.
 *
 * The report holds only quantities that are a function of (config, seed,
 * samples); timings go to an optional callback, so two runs with the same
 * inputs serialize to identical bytes whatever the worker count.
 *
 *   1  quantization loss of 1/2/3-bit phases (paired runs, N = 1024)
 *   2  KS distance, perfect-phase SNR vs matched Gamma, N = 256/1024/4096
 *   3  series vs quadrature average rate on a 5x5 (α, mean SNR) grid
 *   4  lower bound <= exact on the same grid
 *   5  FBL gap increases with N and settles near Q^{-1}(ε)·log2(e)/√r
 *   6  rate vs RIS position, 2-bit simulation, with and without direct link
 *   7  simulated mean rate vs series, N = 256/4096
 *   8  closed-form E[X], E[X^2] vs simulation for 5 random gain sets
 *   9  special-function identities and inverse-Q accuracy
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"

#include "risfbl/channel.hpp"
#include "risfbl/montecarlo.hpp"
#include "risfbl/pipelines.hpp"
#include "risfbl/random.hpp"
#include "risfbl/rate.hpp"
#include "risfbl/scenario.hpp"
#include "risfbl/snrstats.hpp"
#include "risfbl/specfun.hpp"

namespace risfbl {

struct ValidationOptions {
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  unsigned workers = 1;
  /// Negative control: multiplies the reference Gamma shape used for the KS
  /// checks. Anything far from 1 must make criterion 2 fail.
  double tamper_alpha = 1.0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  nlohmann::ordered_json measured;
};

struct ValidationReport {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double tamper_alpha = 1.0;
  std::vector<CriterionResult> criteria;

  bool all_pass() const {
    return std::all_of(criteria.begin(), criteria.end(),
                       [](const CriterionResult &c) { return c.pass; });
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool_version"] = tool_version;
    j["seed"] = seed;
    j["samples"] = samples;
    j["tamper_alpha"] = tamper_alpha;
    j["all_pass"] = all_pass();
    auto &arr = j["criteria"] = nlohmann::ordered_json::array();
    for (const auto &c : criteria) {
      nlohmann::ordered_json e;
      e["id"] = c.id;
      e["name"] = c.name;
      e["pass"] = c.pass;
      e["summary"] = c.summary;
      e["measured"] = c.measured;
      arr.push_back(std::move(e));
    }
    return j;
  }

  std::string dump() const { return to_json().dump(2) + "\n"; }
};

/// Called after each criterion with its id and wall-clock seconds.
using CriterionTimer = std::function<void(int, double)>;

namespace detail {

inline std::string fmt(const char *f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

/// Deterministic uniforms for parameter draws inside the suite.
class SuiteRng {
public:
  SuiteRng(std::uint64_t seed, std::uint32_t stream) : stream_(seed, 0xC0FFEE00ull + stream) {}
  double next() {
    if (pos_ == 4) {
      buf_ = stream_.uniforms(counter_++, 7);
      pos_ = 0;
    }
    return buf_[pos_++];
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }

private:
  RandomStream stream_;
  UniformQuad buf_{};
  int pos_ = 4;
  std::uint32_t counter_ = 0;
};

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), std::numeric_limits<double>::min());
}

} // namespace detail

inline ValidationReport run_validation(const ScenarioConfig &base, const ValidationOptions &opt,
                                       const CriterionTimer &timer = {}) {
  base.validate();
  if (opt.samples < 10)
    throw ConfigError("validate: at least 10 samples required", 0, "--samples");
  if (!(opt.tamper_alpha > 0.0) || !std::isfinite(opt.tamper_alpha))
    throw ConfigError("validate: tamper factor must be positive", 0, "--tamper-alpha");

  ValidationReport report;
  report.seed = opt.seed;
  report.samples = opt.samples;
  report.tamper_alpha = opt.tamper_alpha;

  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  auto finish = [&](CriterionResult r) {
    if (timer)
      timer(r.id, std::chrono::duration<double>(clock::now() - start).count());
    report.criteria.push_back(std::move(r));
    start = clock::now();
  };

  const FblParams fbl = base.fbl();
  auto blocked = [&](std::int64_t n) { return base.scenario(n, false, base.geometry); };
  auto reference_law = [&](const SimScenario &s) {
    GammaParams g = snr_params(moments_x(s.gains, s.n_elements), s.rho);
    g.shape *= opt.tamper_alpha;
    return g;
  };
  auto sim = [&](const SimScenario &s, std::vector<PhaseMode> modes, std::size_t samples,
                 std::uint64_t seed, const GammaParams *law) {
    SimConfig c;
    c.scenario = s;
    c.samples = samples;
    c.seed = seed;
    c.workers = opt.workers;
    c.modes = std::move(modes);
    return run_simulation(c, law);
  };

  // 1: quantization loss, paired.
  double ks_1024 = 0.0;
  {
    const SimScenario s = blocked(1024);
    const GammaParams law = reference_law(s);
    const auto r = sim(s,
                       {PhaseMode::perfect(), PhaseMode::quantized(1), PhaseMode::quantized(2),
                        PhaseMode::quantized(3)},
                       opt.samples, opt.seed, &law);
    ks_1024 = r.at(PhaseMode::perfect()).summary.ks_vs_gamma;
    const double l1 = empirical_quantization_loss(r, PhaseMode::quantized(1));
    const double l2 = empirical_quantization_loss(r, PhaseMode::quantized(2));
    const double l3 = empirical_quantization_loss(r, PhaseMode::quantized(3));
    CriterionResult c{1, "quantizer_loss", false, {}, {}};
    c.pass = std::abs(l1 + 3.9) <= 0.3 && std::abs(l2 + 0.9) <= 0.3 && std::abs(l3) <= 0.3;
    c.measured = {{"n_elements", 1024}, {"loss_db_b1", l1}, {"loss_db_b2", l2},
                  {"loss_db_b3", l3},   {"target_db_b1", -3.9}, {"target_db_b2", -0.9},
                  {"tolerance_db", 0.3}};
    c.summary = detail::fmt("b1 %.3f dB", l1) + detail::fmt(", b2 %.3f dB", l2) +
                detail::fmt(", b3 %.3f dB", l3);
    finish(std::move(c));
  }

  // 2: Gamma conformance. The N = 256/4096 runs also feed criterion 7.
  SimResult run_256, run_4096;
  {
    const SimScenario s256 = blocked(256), s4096 = blocked(4096);
    const GammaParams law256 = reference_law(s256), law4096 = reference_law(s4096);
    run_256 = sim(s256, {PhaseMode::perfect()}, opt.samples, opt.seed + 1, &law256);
    run_4096 = sim(s4096, {PhaseMode::perfect()}, opt.samples, opt.seed + 2, &law4096);
    const double k256 = run_256.modes[0].summary.ks_vs_gamma;
    const double k4096 = run_4096.modes[0].summary.ks_vs_gamma;
    CriterionResult c{2, "gamma_match_ks", false, {}, {}};
    c.pass = k256 <= 0.02 && ks_1024 <= 0.02 && k4096 <= 0.02;
    c.measured = {{"ks_n256", k256}, {"ks_n1024", ks_1024}, {"ks_n4096", k4096},
                  {"threshold", 0.02}};
    c.summary = detail::fmt("KS %.4f", k256) + detail::fmt(" / %.4f", ks_1024) +
                detail::fmt(" / %.4f", k4096);
    finish(std::move(c));
  }

  // 3 + 4: series vs quadrature and the lower bound on a 5x5 grid.
  {
    const double alphas[] = {1.0, 2.5, 5.0, 10.0, 20.0};
    const double mean_db[] = {0.0, 10.0, 20.0, 30.0, 40.0};
    FblParams p{100, fbl.payload_bits, 1e-9};
    double worst_rel = 0.0, worst_margin = -std::numeric_limits<double>::infinity();
    bool any_fallback = false;
    std::size_t max_r1 = 0, max_r2 = 0;
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    std::vector<std::pair<double, double>> exact_vs_lb;
    for (double a : alphas)
      for (double db : mean_db) {
        const GammaParams g{a, a / std::pow(10.0, db / 10.0)};
        const auto e = avg_rate_exact(g, p);
        const auto q = avg_rate_quadrature(g, p);
        const auto lb = avg_rate_lower_bound(g, p);
        worst_rel = std::max(worst_rel, detail::rel_diff(e.avg_rate, q.avg_rate));
        worst_margin = std::max(worst_margin, lb.avg_rate - e.avg_rate);
        any_fallback = any_fallback || e.diagnostics.fallback;
        max_r1 = std::max(max_r1, e.diagnostics.r1_terms);
        max_r2 = std::max(max_r2, e.diagnostics.r2_terms);
        points.push_back({{"alpha", a},
                          {"mean_snr_db", db},
                          {"exact", e.avg_rate},
                          {"quadrature", q.avg_rate},
                          {"lower_bound", lb.avg_rate},
                          {"r1_terms", e.diagnostics.r1_terms},
                          {"r2_terms", e.diagnostics.r2_terms},
                          {"fallback", e.diagnostics.fallback}});
      }
    CriterionResult c3{3, "series_vs_quadrature", false, {}, {}};
    c3.pass = worst_rel <= 1e-6 && !any_fallback;
    c3.measured = {{"max_rel_deviation", worst_rel},
                   {"threshold", 1e-6},
                   {"any_fallback", any_fallback},
                   {"max_r1_terms", max_r1},
                   {"max_r2_terms", max_r2},
                   {"grid", points}};
    c3.summary = detail::fmt("max rel dev %.2e", worst_rel) +
                 (any_fallback ? ", quadrature fallback used" : "");
    finish(std::move(c3));

    CriterionResult c4{4, "lower_bound_ordering", false, {}, {}};
    c4.pass = worst_margin <= 1e-9;
    c4.measured = {{"max_lb_minus_exact", worst_margin}, {"threshold", 1e-9}};
    c4.summary = detail::fmt("max(lb - exact) %.4f bpcu", worst_margin);
    finish(std::move(c4));
  }

  // 5: gap saturation.
  {
    const std::int64_t ns[] = {16, 64, 256, 1024, 4096};
    std::vector<double> gaps;
    for (auto n : ns)
      gaps.push_back(analyze(blocked(n)).fbl_gap());
    const double limit = fbl.penalty() * std::numbers::log2e;
    bool increasing = true;
    for (std::size_t i = 1; i < gaps.size(); ++i)
      increasing = increasing && gaps[i] > gaps[i - 1];
    const bool flattens = (gaps[4] - gaps[3]) < 0.25 * (gaps[3] - gaps[2]);
    const double rel = std::abs(gaps[4] - limit) / limit;
    CriterionResult c{5, "fbl_gap_saturation", false, {}, {}};
    c.pass = increasing && flattens && rel <= 0.05;
    c.measured = {{"n_list", ns},          {"gap", gaps},         {"limit", limit},
                  {"increasing", increasing}, {"flattens", flattens}, {"rel_to_limit_n4096", rel}};
    c.summary = detail::fmt("gap(4096) %.4f", gaps[4]) + detail::fmt(" vs limit %.4f", limit);
    finish(std::move(c));
  }

  // 6: rate vs location (2-bit simulation).
  {
    const std::size_t n6 = std::max<std::size_t>(opt.samples / 50, 100);
    auto rate_at = [&](double d, bool direct) {
      const SimScenario s = base.scenario(4096, direct, base.geometry_at(d));
      const auto r = sim(s, {PhaseMode::perfect(), PhaseMode::quantized(2), PhaseMode::quantized(1)},
                         n6, opt.seed + 6, nullptr);
      return std::array<double, 3>{r.modes[0].summary.mean_rate_unclamped,
                                   r.modes[1].summary.mean_rate_unclamped,
                                   r.modes[2].summary.mean_rate_unclamped};
    };
    const auto d5 = rate_at(5, true), d50 = rate_at(50, true), d95 = rate_at(95, true);
    const auto b5 = rate_at(5, false), b50 = rate_at(50, false), b95 = rate_at(95, false);
    auto near = [](double v, double target, double tol) { return std::abs(v - target) <= tol; };
    const bool direct_abs = near(d50[1], 9.9, 0.5) && near(d5[1], 11.25, 0.5) &&
                            near(d95[1], 11.25, 0.5);
    const bool blocked_abs = near(b50[1], 4.0, 0.7) && near(b5[1], 9.0, 0.7) &&
                             near(b95[1], 9.0, 0.7);
    const bool direct_diff = near(d5[1] - d50[1], 1.35, 0.5) && near(d95[1] - d50[1], 1.35, 0.5);
    const bool blocked_diff = near(b5[1] - b50[1], 5.0, 0.5) && near(b95[1] - b50[1], 5.0, 0.5);
    CriterionResult c{6, "rate_vs_location", false, {}, {}};
    c.pass = direct_abs && blocked_abs && direct_diff && blocked_diff;
    c.measured = {{"samples", n6},
                  {"n_elements", 4096},
                  {"direct_b2", {{"d5", d5[1]}, {"d50", d50[1]}, {"d95", d95[1]}}},
                  {"blocked_b2", {{"d5", b5[1]}, {"d50", b50[1]}, {"d95", b95[1]}}},
                  {"direct_b1", {{"d5", d5[2]}, {"d50", d50[2]}, {"d95", d95[2]}}},
                  {"blocked_b1", {{"d5", b5[2]}, {"d50", b50[2]}, {"d95", b95[2]}}},
                  {"direct_perfect", {{"d5", d5[0]}, {"d50", d50[0]}, {"d95", d95[0]}}},
                  {"blocked_perfect", {{"d5", b5[0]}, {"d50", b50[0]}, {"d95", b95[0]}}},
                  {"absolute_ok", direct_abs && blocked_abs},
                  {"differences_ok", direct_diff && blocked_diff}};
    c.summary = detail::fmt("direct %.2f", d50[1]) + detail::fmt("/%.2f", d5[1]) +
                detail::fmt(", blocked %.2f", b50[1]) + detail::fmt("/%.2f bpcu (d=50/5)", b5[1]);
    finish(std::move(c));
  }

  // 7: simulated vs analytic mean rate.
  {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    bool pass = true;
    std::string summary;
    for (const auto &[n, run] : {std::pair<int, const SimResult *>{256, &run_256},
                                 std::pair<int, const SimResult *>{4096, &run_4096}}) {
      const auto a = analyze(blocked(n));
      const auto &sum = run->modes[0].summary;
      const double z = (sum.mean_rate_unclamped - a.exact.avg_rate) / sum.std_error_rate;
      pass = pass && std::abs(z) <= 3.0;
      m["n" + std::to_string(n)] = {{"monte_carlo", sum.mean_rate_unclamped},
                                    {"std_error", sum.std_error_rate},
                                    {"exact", a.exact.avg_rate},
                                    {"z", z}};
      summary += (summary.empty() ? "" : ", ") + std::string("N=") + std::to_string(n) +
                 detail::fmt(" z=%.2f", z);
    }
    CriterionResult c{7, "monte_carlo_vs_exact_rate", false, {}, {}};
    c.pass = pass;
    c.measured = m;
    c.summary = summary;
    finish(std::move(c));
  }

  // 8: moment formulas.
  {
    detail::SuiteRng rng(opt.seed, 8);
    const std::size_t n8 = opt.samples * 10;
    double worst = 0.0, worst_reduced = 0.0;
    nlohmann::ordered_json sets = nlohmann::ordered_json::array();
    for (int k = 0; k < 5; ++k) {
      SimScenario s;
      s.gains = {std::pow(10.0, rng.uniform(-1, 1)), std::pow(10.0, rng.uniform(-1, 1)),
                 std::pow(10.0, rng.uniform(-1, 1))};
      s.n_elements = 1 + static_cast<std::size_t>(rng.uniform(0, 32));
      s.n_elements = std::min<std::size_t>(s.n_elements, 32);
      s.rho = 1.0;
      s.fbl = fbl;
      const auto run = sim(s, {PhaseMode::perfect()}, n8, opt.seed + 100 + k, nullptr);
      const auto &x = run.modes[0].power_gain;
      const double dn = static_cast<double>(x.size());
      double s1 = 0, s2 = 0;
      for (double v : x) {
        s1 += v;
        s2 += v * v;
      }
      const double m1 = s1 / dn, m2 = s2 / dn;
      double v1 = 0, v2 = 0;
      for (double v : x) {
        v1 += (v - m1) * (v - m1);
        v2 += (v * v - m2) * (v * v - m2);
      }
      const double se1 = std::sqrt(v1 / (dn - 1) / dn), se2 = std::sqrt(v2 / (dn - 1) / dn);
      const auto closed = moments_x(s.gains, s.n_elements);
      const auto reduced = moments_x(s.gains, s.n_elements, MomentForm::reduced);
      const double z1 = (m1 - closed.m1) / se1, z2 = (m2 - closed.m2) / se2;
      const double zp = (m1 - reduced.m1) / se1;
      worst = std::max({worst, std::abs(z1), std::abs(z2)});
      worst_reduced = std::max(worst_reduced, std::abs(zp));
      sets.push_back({{"direct", s.gains.direct},
                      {"ap_ris", s.gains.ap_ris},
                      {"ris_ac", s.gains.ris_ac},
                      {"n_elements", s.n_elements},
                      {"m1_closed", closed.m1},
                      {"m1_mc", m1},
                      {"z_m1", z1},
                      {"m2_closed", closed.m2},
                      {"m2_mc", m2},
                      {"z_m2", z2},
                      {"z_m1_reduced_cross_term", zp}});
    }
    CriterionResult c{8, "moment_formulas", false, {}, {}};
    c.pass = worst <= 3.0;
    c.measured = {{"samples", n8}, {"max_abs_z", worst},
                  {"max_abs_z_reduced_cross_term", worst_reduced}, {"sets", sets}};
    c.summary = detail::fmt("max |z| %.2f", worst) +
                detail::fmt(" (reduced cross term: %.1f)", worst_reduced);
    finish(std::move(c));
  }

  // 9: special functions.
  {
    detail::SuiteRng rng(opt.seed, 9);
    double gamma_rec = 0.0, en_rec = 0.0, kummer = 0.0, q_round = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double a = rng.uniform(0.1, 20.0), z = rng.uniform(0.01, 30.0);
      const double lhs = upper_incomplete_gamma(a + 1.0, z);
      const double rhs = a * upper_incomplete_gamma(a, z) + std::exp(a * std::log(z) - z);
      gamma_rec = std::max(gamma_rec, detail::rel_diff(lhs, rhs));
    }
    for (int n = 1; n <= 20; ++n)
      for (int i = 0; i < 5; ++i) {
        const double z = rng.uniform(0.01, 30.0);
        const double lhs = n * exp_integral(n + 1.0, z);
        const double rhs = std::exp(-z) - z * exp_integral(n, z);
        en_rec = std::max(en_rec, detail::rel_diff(lhs, rhs));
      }
    for (int i = 0; i < 50; ++i) {
      const double a = rng.uniform(0.5, 10.0), z = rng.uniform(0.1, 20.0);
      kummer = std::max(kummer, detail::rel_diff(kummer_u(a, a + 1.0, z), std::pow(z, -a)));
    }
    for (int i = 0; i < 100; ++i) {
      const double p = std::pow(10.0, rng.uniform(-12.0, std::log10(0.5)));
      q_round = std::max(q_round, detail::rel_diff(q_function(inv_q(p)), p));
    }
    bool binom_ok = binom_half(0) > 0 && binom_half(1) > 0;
    for (std::size_t k = 2; k <= 60; ++k)
      binom_ok = binom_ok && (binom_half(k) > 0) == (k % 2 == 1) &&
                 std::abs(binom_half(k)) < std::abs(binom_half(k - 1));
    const double x9 = inv_q(1e-9);
    CriterionResult c{9, "special_functions", false, {}, {}};
    c.pass = gamma_rec <= 1e-9 && en_rec <= 1e-9 && kummer <= 1e-8 && q_round <= 1e-9 &&
             binom_ok && std::abs(x9 - 5.9978) <= 1e-3;
    c.measured = {{"incomplete_gamma_recurrence_max_rel", gamma_rec},
                  {"exp_integral_recurrence_max_rel", en_rec},
                  {"kummer_reduction_max_rel", kummer},
                  {"q_round_trip_max_rel", q_round},
                  {"binom_half_signs_ok", binom_ok},
                  {"inv_q_1e-9", x9}};
    c.summary = detail::fmt("inv_q(1e-9) %.6f", x9) + detail::fmt(", worst identity rel %.1e",
                                                                  std::max({gamma_rec, en_rec,
                                                                            kummer, q_round}));
    finish(std::move(c));
  }
  return report;
}

} // namespace risfbl
