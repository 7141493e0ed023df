#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "risfbl/channel.hpp"
#include "risfbl/error.hpp"
#include "risfbl/montecarlo.hpp"
#include "risfbl/snrstats.hpp"

using namespace risfbl;

namespace {

SimScenario small_scenario(double direct, std::size_t n) {
  SimScenario s;
  s.gains = {direct, 0.7, 1.3};
  s.n_elements = n;
  s.rho = 10.0;
  return s;
}

/// |h|^2 through the general per-element path.
double reference_gain(const SimScenario &s, const PhaseMode &mode, std::uint64_t seed,
                      std::uint64_t index) {
  const RandomStream stream(seed, index);
  const auto r = sample_realization(s.gains, s.n_elements, stream);
  std::vector<double> theta = optimal_phases(r);
  if (mode.kind == PhaseMode::Kind::quantized) {
    theta = quantize_phases(theta, mode.bits);
  } else if (mode.kind == PhaseMode::Kind::unadjusted) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const auto v = stream.uniforms(static_cast<std::uint32_t>(i), stream_block::random_phase);
      theta[i] = std::numbers::pi * (2.0 * v[0] - 1.0);
    }
  }
  return std::norm(composite_gain(r, theta, s.amplitude));
}

} // namespace

TEST(Simulator, FastPathMatchesGeneralPath) {
  const std::vector<PhaseMode> modes{PhaseMode::perfect(), PhaseMode::quantized(1),
                                     PhaseMode::quantized(2), PhaseMode::quantized(3),
                                     PhaseMode::quantized(20), PhaseMode::unadjusted()};
  for (double direct : {0.0, 0.9}) {
    SimScenario s = small_scenario(direct, 37);
    s.amplitude = 0.8;
    for (std::uint64_t i = 0; i < 300; ++i) {
      const auto fast = simulate_power_gains(s, modes, 77, i);
      for (std::size_t k = 0; k < modes.size(); ++k) {
        const double ref = reference_gain(s, modes[k], 77, i);
        EXPECT_NEAR(fast[k], ref, 1e-10 * (1.0 + ref)) << modes[k].name() << " sample " << i;
      }
    }
  }
}

TEST(Simulator, WorkerCountDoesNotChangeResults) {
  SimConfig cfg;
  cfg.scenario = small_scenario(0.5, 64);
  cfg.samples = 3001;
  cfg.seed = 11;
  cfg.modes = {PhaseMode::perfect(), PhaseMode::quantized(2)};
  const auto one = run_simulation(cfg);
  for (unsigned w : {2u, 3u, 8u}) {
    cfg.workers = w;
    const auto many = run_simulation(cfg);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_EQ(one.modes[k].power_gain, many.modes[k].power_gain);
      EXPECT_EQ(one.modes[k].summary.mean_rate_unclamped, many.modes[k].summary.mean_rate_unclamped);
      EXPECT_EQ(one.modes[k].summary.std_error_rate, many.modes[k].summary.std_error_rate);
    }
  }
}

TEST(Simulator, ModesShareChannelDraws) {
  // adding a mode must not disturb the draws of the others
  SimConfig cfg;
  cfg.scenario = small_scenario(0.0, 16);
  cfg.samples = 500;
  cfg.modes = {PhaseMode::perfect()};
  const auto alone = run_simulation(cfg);
  cfg.modes = {PhaseMode::quantized(1), PhaseMode::perfect(), PhaseMode::unadjusted()};
  const auto together = run_simulation(cfg);
  EXPECT_EQ(alone.modes[0].power_gain, together.at(PhaseMode::perfect()).power_gain);
}

TEST(Simulator, PhaseModesAreOrdered) {
  SimConfig cfg;
  cfg.scenario = small_scenario(0.0, 256);
  cfg.samples = 4000;
  cfg.modes = {PhaseMode::perfect(), PhaseMode::quantized(1), PhaseMode::quantized(2),
               PhaseMode::quantized(3), PhaseMode::unadjusted()};
  const auto r = run_simulation(cfg);
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    const double p = r.modes[0].power_gain[i];
    for (std::size_t k = 1; k < 4; ++k)
      EXPECT_LE(r.modes[k].power_gain[i], p * (1.0 + 1e-12));
  }
  const double m_perfect = r.modes[0].summary.mean_snr;
  const double m_b1 = r.modes[1].summary.mean_snr, m_b2 = r.modes[2].summary.mean_snr;
  const double m_b3 = r.modes[3].summary.mean_snr, m_rand = r.modes[4].summary.mean_snr;
  EXPECT_GT(m_perfect, m_b3);
  EXPECT_GT(m_b3, m_b2);
  EXPECT_GT(m_b2, m_b1);
  EXPECT_GT(m_b1, m_rand);
  // random phases: E|h|^2 = N ϱϑ exactly, ρ = 10
  EXPECT_NEAR(m_rand, 10.0 * 256 * 0.7 * 1.3, 0.1 * 10.0 * 256 * 0.7 * 1.3);
}

TEST(Simulator, QuantizationLossAtLargeN) {
  // large-N limit is 20 log10 sinc(π/2^b): -3.92, -0.91, -0.22 dB
  SimConfig cfg;
  cfg.scenario = small_scenario(0.0, 1024);
  cfg.samples = 2000;
  const double l1 = empirical_quantization_loss(cfg, PhaseMode::quantized(1));
  const double l2 = empirical_quantization_loss(cfg, PhaseMode::quantized(2));
  const double l3 = empirical_quantization_loss(cfg, PhaseMode::quantized(3));
  EXPECT_NEAR(l1, 20.0 * std::log10(2.0 / std::numbers::pi), 0.05);
  EXPECT_NEAR(l2, 20.0 * std::log10(2.0 * std::sqrt(2.0) / std::numbers::pi), 0.05);
  EXPECT_NEAR(l3, 20.0 * std::log10(8.0 * std::sin(std::numbers::pi / 8.0) / std::numbers::pi),
              0.05);
}

TEST(Simulator, MomentsMatchClosedForm) {
  SimConfig cfg;
  cfg.scenario = small_scenario(0.4, 12);
  cfg.samples = 200000;
  cfg.seed = 5;
  const auto r = run_simulation(cfg);
  const auto &x = r.modes[0].power_gain;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (double v : x) {
    s1 += v;
    s2 += v * v;
    s4 += v * v * v * v;
  }
  const double n = static_cast<double>(x.size());
  const auto m = moments_x(cfg.scenario.gains, 12);
  const double se1 = std::sqrt((s2 / n - (s1 / n) * (s1 / n)) / n);
  const double se2 = std::sqrt((s4 / n - (s2 / n) * (s2 / n)) / n);
  EXPECT_NEAR(s1 / n, m.m1, 4.0 * se1);
  EXPECT_NEAR(s2 / n, m.m2, 4.0 * se2);
}

TEST(Simulator, InvalidConfigurations) {
  SimConfig cfg;
  cfg.scenario = small_scenario(0.0, 4);
  cfg.samples = 0;
  EXPECT_THROW(run_simulation(cfg), ConfigError);
  cfg.samples = 10;
  cfg.modes.clear();
  EXPECT_THROW(run_simulation(cfg), ConfigError);
  cfg.modes = std::vector<PhaseMode>(17, PhaseMode::perfect());
  EXPECT_THROW(run_simulation(cfg), ConfigError);
  cfg.modes = {PhaseMode::perfect()};
  cfg.scenario.n_elements = 0;
  EXPECT_THROW(run_simulation(cfg), ConfigError);
}

TEST(EmpiricalCdf, StepFunctionAndQuantiles) {
  const EmpiricalCdf f({3.0, 1.0, 2.0, 2.0});
  EXPECT_EQ(f(0.5), 0.0);
  EXPECT_EQ(f(1.0), 0.25);
  EXPECT_EQ(f(2.0), 0.75);
  EXPECT_EQ(f(9.0), 1.0);
  EXPECT_EQ(f.quantile(0.5), 2.0);
  EXPECT_EQ(f.quantile(1.0), 3.0);
  EXPECT_THROW(f.quantile(0.0), DomainError);
}

TEST(EmpiricalCdf, KsDistanceMatchesScipy) {
  // scipy.stats.kstest(x, gamma(a=2, scale=1/1.5).cdf).statistic
  const EmpiricalCdf f({0.31, 1.12, 0.05, 2.7, 0.88, 1.49, 0.62, 3.9, 0.21, 1.01, 0.77, 1.95});
  EXPECT_NEAR(ks_distance(f, GammaParams{2.0, 1.5}), 0.1702179291028238, 1e-13);
  EXPECT_THROW(ks_distance(EmpiricalCdf({1.0, 2.0}), GammaParams{2.0, 1.0}), DomainError);
}
