#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "risfbl/channel.hpp"
#include "risfbl/error.hpp"
#include "risfbl/random.hpp"

using namespace risfbl;

TEST(Philox, KnownAnswerVectors) {
  // Random123 kat_vectors for philox4x32_10
  {
    const auto r = philox4x32_10({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(r, (Philox4x32Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  }
  {
    const auto r = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                 {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(r, (Philox4x32Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  }
  {
    const auto r = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                 {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(r, (Philox4x32Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
  }
}

TEST(RandomStream, UniformsAreOpenIntervalAndReproducible) {
  const RandomStream a(42, 7), b(42, 7), c(42, 8);
  EXPECT_EQ(a.uniforms(3, 0), b.uniforms(3, 0));
  EXPECT_NE(a.uniforms(3, 0), c.uniforms(3, 0));
  EXPECT_NE(a.uniforms(3, 0), a.uniforms(3, 1));
  for (std::uint32_t s = 0; s < 1000; ++s)
    for (double u : a.uniforms(s, 0)) {
      EXPECT_GT(u, 0.0);
      EXPECT_LT(u, 1.0);
    }
}

TEST(RandomStream, ComplexGaussianMoments) {
  const double v = 2.5;
  double sum_sq = 0.0, sum_re = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto u = RandomStream(9, i).uniforms(0, 0);
    const auto z = std::polar(complex_gaussian(v, u[0], u[1]).magnitude,
                              complex_gaussian(v, u[0], u[1]).phase);
    sum_sq += std::norm(z);
    sum_re += z.real();
  }
  EXPECT_NEAR(sum_sq / n, v, 4.0 * v / std::sqrt(n));
  EXPECT_NEAR(sum_re / n, 0.0, 4.0 * std::sqrt(v / 2.0 / n));
}

TEST(Pathloss, ModelAndDomain) {
  EXPECT_DOUBLE_EQ(pathloss_db(1.0), 34.53);
  EXPECT_NEAR(pathloss_db(100.0), 34.53 + 76.0, 1e-12);
  EXPECT_THROW(pathloss_db(0.0), DomainError);
  EXPECT_THROW(pathloss_db(-3.0), DomainError);
}

TEST(LinkGains, DefaultGeometry) {
  const Geometry g;
  const auto with = link_gains(g, DirectLink::present);
  const auto without = link_gains(g, DirectLink::blocked);
  EXPECT_NEAR(with.direct, std::pow(10.0, -(34.53 + 76.0) / 10.0), 1e-25);
  EXPECT_EQ(without.direct, 0.0);
  const double d = std::hypot(50.0, 10.0);
  EXPECT_NEAR(linear_to_db(with.ap_ris), -(34.53 + 38.0 * std::log10(d)), 1e-12);
  EXPECT_DOUBLE_EQ(with.ap_ris, with.ris_ac); // symmetric placement
  Geometry bad;
  bad.ris = bad.ap;
  EXPECT_THROW(link_gains(bad), DomainError);
}

TEST(LinkBudget, TransmitSnr) {
  const double n0 = std::pow(10.0, (-174.0 - 30.0) / 10.0);
  const auto b = LinkBudget::make(0.2, n0, 2e5, 1.0);
  EXPECT_NEAR(b.rho, 0.2 / (n0 * 2e5), 1e-3);
  EXPECT_NEAR(linear_to_db(b.rho), 144.0, 0.01);
  const auto nf = LinkBudget::make(0.2, n0, 2e5, db_to_linear(3.0));
  EXPECT_NEAR(linear_to_db(b.rho) - linear_to_db(nf.rho), 3.0, 1e-12);
  EXPECT_THROW(LinkBudget::make(0.0, n0, 2e5, 1.0), DomainError);
  EXPECT_THROW(LinkBudget::make(0.2, n0, 2e5, 0.5), DomainError);
}

TEST(PhaseMode, NamesAndParsing) {
  EXPECT_EQ(PhaseMode::perfect().name(), "perfect");
  EXPECT_EQ(PhaseMode::quantized(2).name(), "b2");
  EXPECT_EQ(PhaseMode::unadjusted().name(), "unadjusted");
  EXPECT_EQ(PhaseMode::parse("b3"), PhaseMode::quantized(3));
  EXPECT_EQ(PhaseMode::parse("4"), PhaseMode::quantized(4));
  EXPECT_EQ(PhaseMode::parse("unadjusted"), PhaseMode::unadjusted());
  EXPECT_THROW(PhaseMode::parse("b"), ConfigError);
  EXPECT_THROW(PhaseMode::parse("x2"), ConfigError);
  EXPECT_THROW(PhaseMode::quantized(0), DomainError);
}

TEST(Quantizer, GridAndNearestPoint) {
  // b = 1: {-π, 0}; b = 2: {-π, -π/2, 0, π/2}
  EXPECT_DOUBLE_EQ(quantize_phase(0.3, 1), 0.0);
  EXPECT_DOUBLE_EQ(quantize_phase(2.0, 1), -std::numbers::pi);
  EXPECT_DOUBLE_EQ(quantize_phase(-2.0, 1), -std::numbers::pi);
  EXPECT_DOUBLE_EQ(quantize_phase(1.2, 2), std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(quantize_phase(-0.7, 2), 0.0);
  EXPECT_DOUBLE_EQ(quantize_phase(-0.9, 2), -std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(quantize_phase(3.1, 2), -std::numbers::pi); // wraps around
  for (int bits : {1, 2, 3, 5, 10}) {
    std::set<double> seen;
    const double half_step = std::numbers::pi / std::pow(2.0, bits);
    for (int i = 0; i < 5000; ++i) {
      const double theta = -10.0 + 20.0 * i / 5000.0;
      const double q = quantize_phase(theta, bits);
      seen.insert(q);
      EXPECT_LE(std::abs(wrap_phase(theta - q)), half_step + 1e-12);
    }
    EXPECT_EQ(seen.size(), std::size_t{1} << bits);
  }
  EXPECT_THROW(quantize_phase(0.0, 0), DomainError);
  EXPECT_THROW(quantize_phase(0.0, 31), DomainError);
}

TEST(Quantizer, TiesAreDeterministic) {
  // a midpoint goes to the lower grid point, except between the last point
  // and the wrap-around, where -π wins
  EXPECT_DOUBLE_EQ(quantize_phase(std::numbers::pi / 4, 2), 0.0);
  EXPECT_DOUBLE_EQ(quantize_phase(-std::numbers::pi / 4, 2), -std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(quantize_phase(3.0 * std::numbers::pi / 4, 2), -std::numbers::pi);
}

TEST(WrapPhase, Range) {
  for (double x : {-100.0, -std::numbers::pi, 0.0, std::numbers::pi, 7.0, 1e6}) {
    const double w = wrap_phase(x);
    EXPECT_GE(w, -std::numbers::pi);
    EXPECT_LT(w, std::numbers::pi);
    EXPECT_NEAR(std::remainder(w - x, 2.0 * std::numbers::pi), 0.0, 1e-9);
  }
}

TEST(Composite, OptimalPhasesAlignEveryPath) {
  const LinkGains gains{0.3, 1.2, 0.8};
  const auto r = sample_realization(gains, 64, RandomStream(5, 11));
  const auto theta = optimal_phases(r);
  const auto h = composite_gain(r, theta);
  double aligned = std::abs(r.direct);
  for (std::size_t i = 0; i < theta.size(); ++i)
    aligned += std::abs(r.ap_ris[i]) * std::abs(r.ris_ac[i]);
  EXPECT_NEAR(std::abs(h), aligned, 1e-12 * aligned);
  EXPECT_NEAR(std::arg(h), std::arg(r.direct), 1e-12);
  // any other choice does no better (triangle inequality)
  const auto q = quantize_phases(theta, 2);
  EXPECT_LE(std::abs(composite_gain(r, q)), aligned);
  EXPECT_THROW(composite_gain(r, std::vector<double>(3, 0.0)), DomainError);
}

TEST(Composite, BlockedDirectLinkIsZero) {
  const auto r = sample_realization({0.0, 1.0, 1.0}, 4, RandomStream(1, 0));
  EXPECT_EQ(r.direct, cdouble(0.0, 0.0));
  EXPECT_THROW(sample_realization({-1.0, 1.0, 1.0}, 4, RandomStream(1, 0)), DomainError);
  EXPECT_THROW(sample_realization({0.0, 1.0, 1.0}, 0, RandomStream(1, 0)), DomainError);
}
