#include <cmath>
#include <vector>

#include <boost/math/distributions/gamma.hpp>
#include <gtest/gtest.h>

#include "risfbl/error.hpp"
#include "risfbl/montecarlo.hpp"
#include "risfbl/snrstats.hpp"

using namespace risfbl;

namespace {

struct MomentCase {
  LinkGains gains;
  std::size_t n;
  double m1, m2; // mpmath, exact moment algebra over Rayleigh magnitudes
};

const MomentCase moment_cases[] = {
    {{1e-3, 1e-2, 1e-2}, 1, 0.0015402149807217762962, 4.1587416834901282218e-6},
    {{0.5, 2.0, 0.25}, 8, 27.340135698738085428, 944.82163987148585038},
    {{0.0, 1.0, 1.0}, 32, 643.91547286754023437, 447146.42252034582083},
    {{3.0, 0.1, 7.0}, 100, 4549.5042533429350239, 21202376.205909550097},
    {{0.0, 2e-7, 3e-7}, 1024, 3.883240436088734925e-8, 1.511615598349283539e-15},
};

} // namespace

TEST(Moments, ClosedFormMatchesExactAlgebra) {
  for (const auto &c : moment_cases) {
    const auto m = moments_x(c.gains, c.n);
    EXPECT_NEAR(m.m1, c.m1, 1e-13 * c.m1);
    EXPECT_NEAR(m.m2, c.m2, 1e-13 * c.m2);
  }
}

TEST(Moments, ReducedCrossTermDiffersOnlyWithDirectLink) {
  const LinkGains blocked{0.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(moments_x(blocked, 16).m1, moments_x(blocked, 16, MomentForm::reduced).m1);
  const LinkGains direct{0.5, 2.0, 0.25};
  const double ratio =
      moments_x(direct, 8).m1 / moments_x(direct, 8, MomentForm::reduced).m1;
  EXPECT_GT(ratio, 1.05);
}

TEST(Moments, ReducedCrossTermIsRejectedBySimulation) {
  SimScenario s;
  s.gains = {0.5, 2.0, 0.25};
  s.n_elements = 8;
  SimConfig cfg{s, 200000, 3, 1, {PhaseMode::perfect()}};
  const auto r = run_simulation(cfg);
  const auto &x = r.modes[0].power_gain;
  double sum = 0.0, sum_sq = 0.0;
  for (double v : x) {
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(x.size());
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  EXPECT_LT(std::abs(mean - moments_x(s.gains, 8).m1), 4.0 * se);
  EXPECT_GT(std::abs(mean - moments_x(s.gains, 8, MomentForm::reduced).m1), 10.0 * se);
}

TEST(Moments, ExtremeScalesStayFinite) {
  // path gains around 1e-8 each at N = 4096: m2 ~ 1e-16^2·N^4 must not underflow
  const auto m = moments_x({0.0, 1e-8, 1e-8}, 4096);
  EXPECT_GT(m.m2, 0.0);
  EXPECT_TRUE(std::isfinite(m.m2));
  EXPECT_GT(m.m2, m.m1 * m.m1);
  EXPECT_THROW(moments_x({1e300, 1e300, 1e300}, 4096), OverflowError);
  EXPECT_THROW(moments_x({0.0, 1.0, 1.0}, 0), DomainError);
}

TEST(GammaMatch, RecoversMomentsAndRateConvention) {
  const MomentPair m{3.0, 12.0};
  const auto g = gamma_match(m);
  EXPECT_DOUBLE_EQ(g.shape, 3.0);
  EXPECT_DOUBLE_EQ(g.rate, 1.0);
  EXPECT_DOUBLE_EQ(g.mean(), 3.0);
  EXPECT_DOUBLE_EQ(g.variance(), 3.0);
  const auto snr = snr_params(m, 100.0);
  EXPECT_DOUBLE_EQ(snr.shape, 3.0);
  EXPECT_DOUBLE_EQ(snr.mean(), 300.0);
  EXPECT_THROW(gamma_match({2.0, 4.0}), DegenerateDistributionError);
  EXPECT_THROW(gamma_match({0.0, 1.0}), DegenerateDistributionError);
  EXPECT_THROW(snr_params(m, 0.0), DomainError);
}

TEST(GammaMatch, ShapeGrowsWithN) {
  double last = 0.0;
  for (std::size_t n : {4, 16, 64, 256, 1024, 4096}) {
    const auto g = gamma_match(moments_x({0.0, 1.0, 1.0}, n));
    EXPECT_GT(g.shape, last);
    last = g.shape;
  }
}

TEST(GammaLaw, PdfAndCdfAgreeWithBoost) {
  for (double a : {0.4, 1.0, 7.5, 412.0})
    for (double b : {0.2, 3.0}) {
      const GammaParams g{a, b};
      const boost::math::gamma_distribution<double> ref(a, 1.0 / b);
      for (double q : {0.01, 0.3, 0.5, 0.9, 0.999}) {
        const double x = boost::math::quantile(ref, q);
        EXPECT_NEAR(gamma_cdf(g, x), q, 1e-12);
        EXPECT_NEAR(gamma_pdf(g, x), boost::math::pdf(ref, x), 1e-11 * boost::math::pdf(ref, x));
      }
    }
  EXPECT_EQ(gamma_cdf({2.0, 1.0}, 0.0), 0.0);
  EXPECT_THROW(gamma_cdf({2.0, 1.0}, -1.0), DomainError);
  EXPECT_THROW(gamma_cdf({0.0, 1.0}, 1.0), DegenerateDistributionError);
}
