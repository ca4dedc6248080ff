#include <gtest/gtest.h>

#include <wgqed/observables.hpp>

#include "oracles.hpp"

using namespace wgqed;

namespace {

WavepacketN identical(int n, double g, Direction d = Direction::right) {
  const auto p = make_exponential_profile(Bandwidth(g));
  return make_product_wavepacket(std::vector<PhotonMode>(static_cast<std::size_t>(n), PhotonMode{p, d}));
}

}  // namespace

TEST(Excitation, SinglePhotonSpotValues) {
  const auto w = identical(1, 2.0);
  EXPECT_EQ(excitation_probability(TimePoint(0.0), w), 0.0);
  EXPECT_NEAR(excitation_probability(TimePoint(1.0), w), 2.0 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(excitation_probability(TimePoint(1.0), w), 0.27067, 5e-6);
  EXPECT_LT(excitation_probability(TimePoint(19.9), w), 1e-14);
}

TEST(Excitation, SinglePhotonMatchesOdeOracle) {
  for (double g : {0.5, 2.0, 5.0}) {
    const auto p = make_exponential_profile(Bandwidth(g));
    const auto w = make_product_wavepacket({{p, Direction::right}});
    oracle::ExcitationOde ode{[&](double t) { return p(t); }};
    const auto ref = ode.trace(10.0);
    std::vector<double> times;
    for (std::size_t i = 0; i < ref.size(); i += 50) times.push_back(i * ode.dt);
    const auto trace = excitation_trace(times, w);
    for (std::size_t k = 0; k < times.size(); ++k) {
      EXPECT_NEAR(trace.values[k], ref[k * 50], 1e-6) << g << " " << times[k];
      EXPECT_GE(trace.values[k], 0.0);
      EXPECT_LE(trace.values[k], 1.0);
    }
  }
}

TEST(Excitation, TwoPhotonStartsInGroundState) {
  EXPECT_EQ(excitation_probability(TimePoint(0.0), identical(2, 1.0)), 0.0);
  EXPECT_THROW(excitation_probability(TimePoint(1.0), identical(3, 1.0)), InvalidArgument);
}

TEST(Excitation, ProbabilityConservedAtFiniteTimes) {
  const auto p = make_exponential_profile(Bandwidth(1.5));
  for (Direction d : {Direction::left, Direction::right}) {
    const auto w = make_product_wavepacket({{p, Direction::right}, {p, d}});
    const AmplitudeEngine e(w);
    for (double t : {0.4, 1.0, 2.5, 6.0}) {
      const auto ch = channel_probabilities(e, TimePoint(t));
      const double pe = excitation_probability(TimePoint(t), e);
      EXPECT_NEAR(ch[0] + ch[1] + ch[2] + pe, 1.0, 1e-8) << t;
      EXPECT_GT(pe, 0.0);
    }
  }
}

TEST(ReflectionClosed, Examples) {
  EXPECT_NEAR(reflection_probability_closed(1, Bandwidth(2.0)), 0.5, 1e-15);
  EXPECT_NEAR(reflection_probability_closed(2, Bandwidth(2.0)), 0.0625, 1e-15);
  for (double g : {0.1, 0.7, 3.0}) {
    EXPECT_NEAR(reflection_probability_closed(1, Bandwidth(g)), 2.0 / (2.0 + g), 1e-15);
    EXPECT_NEAR(reflection_probability_closed(2, Bandwidth(g)), 8.0 / ((2.0 + g) * (2.0 + g) * (2.0 + 3.0 * g)), 1e-15);
  }
  for (int n : {1, 5, 20}) EXPECT_NEAR(reflection_probability_closed(n, Bandwidth(1e-9)), 1.0, 1e-6);
  EXPECT_THROW(reflection_probability_closed(0, Bandwidth(1.0)), InvalidArgument);
}

TEST(ReflectionClosed, MatchesFactorialProduct) {
  // Direct product with N! for moderate N, where nothing overflows.
  for (int n = 1; n <= 12; ++n) {
    for (double g : {0.05, 1.0, 30.0}) {
      double direct = factorial(n);
      for (int m = 0; m < n; ++m) direct *= 4.0 / ((1.0 + m) * (2.0 + m * g) * (2.0 + g + 2.0 * m * g));
      EXPECT_NEAR(reflection_probability_closed(n, Bandwidth(g)), direct, 1e-13 * direct) << n << " " << g;
    }
  }
}

TEST(ReflectionClosed, BoundsMonotonicityLimits) {
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(std::pow(10.0, -3.0 + 6.0 * i / 49.0));
  for (int n = 1; n <= 50; ++n) {
    double prev = 1.0;
    for (double g : grid) {
      const double r = reflection_probability_closed(n, Bandwidth(g));
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 1.0);
      // R_50 underflows a double near Gamma = 1e3, so order is checked on the logarithm.
      const double lr = log_reflection_probability_closed(n, Bandwidth(g));
      EXPECT_LT(lr, prev);
      if (n > 1) {
        EXPECT_LT(lr, log_reflection_probability_closed(n - 1, Bandwidth(g)));
      }
      prev = lr;
    }
    EXPECT_LT(reflection_probability_closed(n, Bandwidth(1e3)), 1e-2);
    if (n <= 3) {
      EXPECT_GT(reflection_probability_closed(n, Bandwidth(1e-3)), 0.99);
    }
  }
}

TEST(ReflectionNumeric, Examples) {
  EXPECT_NEAR(*reflection_probability_numeric(1, Bandwidth(2.0)).r_numeric, 0.5, 1e-8);
  EXPECT_NEAR(*reflection_probability_numeric(2, Bandwidth(2.0)).r_numeric, 0.0625, 1e-7);
  const auto r3 = reflection_probability_numeric(3, Bandwidth(10.0));
  EXPECT_LE(*r3.abs_err, 1e-6);
  EXPECT_LT(*r3.r_numeric, reflection_probability_closed(2, Bandwidth(10.0)));
  EXPECT_LT(reflection_probability_closed(2, Bandwidth(10.0)), reflection_probability_closed(1, Bandwidth(10.0)));
  EXPECT_THROW(reflection_probability_numeric(6, Bandwidth(1.0)), InvalidArgument);
  EXPECT_THROW(reflection_probability_numeric(0, Bandwidth(1.0)), InvalidArgument);
}

TEST(ReflectionNumeric, AgreesWithClosedFormOnGrid) {
  for (int n = 1; n <= 5; ++n) {
    for (double g : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      const auto r = reflection_probability_numeric(n, Bandwidth(g));
      EXPECT_LE(*r.abs_err, 1e-6) << n << " " << g;
      EXPECT_EQ(*r.abs_err, std::abs(r.r_closed - *r.r_numeric));
    }
  }
}

TEST(Unitarity, TwoPhotonLongTime) {
  for (double g : {1.0, 20.0}) {
    EXPECT_NEAR(unitarity_check_two_photon(identical(2, g)), 1.0, 1e-5) << g;
  }
}

TEST(Unitarity, TwoPhotonReflectedChannelMatchesClosedForm) {
  // Right-moving input: the all-left channel is the doubly reflected one.
  for (double g : {0.5, 2.0}) {
    const auto w = identical(2, g);
    const AmplitudeEngine e(w);
    const auto ch = channel_probabilities(e, TimePoint(w.horizon()));
    EXPECT_NEAR(ch[0], reflection_probability_closed(2, Bandwidth(g)), 1e-7) << g;
  }
}

TEST(Unitarity, SinglePhoton) {
  for (double g : {0.3, 2.0, 8.0}) {
    const auto p = single_photon_probabilities(identical(1, g));
    EXPECT_NEAR(p[0], 2.0 / (2.0 + g), 1e-9) << g;
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-9) << g;
  }
}
