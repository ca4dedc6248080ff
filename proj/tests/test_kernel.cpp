#include <gtest/gtest.h>

#include <random>

#include <wgqed/kernel.hpp>

using namespace wgqed;

namespace {

// Reference value of the exponential-family window integral, straight from its definition.
double h_reference(double b, double a, double g) {
  QuadratureSpec q;
  q.rel_tol = 1e-14;
  q.abs_tol = 1e-17;
  auto f = [&](double t) { return std::exp(-(b - t)) * std::sqrt(g) * std::exp(-0.5 * g * t); };
  return integrate(f, a, b, q, {}, 0.25).value;
}

}  // namespace

TEST(KernelConvolve, TrivialCases) {
  QuadratureSpec q;
  auto zero = [](double) { return complex(0.0); };
  EXPECT_EQ(convolve_window(zero, 0.0, 3.0, 10.0, q), 0.0);
  const auto p = make_exponential_profile(Bandwidth(1.0));
  EXPECT_EQ(kernel_convolve(p, KernelSpan(TimePoint(1.5), TimePoint(1.5)), q), 0.0);
  EXPECT_THROW(KernelSpan(TimePoint(2.0), TimePoint(1.0)), InvalidArgument);
}

TEST(KernelConvolve, MatchesClosedFormExample) {
  QuadratureSpec q;
  const auto p = make_exponential_profile(Bandwidth(1.0));
  const complex k = kernel_convolve(p, KernelSpan(TimePoint(0.0), TimePoint(2.0)), q);
  const double h = h_closed_form(TimePoint(2.0), TimePoint(0.0), Bandwidth(1.0));
  EXPECT_NEAR(std::real(k), h, 1e-12 * h);
  EXPECT_EQ(std::imag(k), 0.0);
}

TEST(HClosedForm, Examples) {
  EXPECT_EQ(h_closed_form(1.3, 1.3, 0.7), 0.0);
  EXPECT_NEAR(h_closed_form(1.0, 0.0, 2.0), 0.52026, 5e-6);
  EXPECT_NEAR(h_closed_form(1.0, 0.0, 2.0), h_reference(1.0, 0.0, 2.0), 1e-14);
  EXPECT_NEAR(h_closed_form(2.0, 1.0, 1.0), 0.28950, 5e-6);
  EXPECT_NEAR(h_closed_form(2.0, 1.0, 1.0), h_reference(2.0, 1.0, 1.0), 1e-14);
  EXPECT_THROW(h_closed_form(1.0, 2.0, 1.0), InvalidArgument);
}

TEST(HClosedForm, AgreesWithConvolutionOnRandomTriples) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  QuadratureSpec q;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double g = 0.05 * std::pow(400.0, unit(rng));
    const auto p = make_exponential_profile(Bandwidth(g));
    const double reach = std::min(p.t_max(), 30.0);
    double a = reach * unit(rng), b = reach * unit(rng);
    if (a > b) std::swap(a, b);
    const complex k = kernel_convolve(p, KernelSpan(TimePoint(a), TimePoint(b)), q);
    worst = std::max(worst, std::abs(k - h_closed_form(b, a, g)));
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(HClosedForm, ContinuousAcrossDegeneratePoint) {
  for (auto [b, a] : {std::pair{1.0, 0.0}, std::pair{2.0, 1.0}}) {
    const double limit = h_closed_form(b, a, 2.0);
    EXPECT_LE(std::abs(h_closed_form(b, a, 2.0 + 1e-5) - limit), 1e-6);
    EXPECT_LE(std::abs(h_closed_form(b, a, 2.0 - 1e-5) - limit), 1e-6);
  }
  // Either side of the switch threshold the generic branch stays accurate.
  for (double g : {2.0 + 3e-6, 2.0 - 3e-6, 2.0 + 1e-3}) {
    EXPECT_NEAR(h_closed_form(3.0, 0.5, g), h_reference(3.0, 0.5, g), 1e-13) << g;
  }
}

TEST(HClosedForm, MonotoneInWindow) {
  for (double g : {0.1, 1.0, 2.0, 7.0}) {
    const double b = 3.0;
    double prev = h_closed_form(b, 0.0, g);
    for (int k = 1; k <= 300; ++k) {
      const double cur = h_closed_form(b, b * k / 300.0, g);
      EXPECT_LE(std::abs(cur), std::abs(prev) + 1e-15);
      prev = cur;
    }
  }
}

TEST(HClosedForm, LargeArgumentsStayFinite) {
  EXPECT_TRUE(std::isfinite(h_closed_form(400.0, 399.0, 20.0)));
  EXPECT_TRUE(std::isfinite(h_closed_form(900.0, 10.0, 0.05)));
  EXPECT_GE(h_closed_form(900.0, 10.0, 0.05), 0.0);
}

TEST(WeightedIntegral, Examples) {
  EXPECT_NEAR(weighted_h_norm_integral(0, Bandwidth(2.0), TimePoint(0.0)), 0.5, 1e-15);
  for (double g : {0.3, 1.0, 4.0}) {
    EXPECT_NEAR(weighted_h_norm_integral(0, Bandwidth(g), TimePoint(0.0)), 2.0 / (2.0 + g), 1e-15);
  }
  EXPECT_NEAR(weighted_h_norm_integral(1, Bandwidth(1.0), TimePoint(0.0)), 0.13333, 5e-6);
  EXPECT_THROW(weighted_h_norm_integral(-1, Bandwidth(1.0), TimePoint(0.0)), InvalidArgument);
}

TEST(WeightedIntegral, MatchesQuadrature) {
  QuadratureSpec q;
  q.rel_tol = 1e-12;
  for (int m : {0, 1, 2}) {
    for (double g : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      for (double tp : {0.0, 0.7, 3.0}) {
        auto f = [&](double tau) {
          const double h = h_closed_form(tau, tp, g);
          return std::exp(-m * tau * g) * h * h;
        };
        const double numeric = integrate_to_infinity(f, tp, std::min(1.0, 0.5 * g) * (1.0 + m), q).value;
        const double closed = weighted_h_norm_integral(m, Bandwidth(g), TimePoint(tp));
        EXPECT_NEAR(numeric, closed, 1e-7 * closed) << m << " " << g << " " << tp;
      }
    }
  }
}

TEST(ConvolutionTable, ExponentialMatchesClosedForm) {
  QuadratureSpec q;
  for (double g : {0.2, 2.0, 15.0}) {
    const auto p = make_exponential_profile(Bandwidth(g));
    const ConvolutionTable table(p, p.t_max(), p.panel_width(), {}, q);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, p.t_max());
    for (int i = 0; i < 200; ++i) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      EXPECT_NEAR(std::real(table(b, a)), h_closed_form(b, a, g), 1e-12) << g;
    }
    EXPECT_NEAR(std::real(table(p.t_max() + 3.0, 1.0)), std::exp(-3.0) * h_closed_form(p.t_max(), 1.0, g), 1e-12);
  }
}

TEST(ConvolutionTable, SampledProfileMatchesDirect) {
  std::vector<double> t;
  std::vector<complex> v;
  for (int i = 0; i <= 300; ++i) {
    t.push_back(i * 0.1);
    v.push_back(std::exp(complex(-0.4, 1.3) * t.back()) * std::sqrt(0.8));
  }
  const auto p = PulseProfile::sampled(t, v, 1e-2);
  QuadratureSpec q;
  const ProfileKernel tab(p, KernelBackend::automatic, q);
  const ProfileKernel direct(p, KernelBackend::direct, q);
  for (auto [b, a] : {std::pair{0.55, 0.0}, std::pair{7.31, 2.02}, std::pair{29.9, 29.85}, std::pair{35.0, 3.0}}) {
    EXPECT_LT(std::abs(tab(b, a) - direct(b, a)), 1e-11) << b << " " << a;
  }
}
