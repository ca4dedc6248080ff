#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "core.hpp"
#include "pulse.hpp"
#include "quadrature.hpp"

namespace wgqed {

/// Closed-form branch switches to its Gamma = 2 limit when |1 - Gamma/2| is below this.
inline constexpr double kDegenerateEpsilon = 1e-6;

/// Absorption window [a, b] of an emission at b.
class KernelSpan {
 public:
  KernelSpan(TimePoint a, TimePoint b) : a_(a), b_(b) {
    if (a > b) throw InvalidArgument("kernel span needs a <= b");
  }
  double a() const noexcept { return a_.value(); }
  double b() const noexcept { return b_.value(); }

 private:
  TimePoint a_, b_;
};

/// int_a^b exp(-(b - t)) f(t) dt for an envelope f supported on [0, t_max].
template <class F>
complex convolve_window(F&& f, double a, double b, double t_max, const QuadratureSpec& quad,
                        std::span<const double> breakpoints = {}, double panel_width = 0.5) {
  const double hi = std::min(b, t_max);
  if (!(hi > a)) return 0.0;
  auto integrand = [&](double t) -> complex { return std::exp(t - b) * f(t); };
  return integrate(integrand, a, hi, quad, breakpoints, panel_width).value;
}

/// Unsigned convolution of the atomic response with a single-photon envelope.
inline complex kernel_convolve(const PulseProfile& profile, const KernelSpan& span, const QuadratureSpec& quad) {
  quad.validate();
  return convolve_window(profile, span.a(), span.b(), profile.t_max(), quad, profile.breakpoints(),
                         profile.panel_width());
}

/// int_{tau_prev}^{tau_i} exp(-(tau_i - t)) sqrt(Gamma) exp(-t Gamma / 2) dt.
inline double h_closed_form(double tau_i, double tau_prev, double gamma) {
  if (tau_prev > tau_i) throw InvalidArgument("h_closed_form needs tau_prev <= tau_i");
  if (!(gamma > 0.0)) throw InvalidArgument("h_closed_form needs Gamma > 0");
  const double width = tau_i - tau_prev;
  if (width == 0.0) return 0.0;
  const double x = 1.0 - 0.5 * gamma;
  if (std::abs(x) < kDegenerateEpsilon) return std::sqrt(2.0) * width * std::exp(-tau_i);
  // e^{-tau_i Gamma/2} - e^{-tau_i + tau_prev x}, factored so neither branch overflows.
  if (x > 0.0) return std::sqrt(gamma) * std::exp(-0.5 * gamma * tau_i) * (-std::expm1(-width * x)) / x;
  return std::sqrt(gamma) * std::exp(-tau_i + tau_prev * x) * std::expm1(width * x) / x;
}

inline double h_closed_form(TimePoint tau_i, TimePoint tau_prev, Bandwidth gamma_bw) {
  return h_closed_form(tau_i.value(), tau_prev.value(), gamma_bw.value());
}

/// int_{tau_prev}^inf exp(-m tau Gamma) |h(tau, tau_prev)|^2 dtau in closed form.
inline double weighted_h_norm_integral(int m, Bandwidth gamma_bw, TimePoint tau_prev) {
  if (m < 0) throw InvalidArgument("weighted_h_norm_integral needs m >= 0");
  const double g = gamma_bw.value();
  const double mm = m;
  return 4.0 * std::exp(-(1.0 + mm) * tau_prev.value() * g) / ((1.0 + mm) * (2.0 + mm * g) * (2.0 + g + 2.0 * mm * g));
}

/// Psi(x) = int_0^x exp(-(x - t)) f(t) dt tabulated by piecewise Chebyshev interpolation, so that
/// K(b, a) = Psi(b) - exp(-(b - a)) Psi(a) costs two table lookups.
class ConvolutionTable {
 public:
  static constexpr int kDegree = 16;

  template <class F>
  ConvolutionTable(F&& f, double t_max, double panel_width, std::span<const double> breakpoints,
                   const QuadratureSpec& quad)
      : t_max_(t_max) {
    if (!(t_max > 0.0) || !(panel_width > 0.0)) throw InvalidArgument("convolution table needs positive extents");
    std::vector<double> cuts{0.0, t_max};
    for (double p : breakpoints) {
      if (p > 0.0 && p < t_max) cuts.push_back(p);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const int pieces = std::max(1, static_cast<int>(std::ceil((cuts[i + 1] - cuts[i]) / panel_width - 1e-9)));
      for (int k = 0; k < pieces; ++k) edges_.push_back(cuts[i] + (cuts[i + 1] - cuts[i]) * k / pieces);
    }
    edges_.push_back(t_max);

    const std::size_t panels = edges_.size() - 1;
    values_.resize(panels * (kDegree + 1));
    complex start = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
      const double lo = edges_[p];
      const double hi = edges_[p + 1];
      for (int j = 0; j <= kDegree; ++j) {
        const double y = node(lo, hi, j);
        complex partial = 0.0;
        if (y > lo) {
          auto integrand = [&](double t) -> complex { return std::exp(t - y) * f(t); };
          partial = integrate(integrand, lo, y, quad).value;
        }
        values_[p * (kDegree + 1) + j] = std::exp(lo - y) * start + partial;
      }
      // Node 0 sits at the upper edge of the panel.
      start = values_[p * (kDegree + 1)];
    }
  }

  double t_max() const { return t_max_; }

  /// Psi(x) for x in [0, t_max].
  complex psi(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= t_max_) return values_[(edges_.size() - 2) * (kDegree + 1)];
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    const std::size_t p = static_cast<std::size_t>(it - edges_.begin()) - 1;
    const double lo = edges_[p];
    const double hi = edges_[p + 1];
    const complex* v = &values_[p * (kDegree + 1)];
    const double s = (2.0 * x - lo - hi) / (hi - lo);
    complex num = 0.0;
    double den = 0.0;
    for (int j = 0; j <= kDegree; ++j) {
      const double xj = std::cos(kPi * j / kDegree);
      const double diff = s - xj;
      if (diff == 0.0) return v[j];
      double w = (j % 2 == 0) ? 1.0 : -1.0;
      if (j == 0 || j == kDegree) w *= 0.5;
      w /= diff;
      num += w * v[j];
      den += w;
    }
    return num / den;
  }

  /// int_a^b exp(-(b - t)) f(t) dt, with f = 0 beyond t_max.
  complex operator()(double b, double a) const {
    if (!(b > a)) return 0.0;
    if (a >= t_max_) return 0.0;
    if (b > t_max_) return std::exp(t_max_ - b) * (*this)(t_max_, a);
    return psi(b) - std::exp(a - b) * psi(a);
  }

 private:
  static double node(double lo, double hi, int j) {
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(kPi * j / kDegree);
  }

  double t_max_;
  std::vector<double> edges_;
  std::vector<complex> values_;
};

enum class KernelBackend {
  /// Closed form for exponential envelopes, tabulated otherwise.
  automatic,
  /// Adaptive quadrature on every call.
  direct,
  /// Always tabulated.
  tabulated,
};

/// K(b, a) = int_a^b exp(-(b - t)) xi(t) dt for one fixed envelope.
class ProfileKernel {
 public:
  ProfileKernel(PulseProfile profile, KernelBackend backend, const QuadratureSpec& quad)
      : profile_(std::move(profile)), quad_(quad) {
    const auto bw = profile_.bandwidth();
    if (backend == KernelBackend::automatic && bw) {
      gamma_ = bw->value();
    } else if (backend != KernelBackend::direct) {
      table_ = std::make_shared<const ConvolutionTable>(profile_, profile_.t_max(), profile_.panel_width(),
                                                        profile_.breakpoints(), quad_);
    }
  }

  complex operator()(double b, double a) const {
    if (!(b > a)) return 0.0;
    const double t_max = profile_.t_max();
    if (gamma_ > 0.0) {
      if (a >= t_max) return 0.0;
      if (b > t_max) return std::exp(t_max - b) * h_closed_form(t_max, a, gamma_);
      return h_closed_form(b, a, gamma_);
    }
    if (table_) return (*table_)(b, a);
    return convolve_window(profile_, a, b, t_max, quad_, profile_.breakpoints(), profile_.panel_width());
  }

  const PulseProfile& profile() const { return profile_; }

 private:
  PulseProfile profile_;
  QuadratureSpec quad_;
  double gamma_ = 0.0;
  std::shared_ptr<const ConvolutionTable> table_;
};

}  // namespace wgqed
