#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "core.hpp"
#include "quadrature.hpp"

namespace wgqed {

/// Default truncation horizon max(20, 40/Gamma): pulse and atomic response both decay
/// below 1e-8 in amplitude.
inline TimePoint default_horizon(Bandwidth gamma_bw) { return TimePoint(std::max(20.0, 40.0 / gamma_bw.value())); }

/// Single-photon temporal envelope xi(tau), zero outside [0, t_max].
class PulseProfile {
 public:
  enum class Kind { exponential, sampled, closure };

  /// sqrt(Gamma) exp(-tau Gamma / 2) on [0, t_max].
  static PulseProfile exponential(Bandwidth gamma_bw, TimePoint t_max, double norm_tol = kDefaultNormTolerance) {
    const double g = gamma_bw.value();
    const double norm = -std::expm1(-g * t_max.value());
    check_norm(norm, norm_tol, "exponential profile truncated at t_max=" + std::to_string(t_max.value()));
    return PulseProfile(std::make_shared<const Impl>(Impl{Exponential{g}, t_max.value(), norm, std::min(0.5, 1.0 / g)}));
  }

  /// Piecewise-linear interpolation of complex samples on a strictly increasing grid.
  static PulseProfile sampled(std::vector<double> times, std::vector<complex> values,
                              double norm_tol = kDefaultNormTolerance) {
    if (times.size() != values.size() || times.size() < 2) {
      throw InvalidArgument("sampled profile needs at least two (time, value) pairs of equal length");
    }
    if (times.front() < 0.0) throw InvalidArgument("sampled profile times must be non-negative");
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1])) throw InvalidArgument("sampled profile grid must be strictly increasing");
    }
    double norm = 0.0;
    double widest = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
      const double h = times[i + 1] - times[i];
      const complex f0 = values[i];
      const complex f1 = values[i + 1];
      norm += h * (std::norm(f0) + std::norm(f1) + std::real(f0 * std::conj(f1))) / 3.0;
      widest = std::max(widest, h);
    }
    check_norm(norm, norm_tol, "sampled profile");
    const double t_max = times.back();
    return PulseProfile(std::make_shared<const Impl>(
        Impl{Sampled{std::move(times), std::move(values)}, t_max, norm, std::min(0.5, widest)}));
  }

  /// Arbitrary envelope given as a callable; its norm is computed by quadrature.
  static PulseProfile closure(std::function<complex(double)> fn, TimePoint t_max, double panel_width = 0.5,
                              double norm_tol = kDefaultNormTolerance) {
    if (!fn) throw InvalidArgument("closure profile needs a callable");
    if (!(panel_width > 0.0)) throw InvalidArgument("closure profile panel width must be positive");
    QuadratureSpec q;
    q.rel_tol = 1e-13;
    q.abs_tol = 1e-15;
    auto sq = [&](double t) { return std::norm(fn(t)); };
    const double norm = integrate(sq, 0.0, t_max.value(), q, {}, panel_width).value;
    check_norm(norm, norm_tol, "closure profile");
    return PulseProfile(std::make_shared<const Impl>(Impl{Closure{std::move(fn)}, t_max.value(), norm, panel_width}));
  }

  complex operator()(double tau) const {
    const Impl& p = *impl_;
    if (tau < 0.0 || tau > p.t_max) return 0.0;
    if (const auto* e = std::get_if<Exponential>(&p.shape)) {
      return std::sqrt(e->gamma) * std::exp(-0.5 * e->gamma * tau);
    }
    if (const auto* s = std::get_if<Sampled>(&p.shape)) {
      const auto& t = s->times;
      if (tau < t.front()) return 0.0;
      auto it = std::upper_bound(t.begin(), t.end(), tau);
      if (it == t.end()) return s->values.back();
      const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
      const double u = (tau - t[i]) / (t[i + 1] - t[i]);
      return (1.0 - u) * s->values[i] + u * s->values[i + 1];
    }
    return std::get<Closure>(p.shape).fn(tau);
  }

  Kind kind() const {
    switch (impl_->shape.index()) {
      case 0: return Kind::exponential;
      case 1: return Kind::sampled;
      default: return Kind::closure;
    }
  }

  double t_max() const { return impl_->t_max; }
  /// Squared L2 norm over [0, t_max].
  double norm() const { return impl_->norm; }
  /// Natural panel width for composite quadrature of this envelope.
  double panel_width() const { return impl_->panel_width; }

  std::optional<Bandwidth> bandwidth() const {
    if (const auto* e = std::get_if<Exponential>(&impl_->shape)) return Bandwidth(e->gamma);
    return std::nullopt;
  }

  /// Interpolation nodes, where the envelope has derivative jumps.
  std::span<const double> breakpoints() const {
    if (const auto* s = std::get_if<Sampled>(&impl_->shape)) return s->times;
    return {};
  }

  const std::vector<double>* sample_times() const {
    const auto* s = std::get_if<Sampled>(&impl_->shape);
    return s ? &s->times : nullptr;
  }
  const std::vector<complex>* sample_values() const {
    const auto* s = std::get_if<Sampled>(&impl_->shape);
    return s ? &s->values : nullptr;
  }

  /// xi(omega) = (2 pi)^(-1/2) int xi(tau) exp(+i omega tau) dtau.
  complex spectrum(double omega) const {
    const Impl& p = *impl_;
    const complex i{0.0, 1.0};
    if (const auto* e = std::get_if<Exponential>(&p.shape)) {
      const complex rate = 0.5 * e->gamma - i * omega;
      return std::sqrt(e->gamma / (2.0 * kPi)) * (-wgqed::expm1(-rate * p.t_max)) / rate;
    }
    QuadratureSpec q;
    q.rel_tol = 1e-12;
    q.abs_tol = 1e-15;
    const double width = std::min(p.panel_width, std::abs(omega) > 0 ? 1.0 / std::abs(omega) : p.panel_width);
    auto f = [&](double t) { return (*this)(t) * std::exp(i * omega * t); };
    return integrate(f, 0.0, p.t_max, q, breakpoints(), width).value / std::sqrt(2.0 * kPi);
  }

  /// True when both describe the same single-photon mode.
  bool same_mode(const PulseProfile& other) const {
    if (impl_ == other.impl_) return true;
    if (impl_->t_max != other.impl_->t_max) return false;
    const auto* a = std::get_if<Exponential>(&impl_->shape);
    const auto* b = std::get_if<Exponential>(&other.impl_->shape);
    if (a && b) return a->gamma == b->gamma;
    const auto* sa = std::get_if<Sampled>(&impl_->shape);
    const auto* sb = std::get_if<Sampled>(&other.impl_->shape);
    if (sa && sb) return sa->times == sb->times && sa->values == sb->values;
    return false;
  }

 private:
  struct Exponential {
    double gamma;
  };
  struct Sampled {
    std::vector<double> times;
    std::vector<complex> values;
  };
  struct Closure {
    std::function<complex(double)> fn;
  };
  struct Impl {
    std::variant<Exponential, Sampled, Closure> shape;
    double t_max;
    double norm;
    double panel_width;
  };

  explicit PulseProfile(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  static void check_norm(double norm, double tol, const std::string& what) {
    if (!(std::abs(norm - 1.0) <= tol)) {
      throw NormalizationError(what + " has squared norm " + std::to_string(norm) + ", outside 1 +/- " +
                                   std::to_string(tol),
                               norm);
    }
  }

  std::shared_ptr<const Impl> impl_;
};

inline PulseProfile make_exponential_profile(Bandwidth gamma_bw, TimePoint t_max) {
  return PulseProfile::exponential(gamma_bw, t_max);
}

inline PulseProfile make_exponential_profile(Bandwidth gamma_bw) {
  return PulseProfile::exponential(gamma_bw, default_horizon(gamma_bw));
}

/// <p|q> over the common support.
inline complex profile_overlap(const PulseProfile& p, const PulseProfile& q) {
  if (p.same_mode(q)) return p.norm();
  QuadratureSpec spec;
  spec.rel_tol = 1e-13;
  spec.abs_tol = 1e-15;
  std::vector<double> cuts(p.breakpoints().begin(), p.breakpoints().end());
  cuts.insert(cuts.end(), q.breakpoints().begin(), q.breakpoints().end());
  const double end = std::min(p.t_max(), q.t_max());
  auto f = [&](double t) { return std::conj(p(t)) * q(t); };
  return integrate(f, 0.0, end, spec, cuts, std::min(p.panel_width(), q.panel_width())).value;
}

}  // namespace wgqed
