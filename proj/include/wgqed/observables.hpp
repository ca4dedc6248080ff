#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "amplitudes.hpp"
#include "kernel.hpp"
#include "parallel.hpp"

namespace wgqed {

/// Probability that the atom is excited at time t, for one- or two-photon inputs with the atom
/// initially in its ground state.
inline double excitation_probability(TimePoint t, const AmplitudeEngine& engine) {
  const WavepacketN& w = engine.wavepacket();
  const double tt = t.value();
  if (w.n_photons() == 1) {
    const std::array<double, 1> lower{0.0}, upper{tt};
    return std::norm(engine.emission_integral(lower, upper));
  }
  if (w.n_photons() != 2) throw InvalidArgument("excitation probability is available for one or two photons");
  if (tt == 0.0) return 0.0;
  // The companion photon is either still free at tau or was itself emitted at tau <= t.
  auto density = [&](double tau) {
    double sum = 0.0;
    const complex both = gate_open(tt, tau) ? engine.double_emission(tau, tt) : complex(0.0);
    for (Direction d : {Direction::left, Direction::right}) sum += std::norm(engine.spectator_emission(d, tt, tau) + both);
    return sum;
  };
  std::vector<double> cuts = w.breakpoints();
  cuts.push_back(tt);
  const QuadratureSpec& q = engine.quadrature();
  return integrate(density, 0.0, std::max(tt, w.horizon()), q, cuts, w.panel_width()).value;
}

inline double excitation_probability(TimePoint t, const WavepacketN& w, const QuadratureSpec& quad = {}) {
  return excitation_probability(t, AmplitudeEngine(w, quad));
}

struct ExcitationTrace {
  std::vector<double> times;
  std::vector<double> values;
};

inline ExcitationTrace excitation_trace(std::vector<double> times, const WavepacketN& w,
                                        const QuadratureSpec& quad = {}) {
  const AmplitudeEngine engine(w, quad);
  ExcitationTrace trace{std::move(times), {}};
  trace.values.resize(trace.times.size());
  parallel_for(trace.times.size(), [&](std::size_t i) {
    trace.values[i] = excitation_probability(TimePoint(trace.times[i]), engine);
  });
  return trace;
}

/// log R_N for identical exponential modes, where
/// R_N = prod_{m<N} 1 / ((1 + m Gamma/2)(1 + Gamma/2 + m Gamma)).
inline double log_reflection_probability_closed(int n, Bandwidth gamma_bw) {
  if (n < 1) throw InvalidArgument("reflection probability needs N >= 1");
  const double g = gamma_bw.value();
  double log_r = 0.0;
  for (int m = 0; m < n; ++m) log_r -= std::log1p(0.5 * m * g) + std::log1p(0.5 * g + m * g);
  return log_r;
}

/// Probability that all N photons of identical exponential modes are reflected.
inline double reflection_probability_closed(int n, Bandwidth gamma_bw) {
  return std::exp(log_reflection_probability_closed(n, gamma_bw));
}

struct ReflectionResult {
  int n_photons;
  Bandwidth gamma_bw;
  double r_closed;
  std::optional<double> r_numeric;
  std::optional<double> abs_err;
};

namespace detail {

// Chebyshev-Lobatto interpolant on [0, 1].
class ChebyshevUnit {
 public:
  explicit ChebyshevUnit(int degree) : degree_(degree), values_(static_cast<std::size_t>(degree) + 1, 0.0) {}

  double node(int j) const { return 0.5 + 0.5 * std::cos(kPi * j / degree_); }
  void set(int j, double v) { values_[static_cast<std::size_t>(j)] = v; }

  double operator()(double x) const {
    const double s = 2.0 * x - 1.0;
    double num = 0.0, den = 0.0;
    for (int j = 0; j <= degree_; ++j) {
      const double diff = s - std::cos(kPi * j / degree_);
      if (diff == 0.0) return values_[static_cast<std::size_t>(j)];
      double w = (j % 2 == 0) ? 1.0 : -1.0;
      if (j == 0 || j == degree_) w *= 0.5;
      w /= diff;
      num += w * values_[static_cast<std::size_t>(j)];
      den += w;
    }
    return num / den;
  }

 private:
  int degree_;
  std::vector<double> values_;
};

}  // namespace detail

/// Nested reflection integral N! int_0^inf |h(tau_1, 0)|^2 int_{tau_1}^inf |h(tau_2, tau_1)|^2 ...
/// evaluated level by level: each inner level is tabulated as a function of the previous emission
/// time in the variable v = exp(-Gamma tau) and interpolated.
inline ReflectionResult reflection_probability_numeric(int n, Bandwidth gamma_bw, const QuadratureSpec& quad = {}) {
  if (n < 1 || n > 5) throw InvalidArgument("numeric reflection probability supports 1 <= N <= 5");
  quad.validate();
  const double g = gamma_bw.value();
  const double rate = std::min(1.0, 0.5 * g);
  constexpr int kDegree = 32;
  QuadratureSpec q = quad;
  q.rel_tol = std::min(q.rel_tol, 1e-11);

  std::optional<detail::ChebyshevUnit> inner;
  auto next_level = [&](double tau) { return inner ? (*inner)(std::exp(-g * tau)) : 1.0; };
  auto level_at = [&](double tau_prev) {
    auto f = [&](double tau) {
      const double h = h_closed_form(tau, tau_prev, g);
      return h * h * next_level(tau);
    };
    return integrate_to_infinity(f, tau_prev, rate, q, 16).value;
  };
  for (int level = n; level >= 2; --level) {
    detail::ChebyshevUnit table(kDegree);
    for (int j = 0; j <= kDegree; ++j) {
      const double v = table.node(j);
      table.set(j, v <= 0.0 ? 0.0 : level_at(-std::log(v) / g));
    }
    inner = std::move(table);
  }
  const double numeric = factorial(n) * level_at(0.0);
  const double closed = reflection_probability_closed(n, gamma_bw);
  return {n, gamma_bw, closed, numeric, std::abs(closed - numeric)};
}

/// Three non-negative partial sums integrated together.
struct ChannelSums {
  std::array<double, 3> v{};
  ChannelSums& operator+=(const ChannelSums& o) {
    for (int i = 0; i < 3; ++i) v[i] += o.v[i];
    return *this;
  }
  ChannelSums& operator-=(const ChannelSums& o) {
    for (int i = 0; i < 3; ++i) v[i] -= o.v[i];
    return *this;
  }
  ChannelSums& operator*=(double s) {
    for (auto& x : v) x *= s;
    return *this;
  }
  friend ChannelSums operator+(ChannelSums a, const ChannelSums& b) { return a += b; }
  friend ChannelSums operator-(ChannelSums a, const ChannelSums& b) { return a -= b; }
  friend ChannelSums operator*(double s, ChannelSums a) { return a *= s; }
  friend ChannelSums operator*(ChannelSums a, double s) { return s * a; }
  friend ChannelSums operator-(ChannelSums a) { return -1.0 * a; }
  friend double abs(const ChannelSums& a) { return std::abs(a.v[0]) + std::abs(a.v[1]) + std::abs(a.v[2]); }
};

/// Squared norms of f0, f1, f2 at dynamical time t, each over the full quadrant.
inline std::array<double, 3> channel_probabilities(const AmplitudeEngine& engine, TimePoint t) {
  const WavepacketN& w = engine.wavepacket();
  if (w.n_photons() != 2) throw InvalidArgument("channel probabilities need a two-photon input");
  const double tt = t.value();
  const double extent = std::max(tt, w.horizon());
  QuadratureSpec outer = engine.quadrature();
  outer.rel_tol = std::max(outer.rel_tol, 1e-10);
  const QuadratureSpec inner = outer.tightened(0.1);
  std::vector<double> cuts = w.breakpoints();
  if (tt < extent) cuts.push_back(tt);
  const double panel = std::max(w.panel_width(), 0.25);
  // Integrate over the triangle lo <= hi, adding both orderings.
  auto cell = [&](double lo, double hi) {
    const auto a = engine.two_photon(lo, hi, tt);
    const auto b = engine.two_photon(hi, lo, tt);
    return ChannelSums{{std::norm(a.f0) + std::norm(b.f0), std::norm(a.f1) + std::norm(b.f1),
                        std::norm(a.f2) + std::norm(b.f2)}};
  };
  auto row = [&](double hi) {
    auto f = [&](double lo) { return cell(lo, hi); };
    return integrate(f, 0.0, hi, inner, cuts, panel).value;
  };
  return integrate(row, 0.0, extent, outer, cuts, panel).value.v;
}

/// Total probability of the long-time two-photon output (all gates open at t = horizon).
inline double unitarity_check_two_photon(const WavepacketN& w, const QuadratureSpec& quad = {}) {
  if (w.n_photons() != 2) throw InvalidArgument("unitarity check needs a two-photon input");
  const AmplitudeEngine engine(w, quad);
  const auto p = channel_probabilities(engine, TimePoint(w.horizon()));
  return p[0] + p[1] + p[2];
}

/// Long-time output probabilities of a single photon: {left-moving, right-moving}.
inline std::array<double, 2> single_photon_probabilities(const WavepacketN& w, const QuadratureSpec& quad = {}) {
  const AmplitudeEngine engine(w, quad);
  const double horizon = w.horizon();
  std::array<double, 2> out{};
  for (int side = 0; side < 2; ++side) {
    auto f = [&](double tau) {
      const auto o = engine.single_photon(tau, horizon);
      return std::norm(side == 0 ? o.left : o.right);
    };
    out[static_cast<std::size_t>(side)] = integrate(f, 0.0, horizon, quad, w.breakpoints(), w.panel_width()).value;
  }
  return out;
}

}  // namespace wgqed
