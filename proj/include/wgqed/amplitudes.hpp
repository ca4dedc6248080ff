#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "core.hpp"
#include "kernel.hpp"
#include "quadrature.hpp"
#include "wavepacket.hpp"

namespace wgqed {

/// Atomic emission times in non-decreasing order. Ties are accepted: the amplitude is
/// continuous there, so the ordering of equal entries is unobservable.
class EmissionTimeList {
 public:
  explicit EmissionTimeList(std::vector<double> times) : times_(std::move(times)) {
    for (std::size_t i = 0; i < times_.size(); ++i) {
      if (!std::isfinite(times_[i]) || times_[i] < 0.0) {
        throw InvalidArgument("emission times must be finite and non-negative");
      }
      if (i > 0 && times_[i] < times_[i - 1]) throw InvalidArgument("emission times must be sorted increasingly");
    }
  }
  EmissionTimeList(std::initializer_list<double> times) : EmissionTimeList(std::vector<double>(times)) {}

  static EmissionTimeList from_unsorted(std::vector<double> times) {
    std::stable_sort(times.begin(), times.end());
    return EmissionTimeList(std::move(times));
  }

  std::size_t size() const { return times_.size(); }
  double operator[](std::size_t i) const { return times_[i]; }
  std::span<const double> values() const { return times_; }
  double back() const { return times_.back(); }

 private:
  std::vector<double> times_;
};

enum class AmplitudeMethod {
  /// Permanents of kernel matrices for separable inputs; exact hat-function weights for sampled tensors.
  automatic,
  /// Nested adaptive quadrature of the extraction amplitude (separable inputs only).
  quadrature,
};

/// Normalized two-photon output amplitudes: f2 both right-moving, f1 first argument
/// right-moving and second left-moving, f0 both left-moving.
struct TwoPhotonOutputs {
  complex f0, f1, f2;
};

struct SinglePhotonOutputs {
  complex left, right;
};

namespace detail {

// int over the box prod_s [lower_s, upper_s] of prod_s exp(t_s - upper_s) g(t), innermost
// coordinate last.
template <class G>
complex nested_box_integral(std::span<const double> lower, std::span<const double> upper, double horizon,
                            const G& g, const QuadratureSpec& quad, std::span<const double> cuts,
                            double panel_width) {
  const std::size_t n = lower.size();
  std::vector<double> point(n, 0.0);
  std::function<complex(std::size_t)> level = [&](std::size_t s) -> complex {
    if (s == n) return g(std::span<const double>(point));
    const double hi = std::min(upper[s], horizon);
    if (!(hi > lower[s])) return 0.0;
    const QuadratureSpec inner = quad.tightened(std::pow(0.1, static_cast<double>(s)));
    auto f = [&](double t) -> complex {
      point[s] = t;
      return std::exp(t - upper[s]) * level(s + 1);
    };
    return integrate(f, lower[s], hi, inner, cuts, panel_width).value;
  };
  return level(0);
}

// W_k = int_lo^hi exp(t - b) phi_k(t) dt for the hat functions phi_k of the axis.
inline std::vector<double> hat_weights(const std::vector<double>& axis, double lo, double hi, double b) {
  using GL = boost::math::quadrature::gauss<double, 6>;
  std::vector<double> w(axis.size(), 0.0);
  lo = std::max(lo, axis.front());
  hi = std::min(hi, axis.back());
  if (!(hi > lo)) return w;
  auto first = std::upper_bound(axis.begin(), axis.end(), lo);
  std::size_t k = first == axis.begin() ? 0 : static_cast<std::size_t>(first - axis.begin()) - 1;
  for (; k + 1 < axis.size() && axis[k] < hi; ++k) {
    const double x0 = axis[k];
    const double width = axis[k + 1] - x0;
    const double c0 = std::max(lo, x0);
    const double c1 = std::min(hi, axis[k + 1]);
    if (!(c1 > c0)) continue;
    const double mid = 0.5 * (c0 + c1);
    const double half = 0.5 * (c1 - c0);
    double left = 0.0, right = 0.0;
    const auto& xs = GL::abscissa();
    const auto& ws = GL::weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (double sgn : {-1.0, 1.0}) {
        const double t = mid + sgn * half * xs[i];
        const double e = ws[i] * std::exp(t - b);
        const double u = (t - x0) / width;
        left += e * (1.0 - u);
        right += e * u;
      }
    }
    w[k] += half * left;
    w[k + 1] += half * right;
  }
  return w;
}

// Interpolation weights of the hat functions at t: (index, weight) pairs.
inline std::array<std::pair<std::size_t, double>, 2> hat_values(const std::vector<double>& axis, double t) {
  if (t < axis.front() || t > axis.back()) return {{{0, 0.0}, {0, 0.0}}};
  auto it = std::upper_bound(axis.begin(), axis.end(), t);
  if (it == axis.end()) --it;
  const std::size_t i = static_cast<std::size_t>(it - axis.begin()) - 1;
  const double u = (t - axis[i]) / (axis[i + 1] - axis[i]);
  return {{{i, 1.0 - u}, {i + 1, u}}};
}

}  // namespace detail

/// Evaluates kernel-built amplitudes for one input wavepacket. Immutable after construction and
/// safe to share between threads.
class AmplitudeEngine {
 public:
  explicit AmplitudeEngine(WavepacketN w, QuadratureSpec quad = {}, KernelBackend backend = KernelBackend::automatic,
                           AmplitudeMethod method = AmplitudeMethod::automatic)
      : w_(std::move(w)), quad_(quad), method_(method) {
    quad_.validate();
    if (w_.is_separable()) {
      const auto modes = w_.modes();
      for (std::size_t j = 0; j < modes.size(); ++j) {
        std::size_t found = kernels_.size();
        for (std::size_t k = 0; k < j; ++k) {
          if (modes[k].profile.same_mode(modes[j].profile)) found = kernel_of_[k];
        }
        if (found == kernels_.size()) kernels_.emplace_back(modes[j].profile, backend, quad_);
        kernel_of_.push_back(found);
      }
    } else {
      const auto& axis = w_.tensor(2).axis();
      const std::size_t n = axis.size();
      const auto& t0 = w_.tensor(0).values();
      const auto& t1 = w_.tensor(1).values();
      const auto& t2 = w_.tensor(2).values();
      extraction_.resize(n * n);
      spectator_right_.resize(n * n);
      spectator_left_.resize(n * n);
      const double r2 = std::sqrt(2.0);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
          const std::size_t kl = k * n + l, lk = l * n + k;
          extraction_[kl] = r2 * (t0[kl] + t2[kl]) + t1[kl] + t1[lk];
          spectator_right_[kl] = r2 * t2[kl] + t1[lk];
          spectator_left_[kl] = t1[kl] + r2 * t0[kl];
        }
      }
    }
  }

  const WavepacketN& wavepacket() const { return w_; }
  const QuadratureSpec& quadrature() const { return quad_; }
  AmplitudeMethod method() const { return method_; }

  /// K_j(b, a) for photon j of a separable input.
  complex mode_kernel(std::size_t j, double b, double a) const { return kernels_.at(kernel_of_.at(j))(b, a); }

  /// int over prod_s [lower_s, upper_s] of prod_s exp(-(upper_s - t_s)) G(t), with G the
  /// extraction amplitude <vac| prod d_in(t_s) |psi>. No sign is applied.
  complex emission_integral(std::span<const double> lower, std::span<const double> upper) const {
    const std::size_t n = static_cast<std::size_t>(w_.n_photons());
    if (lower.size() != n || upper.size() != n) throw InvalidArgument("emission_integral: one span per photon");
    if (n == 0) return 1.0;
    if (!w_.is_separable()) {
      const auto& axis = w_.tensor(2).axis();
      const auto wa = detail::hat_weights(axis, lower[0], upper[0], upper[0]);
      const auto wb = detail::hat_weights(axis, lower[1], upper[1], upper[1]);
      return bilinear_form(wa, wb, extraction_);
    }
    if (method_ == AmplitudeMethod::quadrature) {
      auto g = [&](std::span<const double> t) { return w_.extraction_amplitude(t); };
      return detail::nested_box_integral(lower, upper, w_.horizon(), g, quad_, w_.breakpoints(), w_.panel_width());
    }
    if (w_.identical_modes()) {
      complex prod = 1.0;
      for (std::size_t s = 0; s < n; ++s) prod *= kernels_[0](upper[s], lower[s]);
      return factorial(static_cast<int>(n)) * prod / std::sqrt(w_.overlap_permanent());
    }
    std::vector<complex> m(n * n);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t j = 0; j < n; ++j) m[s * n + j] = mode_kernel(j, upper[s], lower[s]);
    }
    return permanent(m, n) / std::sqrt(w_.overlap_permanent());
  }

  /// Two-photon inputs: <vac| sigma_-(tau_e) a^d_{tau_s}(0) |psi>, the emission at tau_e of one
  /// photon while the other is found in direction d at tau_s.
  complex spectator_emission(Direction d, double tau_e, double tau_s) const {
    require_two();
    if (!w_.is_separable()) {
      const auto& axis = w_.tensor(2).axis();
      const auto wk = detail::hat_weights(axis, 0.0, tau_e, tau_e);
      const auto hv = detail::hat_values(axis, tau_s);
      const auto& m = d == Direction::right ? spectator_right_ : spectator_left_;
      const std::size_t n = axis.size();
      complex acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (wk[k] == 0.0) continue;
        acc += wk[k] * (hv[0].second * m[k * n + hv[0].first] + hv[1].second * m[k * n + hv[1].first]);
      }
      return -acc;
    }
    if (method_ == AmplitudeMethod::quadrature) {
      auto f = [&](double tp) -> complex {
        complex sum = 0.0;
        for (Direction dp : {Direction::left, Direction::right}) {
          const std::array<Direction, 2> dirs{dp, d};
          const std::array<double, 2> times{tp, tau_s};
          sum += w_.directed_amplitude(dirs, times);
        }
        return std::exp(tp - tau_e) * sum;
      };
      const double hi = std::min(tau_e, w_.horizon());
      if (!(hi > 0.0)) return 0.0;
      return -integrate(f, 0.0, hi, quad_, w_.breakpoints(), w_.panel_width()).value;
    }
    const auto modes = w_.modes();
    complex acc = 0.0;
    if (modes[1].direction == d) acc += mode_kernel(0, tau_e, 0.0) * modes[1].profile(tau_s);
    if (modes[0].direction == d) acc += mode_kernel(1, tau_e, 0.0) * modes[0].profile(tau_s);
    return -acc / std::sqrt(w_.overlap_permanent());
  }

  /// Two emissions at lo <= hi, the second absorbing only after the first: the shifted-kernel
  /// amplitude <vac| sigma_-(hi) sigma_-(lo) |psi> (sign (-1)^2 included).
  complex double_emission(double lo, double hi) const {
    require_two();
    const std::array<double, 2> lower{0.0, lo};
    const std::array<double, 2> upper{lo, hi};
    return emission_integral(lower, upper);
  }

  /// Linear-scatterer prediction for the double emission: both absorption windows start at 0.
  complex linear_double_emission(double tau1, double tau2) const {
    require_two();
    const std::array<double, 2> lower{0.0, 0.0};
    const std::array<double, 2> upper{tau1, tau2};
    return emission_integral(lower, upper);
  }

  /// Nonlinear correction in the normalization of the output wavepackets:
  /// B = -exp(-(hi - lo)) / sqrt(2) * int_0^lo int_0^lo exp(-(lo - t1)) exp(-(lo - t2)) G(t1, t2),
  /// which for photons incident from one side reduces to the xi_2 form. Equal times count once.
  complex nonlinear_correction(double tau1, double tau2) const {
    require_two();
    const double lo = std::min(tau1, tau2);
    const double hi = std::max(tau1, tau2);
    const std::array<double, 2> lower{0.0, 0.0};
    const std::array<double, 2> upper{lo, lo};
    return -std::exp(lo - hi) * emission_integral(lower, upper) / std::sqrt(2.0);
  }

  /// Per-time values a separable two-photon input needs: envelopes p_j(tau) and Psi_j(tau) = K_j(tau, 0).
  struct Node {
    double tau;
    std::array<complex, 2> p;
    std::array<complex, 2> psi;
  };

  Node node(double tau) const {
    require_two();
    if (!w_.is_separable()) throw InvalidArgument("node cache applies to separable inputs");
    const auto modes = w_.modes();
    return {tau, {modes[0].profile(tau), modes[1].profile(tau)}, {mode_kernel(0, tau, 0.0), mode_kernel(1, tau, 0.0)}};
  }

  /// f0, f1, f2 at dynamical time t. Emission terms are gated by theta(t - tau) with theta(0) = 1.
  TwoPhotonOutputs two_photon(double tau1, double tau2, double t) const {
    require_two();
    if (w_.is_separable() && method_ == AmplitudeMethod::automatic) return two_photon(node(tau1), node(tau2), t);
    const bool g1 = gate_open(t, tau1);
    const bool g2 = gate_open(t, tau2);
    std::array<complex, 4> raw{};  // index 2 * (d1 == right) + (d2 == right)
    complex dbl = 0.0;
    if (g1 && g2) dbl = double_emission(std::min(tau1, tau2), std::max(tau1, tau2));
    for (Direction d1 : {Direction::left, Direction::right}) {
      for (Direction d2 : {Direction::left, Direction::right}) {
        const std::array<Direction, 2> dirs{d1, d2};
        const std::array<double, 2> times{tau1, tau2};
        complex a = w_.directed_amplitude(dirs, times);
        if (g1) a += spectator_emission(d2, tau1, tau2);
        if (g2) a += spectator_emission(d1, tau2, tau1);
        a += dbl;
        raw[2 * (d1 == Direction::right) + (d2 == Direction::right)] = a;
      }
    }
    return normalize(raw);
  }

  /// Separable inputs from cached node values; identical to two_photon(tau1, tau2, t).
  TwoPhotonOutputs two_photon(const Node& a, const Node& b, double t) const {
    const auto modes = w_.modes();
    const Direction m0 = modes[0].direction, m1 = modes[1].direction;
    const double s = 1.0 / std::sqrt(w_.overlap_permanent());
    const bool g1 = gate_open(t, a.tau);
    const bool g2 = gate_open(t, b.tau);
    complex dbl = 0.0;
    if (g1 && g2) {
      const Node& lo = a.tau <= b.tau ? a : b;
      const Node& hi = a.tau <= b.tau ? b : a;
      const double decay = std::exp(lo.tau - hi.tau);
      const complex k0 = hi.psi[0] - decay * lo.psi[0];
      const complex k1 = hi.psi[1] - decay * lo.psi[1];
      dbl = s * (lo.psi[0] * k1 + lo.psi[1] * k0);
    }
    // Emission at e.tau with the other photon found in direction d at f.tau.
    auto spectator = [&](Direction d, const Node& e, const Node& f) {
      complex acc = 0.0;
      if (m1 == d) acc += e.psi[0] * f.p[1];
      if (m0 == d) acc += e.psi[1] * f.p[0];
      return -s * acc;
    };
    std::array<complex, 4> raw{};
    for (Direction d1 : {Direction::left, Direction::right}) {
      for (Direction d2 : {Direction::left, Direction::right}) {
        complex v = 0.0;
        if (m0 == d1 && m1 == d2) v += a.p[0] * b.p[1];
        if (m1 == d1 && m0 == d2) v += a.p[1] * b.p[0];
        v *= s;
        if (g1) v += spectator(d2, a, b);
        if (g2) v += spectator(d1, b, a);
        raw[2 * (d1 == Direction::right) + (d2 == Direction::right)] = v + dbl;
      }
    }
    return normalize(raw);
  }

  /// nonlinear_correction(a.tau, b.tau) from cached node values.
  complex nonlinear_correction(const Node& a, const Node& b) const {
    const Node& lo = a.tau <= b.tau ? a : b;
    const double gap = std::abs(a.tau - b.tau);
    return -std::exp(-gap) * std::sqrt(2.0) * lo.psi[0] * lo.psi[1] / std::sqrt(w_.overlap_permanent());
  }

  /// Single-photon inputs: output amplitude per direction at dynamical time t.
  SinglePhotonOutputs single_photon(double tau, double t) const {
    if (w_.n_photons() != 1) throw InvalidArgument("single_photon needs a one-photon input");
    complex emitted = 0.0;
    if (gate_open(t, tau)) {
      const std::array<double, 1> lower{0.0};
      const std::array<double, 1> upper{tau};
      emitted = -emission_integral(lower, upper);
    }
    const std::array<double, 1> times{tau};
    const std::array<Direction, 1> left{Direction::left};
    const std::array<Direction, 1> right{Direction::right};
    return {w_.directed_amplitude(left, times) + emitted, w_.directed_amplitude(right, times) + emitted};
  }

 private:
  void require_two() const {
    if (w_.n_photons() != 2) throw InvalidArgument("operation needs a two-photon input");
  }

  static TwoPhotonOutputs normalize(const std::array<complex, 4>& raw) {
    const double r2 = std::sqrt(2.0);
    return {raw[0] / r2, raw[2], raw[3] / r2};
  }

  static complex bilinear_form(const std::vector<double>& wa, const std::vector<double>& wb,
                               const std::vector<complex>& m) {
    const std::size_t n = wa.size();
    complex acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (wa[k] == 0.0) continue;
      complex row = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        if (wb[l] != 0.0) row += wb[l] * m[k * n + l];
      }
      acc += wa[k] * row;
    }
    return acc;
  }

  WavepacketN w_;
  QuadratureSpec quad_;
  AmplitudeMethod method_;
  std::vector<ProfileKernel> kernels_;
  std::vector<std::size_t> kernel_of_;
  std::vector<complex> extraction_, spectator_right_, spectator_left_;
};

/// Time-ordered emission amplitude of N excitations:
/// <vac| s(tau_N, tau_{N-1}) ... s(tau_2, tau_1) [exp(-tau_1) sigma_-(0) + s(tau_1)] |psi_in>,
/// with the (-1) per kernel emission applied here.
inline complex ordered_emission_amplitude(const EmissionTimeList& tau, const InitialState& state,
                                          const QuadratureSpec& quad = {},
                                          AmplitudeMethod method = AmplitudeMethod::automatic,
                                          KernelBackend backend = KernelBackend::automatic) {
  const std::size_t n = tau.size();
  if (n == 0) throw InvalidArgument("ordered_emission_amplitude needs at least one emission time");
  if (static_cast<std::size_t>(state.excitations()) != n) {
    throw InvalidArgument("number of emission times must equal the number of excitations");
  }
  complex total = 0.0;
  if (state.c_g != 0.0) {
    AmplitudeEngine engine(state.field_g, quad, backend, method);
    std::vector<double> lower(n), upper(n);
    for (std::size_t i = 0; i < n; ++i) {
      lower[i] = i == 0 ? 0.0 : tau[i - 1];
      upper[i] = tau[i];
    }
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    total += state.c_g * sign * engine.emission_integral(lower, upper);
  }
  if (state.c_e != 0.0) {
    complex rest = 1.0;
    if (n > 1) {
      AmplitudeEngine engine(state.field_e, quad, backend, method);
      std::vector<double> lower(n - 1), upper(n - 1);
      for (std::size_t i = 1; i < n; ++i) {
        lower[i - 1] = tau[i - 1];
        upper[i - 1] = tau[i];
      }
      const double sign = (n - 1) % 2 == 0 ? 1.0 : -1.0;
      rest = sign * engine.emission_integral(lower, upper);
    }
    total += state.c_e * std::exp(-tau[0]) * rest;
  }
  return total;
}

/// Amplitude f0 that every photon of a one-sided input is reflected, in the output-wavepacket
/// normalization (the raw matrix element divided by sqrt(N!)). Exactly 0 if any tau_i > t.
inline complex reflection_amplitude_f0(const EmissionTimeList& tau, const AmplitudeEngine& engine, TimePoint t) {
  const WavepacketN& w = engine.wavepacket();
  const std::size_t n = static_cast<std::size_t>(w.n_photons());
  if (tau.size() != n) throw InvalidArgument("reflection amplitude needs one emission time per photon");
  if (!w.is_separable() && n >= 3) throw InvalidArgument("reflection amplitude needs a separable input for N >= 3");
  if (!w.common_direction()) throw InvalidArgument("reflection amplitude needs all photons incident from one side");
  for (std::size_t i = 0; i < n; ++i) {
    if (!gate_open(t.value(), tau[i])) return 0.0;
  }
  std::vector<double> lower(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = i == 0 ? 0.0 : tau[i - 1];
    upper[i] = tau[i];
  }
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  return sign * engine.emission_integral(lower, upper) / std::sqrt(factorial(static_cast<int>(n)));
}

inline complex reflection_amplitude_f0(const EmissionTimeList& tau, const WavepacketN& w, TimePoint t,
                                       const QuadratureSpec& quad = {}) {
  return reflection_amplitude_f0(tau, AmplitudeEngine(w, quad), t);
}

inline TwoPhotonOutputs two_photon_outputs(TimePoint tau1, TimePoint tau2, TimePoint t, const WavepacketN& w,
                                           const QuadratureSpec& quad = {}) {
  if (w.n_photons() != 2) throw InvalidArgument("two_photon_outputs needs a two-photon input");
  return AmplitudeEngine(w, quad).two_photon(tau1.value(), tau2.value(), t.value());
}

inline complex nonlinear_correction_B(TimePoint tau1, TimePoint tau2, const WavepacketN& w,
                                      const QuadratureSpec& quad = {}) {
  if (w.n_photons() != 2) throw InvalidArgument("nonlinear_correction_B needs a two-photon input");
  return AmplitudeEngine(w, quad).nonlinear_correction(tau1.value(), tau2.value());
}

}  // namespace wgqed
