#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "amplitude_grid.hpp"
#include "amplitudes.hpp"
#include "parallel.hpp"
#include "pulse.hpp"
#include "quadrature.hpp"

namespace wgqed {

struct ReflectionTransmission {
  complex r, t;
};

/// t = omega / (omega + i), r = t - 1 = -i / (omega + i).
inline ReflectionTransmission single_photon_r_t(FrequencyPoint omega) {
  const double w = omega.value();
  const complex den{w, 1.0};
  return {complex(0.0, -1.0) / den, w / den};
}

/// Sampled amplitude in the frequency domain; the last axis varies fastest.
struct FreqAmplitudeGrid {
  std::vector<std::vector<double>> axes;
  std::string channel;
  std::vector<complex> values;

  std::size_t size() const {
    std::size_t n = axes.empty() ? 0 : 1;
    for (const auto& a : axes) n *= a.size();
    return n;
  }
  complex& at(std::size_t i, std::size_t j) { return values[i * axes[1].size() + j]; }
  complex at(std::size_t i, std::size_t j) const { return values[i * axes[1].size() + j]; }
};

/// A two-photon spectral amplitude xi2(omega1, omega2).
using Spectrum2 = std::function<complex(double, double)>;

/// xi2(omega1, omega2) of a separable two-photon input with both photons moving the same way.
inline Spectrum2 two_photon_spectrum(const WavepacketN& w) {
  if (w.n_photons() != 2 || !w.is_separable() || !w.common_direction()) {
    throw InvalidArgument("two-photon spectrum needs a separable input incident from one side");
  }
  const auto modes = w.modes();
  const PulseProfile p0 = modes[0].profile, p1 = modes[1].profile;
  const double scale = 1.0 / std::sqrt(2.0 * w.overlap_permanent());
  return [p0, p1, scale](double a, double b) {
    return scale * (p0.spectrum(a) * p1.spectrum(b) + p1.spectrum(a) * p0.spectrum(b));
  };
}

/// Bilinear interpolation of a sampled two-photon spectrum, zero outside the window. The window
/// must contain the support: edge values above edge_tolerance relative to the peak are rejected.
inline Spectrum2 two_photon_spectrum(const FreqAmplitudeGrid& g, double edge_tolerance = 1e-6) {
  if (g.axes.size() != 2 || g.values.size() != g.size()) throw InvalidArgument("spectrum grid must be 2-D");
  const auto& a0 = g.axes[0];
  const auto& a1 = g.axes[1];
  double peak = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < a0.size(); ++i) {
    for (std::size_t j = 0; j < a1.size(); ++j) {
      const double v = std::abs(g.at(i, j));
      peak = std::max(peak, v);
      if (i == 0 || j == 0 || i + 1 == a0.size() || j + 1 == a1.size()) edge = std::max(edge, v);
    }
  }
  if (edge > edge_tolerance * peak) throw InvalidArgument("spectrum grid truncates the support");
  return [g](double x, double y) -> complex {
    const auto& ax = g.axes[0];
    const auto& ay = g.axes[1];
    if (x < ax.front() || x > ax.back() || y < ay.front() || y > ay.back()) return 0.0;
    auto cell = [](const std::vector<double>& a, double v, std::size_t& i, double& u) {
      auto it = std::upper_bound(a.begin(), a.end(), v);
      if (it == a.end()) --it;
      i = static_cast<std::size_t>(it - a.begin()) - 1;
      u = (v - a[i]) / (a[i + 1] - a[i]);
    };
    std::size_t i, j;
    double u, v;
    cell(ax, x, i, u);
    cell(ay, y, j, v);
    return (1 - u) * ((1 - v) * g.at(i, j) + v * g.at(i, j + 1)) + u * ((1 - v) * g.at(i + 1, j) + v * g.at(i + 1, j + 1));
  };
}

namespace detail {

inline QuadratureSpec spectral_quadrature(const QuadratureSpec& quad) {
  QuadratureSpec q = quad;
  q.rel_tol = std::max(q.rel_tol, 1e-11);
  q.abs_tol = std::max(q.abs_tol, 1e-13);
  return q;
}

// int dw' r(w') r(total - w') xi2(w', total - w') over the real line.
inline complex antidiagonal_integral(double total, const Spectrum2& xi2, const QuadratureSpec& quad) {
  auto f = [&](double wp) {
    const auto a = single_photon_r_t(FrequencyPoint(wp));
    const auto b = single_photon_r_t(FrequencyPoint(total - wp));
    return a.r * b.r * xi2(wp, total - wp);
  };
  return integrate_real_line(f, 0.5 * total, 2.0, spectral_quadrature(quad), 32).value;
}

}  // namespace detail

/// B(omega1, omega2) = (r1 + r2) / (2 pi) int dw' r(w') r(W - w') xi2(w', W - w'), W = omega1 + omega2.
inline complex freq_nonlinear_correction(FrequencyPoint omega1, FrequencyPoint omega2, const Spectrum2& xi2,
                                         const QuadratureSpec& quad = {}) {
  const double w1 = omega1.value(), w2 = omega2.value();
  const complex r_sum = single_photon_r_t(omega1).r + single_photon_r_t(omega2).r;
  return r_sum / (2.0 * kPi) * detail::antidiagonal_integral(w1 + w2, xi2, quad);
}

inline complex freq_nonlinear_correction(FrequencyPoint omega1, FrequencyPoint omega2, const FreqAmplitudeGrid& xi2,
                                         const QuadratureSpec& quad = {}) {
  return freq_nonlinear_correction(omega1, omega2, two_photon_spectrum(xi2), quad);
}

namespace detail {

inline TwoPhotonOutputs assemble_freq_outputs(double w1, double w2, complex xi, complex b) {
  const auto s1 = single_photon_r_t(FrequencyPoint(w1));
  const auto s2 = single_photon_r_t(FrequencyPoint(w2));
  return {s1.r * s2.r * xi + b, std::sqrt(2.0) * (s1.t * s2.r * xi + b), s1.t * s2.t * xi + b};
}

}  // namespace detail

/// Long-time outputs for two photons incident from the left (right-moving):
/// f0 = r r xi2 + B, f1 = sqrt(2) (t1 r2 xi2 + B), f2 = t t xi2 + B.
inline TwoPhotonOutputs freq_two_photon_outputs(FrequencyPoint omega1, FrequencyPoint omega2, const Spectrum2& xi2,
                                                const QuadratureSpec& quad = {}) {
  const double w1 = omega1.value(), w2 = omega2.value();
  return detail::assemble_freq_outputs(w1, w2, xi2(w1, w2), freq_nonlinear_correction(omega1, omega2, xi2, quad));
}

inline TwoPhotonOutputs freq_two_photon_outputs(FrequencyPoint omega1, FrequencyPoint omega2,
                                                const FreqAmplitudeGrid& xi2, const QuadratureSpec& quad = {}) {
  return freq_two_photon_outputs(omega1, omega2, two_photon_spectrum(xi2), quad);
}

/// Reflection probability of one photon from its spectrum: int |xi(omega)|^2 |r_omega|^2 domega.
inline double single_photon_reflection_spectral(const PulseProfile& profile, const QuadratureSpec& quad = {}) {
  auto f = [&](double w) { return std::norm(profile.spectrum(w)) * std::norm(single_photon_r_t(FrequencyPoint(w)).r); };
  const double scale = std::max(1.0, profile.bandwidth() ? profile.bandwidth()->value() : 1.0);
  return integrate_real_line(f, 0.0, scale, detail::spectral_quadrature(quad), 32).value;
}

namespace detail {

// m_k = int_0^1 u^k exp(i phi u) du for k = 0..3.
inline std::array<complex, 4> filon_moments(double phi) {
  std::array<complex, 4> mu{};
  const complex iphi{0.0, phi};
  if (std::abs(phi) < 2.0) {
    for (int k = 0; k < 4; ++k) {
      complex term = 1.0;
      complex sum = 0.0;
      for (int m = 0; m < 60; ++m) {
        const complex add = term / static_cast<double>(k + m + 1);
        sum += add;
        if (std::abs(add) < 1e-18) break;
        term *= iphi / static_cast<double>(m + 1);
      }
      mu[static_cast<std::size_t>(k)] = sum;
    }
    return mu;
  }
  const complex e = std::exp(iphi);
  mu[0] = (e - 1.0) / iphi;
  for (int k = 1; k < 4; ++k) mu[static_cast<std::size_t>(k)] = (e - static_cast<double>(k) * mu[static_cast<std::size_t>(k - 1)]) / iphi;
  return mu;
}

// Weights c_m of a cell: int_0^1 P(u) exp(i phi u) du = sum_m c_m g(offsets[m]) for the
// interpolating polynomial P through (offsets[m], g(offsets[m])).
inline std::vector<complex> filon_cell(const std::array<complex, 4>& mu, const std::vector<int>& offsets) {
  const std::size_t s = offsets.size();
  std::vector<complex> c(s, 0.0);
  for (std::size_t m = 0; m < s; ++m) {
    std::vector<double> poly{1.0};
    double den = 1.0;
    for (std::size_t k = 0; k < s; ++k) {
      if (k == m) continue;
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t p = 0; p < poly.size(); ++p) {
        next[p + 1] += poly[p];
        next[p] -= offsets[k] * poly[p];
      }
      poly = std::move(next);
      den *= offsets[m] - offsets[k];
    }
    for (std::size_t p = 0; p < poly.size(); ++p) c[m] += poly[p] / den * mu[p];
  }
  return c;
}

// Node factors A_j of the composite cubic Filon rule on n uniform nodes:
// int_{x_0}^{x_{n-1}} g(x) exp(i theta x) dx ~ h sum_j A_j exp(i theta x_j) g_j, phi = theta h.
class FilonFactors {
 public:
  FilonFactors(double phi, std::size_t n) : n_(n) {
    if (n <= 8) {
      small_ = explicit_factors(phi, n);
      return;
    }
    const auto v = explicit_factors(phi, 8);
    std::copy(v.begin(), v.begin() + 4, head_.begin());
    std::copy(v.begin() + 4, v.end(), tail_.begin());
    const std::vector<int> offsets{-1, 0, 1, 2};
    const auto c = filon_cell(filon_moments(phi), offsets);
    interior_ = 0.0;
    for (std::size_t m = 0; m < 4; ++m) interior_ += c[m] * std::exp(complex(0.0, -phi * offsets[m]));
  }

  std::size_t size() const { return n_; }
  bool is_long() const { return small_.empty() && n_ > 8; }
  complex interior() const { return interior_; }
  complex operator[](std::size_t j) const {
    if (!is_long()) return small_[j];
    if (j < 4) return head_[j];
    if (j + 4 >= n_) return tail_[j + 4 - n_];
    return interior_;
  }

  // sum_j A_j e_j g_j.
  template <class E, class G>
  complex apply(const E& e, const G& g) const {
    complex acc = 0.0;
    if (!is_long()) {
      for (std::size_t j = 0; j < n_; ++j) acc += small_[j] * e[j] * g[j];
      return acc;
    }
    for (std::size_t j = 0; j < n_; ++j) acc += e[j] * g[j];
    acc *= interior_;
    for (std::size_t j = 0; j < 4; ++j) acc += (head_[j] - interior_) * e[j] * g[j];
    for (std::size_t j = n_ - 4; j < n_; ++j) acc += (tail_[j + 4 - n_] - interior_) * e[j] * g[j];
    return acc;
  }

 private:
  static std::vector<complex> explicit_factors(double phi, std::size_t n) {
    std::vector<complex> a(n, 0.0);
    if (n < 2) return a;
    const std::size_t s = std::min<std::size_t>(4, n);
    const auto mu = filon_moments(phi);
    std::map<long, std::vector<complex>> cache;
    for (std::size_t c = 0; c + 1 < n; ++c) {
      const std::size_t start = std::min(c == 0 ? 0 : c - 1, n - s);
      const long shift = static_cast<long>(start) - static_cast<long>(c);
      auto it = cache.find(shift);
      if (it == cache.end()) {
        std::vector<int> offsets(s);
        for (std::size_t m = 0; m < s; ++m) offsets[m] = static_cast<int>(shift + static_cast<long>(m));
        it = cache.emplace(shift, filon_cell(mu, offsets)).first;
      }
      for (std::size_t m = 0; m < s; ++m) {
        const std::size_t j = start + m;
        a[j] += it->second[m] * std::exp(complex(0.0, phi * (static_cast<double>(c) - static_cast<double>(j))));
      }
    }
    return a;
  }

  std::size_t n_;
  std::vector<complex> small_;
  std::array<complex, 4> head_{}, tail_{};
  complex interior_ = 0.0;
};

inline double uniform_step(const std::vector<double>& axis) {
  if (axis.size() < 2) throw InvalidArgument("Fourier bridge needs at least two samples per axis");
  const double h = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (std::abs(axis[i] - (axis.front() + h * static_cast<double>(i))) > 1e-9 * (axis.back() - axis.front())) {
      throw InvalidArgument("Fourier bridge needs a uniform time grid");
    }
  }
  return h;
}

}  // namespace detail

struct BridgeOptions {
  /// Largest tolerated |f| on the last time sample relative to the peak (span check).
  double edge_tolerance = 1e-6;
};

/// xi(omega) = (2 pi)^(-1/2) int xi(tau) exp(+i omega tau) dtau per axis, by composite cubic
/// Filon quadrature (exact for piecewise cubic data). Two-photon grids are integrated separately
/// on the triangles tau1 <= tau2 and tau1 >= tau2, where the amplitudes are smooth.
inline FreqAmplitudeGrid fourier_bridge(const AmplitudeGrid& g, const std::vector<std::vector<double>>& omega_axes,
                                        const BridgeOptions& opt = {}) {
  g.validate();
  const std::size_t dim = g.axes.size();
  if (dim != 1 && dim != 2) throw InvalidArgument("Fourier bridge supports one- and two-photon grids");
  if (omega_axes.size() != dim) throw InvalidArgument("Fourier bridge needs one frequency axis per time axis");
  for (const auto& a : g.axes) {
    if (g.dynamical_time < a.back()) throw InvalidArgument("Fourier bridge needs long-time amplitudes (all gates open)");
  }
  const double h = detail::uniform_step(g.axes[0]);
  if (dim == 2 && g.axes[1] != g.axes[0]) throw InvalidArgument("two-photon Fourier bridge needs a square grid");

  double peak = 0.0, edge = 0.0;
  const std::size_t n = g.axes[0].size();
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    const double v = std::abs(g.values[k]);
    peak = std::max(peak, v);
    const bool last = dim == 1 ? k + 1 == n : (k / n + 1 == n || k % n + 1 == n);
    if (last) edge = std::max(edge, v);
  }
  if (edge > opt.edge_tolerance * std::max(peak, 1e-300)) {
    throw InvalidArgument("time grid span too short: amplitude has not decayed at the last sample");
  }
  for (const auto& axis : omega_axes) {
    for (double w : axis) {
      if (std::abs(w) * h > kPi) throw InvalidArgument("time grid too coarse for the requested frequency window");
    }
  }

  const auto& x = g.axes[0];
  const double norm1 = 1.0 / std::sqrt(2.0 * kPi);
  FreqAmplitudeGrid out{omega_axes, g.channel, {}};
  out.values.resize(out.size());

  if (dim == 1) {
    parallel_for(omega_axes[0].size(), [&](std::size_t a) {
      const double w = omega_axes[0][a];
      detail::FilonFactors f(w * h, n);
      std::vector<complex> e(n);
      for (std::size_t j = 0; j < n; ++j) e[j] = std::exp(complex(0.0, w * x[j]));
      out.values[a] = norm1 * h * f.apply(e, g.values);
    });
    return out;
  }

  // Diagonals: upper[k][j] = f(x_j, x_{j+k}), lower[k][j] = f(x_{j+k}, x_j).
  std::vector<std::vector<complex>> upper(n), lower(n);
  for (std::size_t k = 0; k < n; ++k) {
    upper[k].resize(n - k);
    lower[k].resize(n - k);
    for (std::size_t j = 0; j + k < n; ++j) {
      upper[k][j] = g.at(j, j + k);
      lower[k][j] = g.at(j + k, j);
    }
  }

  const auto& w1s = omega_axes[0];
  const auto& w2s = omega_axes[1];
  std::vector<double> totals;
  for (double a : w1s) {
    for (double b : w2s) totals.push_back(a + b);
  }
  std::sort(totals.begin(), totals.end());
  const double merge = 1e-12 * std::max(1.0, std::abs(totals.back()) + std::abs(totals.front()));
  totals.erase(std::unique(totals.begin(), totals.end(), [&](double a, double b) { return b - a <= merge; }),
               totals.end());
  auto total_index = [&](double v) {
    auto it = std::lower_bound(totals.begin(), totals.end(), v - merge);
    return static_cast<std::size_t>(it - totals.begin());
  };

  // Stage 1: inner integrals along each diagonal for every distinct total frequency.
  std::vector<std::vector<complex>> inner_upper(totals.size()), inner_lower(totals.size());
  parallel_for(totals.size(), [&](std::size_t q) {
    const double big = totals[q];
    std::vector<complex> e(n);
    for (std::size_t j = 0; j < n; ++j) e[j] = std::exp(complex(0.0, big * x[j]));
    const detail::FilonFactors full(big * h, n);
    inner_upper[q].resize(n);
    inner_lower[q].resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t m = n - k;
      if (m > 8) {
        // Same head and tail factors for every long diagonal.
        complex su = 0.0, sl = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          su += e[j] * upper[k][j];
          sl += e[j] * lower[k][j];
        }
        const complex w = full.interior();
        su *= w;
        sl *= w;
        for (std::size_t j = 0; j < 4; ++j) {
          const complex d = full[j] - w;
          su += d * e[j] * upper[k][j];
          sl += d * e[j] * lower[k][j];
          const std::size_t jt = m - 4 + j;
          const complex dt = full[n - 4 + j] - w;
          su += dt * e[jt] * upper[k][jt];
          sl += dt * e[jt] * lower[k][jt];
        }
        inner_upper[q][k] = h * su;
        inner_lower[q][k] = h * sl;
      } else {
        const detail::FilonFactors f(big * h, m);
        inner_upper[q][k] = h * f.apply(e, upper[k]);
        inner_lower[q][k] = h * f.apply(e, lower[k]);
      }
    }
  });

  // Stage 2: integral over the separation s = k h.
  auto outer_weights = [&](double w) {
    const detail::FilonFactors f(w * h, n);
    std::vector<complex> wt(n);
    for (std::size_t k = 0; k < n; ++k) wt[k] = h * f[k] * std::exp(complex(0.0, w * h * static_cast<double>(k)));
    return wt;
  };
  std::vector<std::vector<complex>> outer1(w1s.size()), outer2(w2s.size());
  parallel_for(w1s.size(), [&](std::size_t a) { outer1[a] = outer_weights(w1s[a]); });
  parallel_for(w2s.size(), [&](std::size_t b) { outer2[b] = outer_weights(w2s[b]); });

  parallel_for(w1s.size(), [&](std::size_t a) {
    for (std::size_t b = 0; b < w2s.size(); ++b) {
      const std::size_t q = total_index(w1s[a] + w2s[b]);
      complex acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += outer2[b][k] * inner_upper[q][k] + outer1[a][k] * inner_lower[q][k];
      out.at(a, b) = acc / (2.0 * kPi);
    }
  });
  return out;
}

/// Unitary discrete transform on the reciprocal grid omega_k = 2 pi (k - n/2) / (n h):
/// F_k = h (2 pi)^(-1/2) sum_j f_j exp(+i omega_k x_j), applied along every axis.
inline FreqAmplitudeGrid unitary_dft(const AmplitudeGrid& g) {
  g.validate();
  const std::size_t dim = g.axes.size();
  if (dim != 1 && dim != 2) throw InvalidArgument("discrete transform supports 1-D and 2-D grids");
  FreqAmplitudeGrid out{{}, g.channel, {}};
  std::vector<std::vector<complex>> mats;
  for (const auto& axis : g.axes) {
    const double h = detail::uniform_step(axis);
    const std::size_t n = axis.size();
    std::vector<double> omega(n);
    for (std::size_t k = 0; k < n; ++k) {
      omega[k] = 2.0 * kPi * (static_cast<double>(k) - static_cast<double>(n / 2)) / (static_cast<double>(n) * h);
    }
    std::vector<complex> m(n * n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) m[k * n + j] = h / std::sqrt(2.0 * kPi) * std::exp(complex(0.0, omega[k] * axis[j]));
    }
    out.axes.push_back(std::move(omega));
    mats.push_back(std::move(m));
  }
  if (dim == 1) {
    const std::size_t n = g.axes[0].size();
    out.values.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) out.values[k] += mats[0][k * n + j] * g.values[j];
    }
    return out;
  }
  const std::size_t n0 = g.axes[0].size(), n1 = g.axes[1].size();
  std::vector<complex> half(n0 * n1, 0.0);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t b = 0; b < n1; ++b) {
      for (std::size_t j = 0; j < n1; ++j) half[i * n1 + b] += mats[1][b * n1 + j] * g.values[i * n1 + j];
    }
  }
  out.values.assign(n0 * n1, 0.0);
  for (std::size_t a = 0; a < n0; ++a) {
    for (std::size_t i = 0; i < n0; ++i) {
      const complex m = mats[0][a * n0 + i];
      for (std::size_t b = 0; b < n1; ++b) out.values[a * n1 + b] += m * half[i * n1 + b];
    }
  }
  return out;
}

/// L2 norm of uniformly sampled values (rectangle rule).
inline double sampled_norm(const std::vector<std::vector<double>>& axes, const std::vector<complex>& values) {
  double cell = 1.0;
  for (const auto& a : axes) cell *= (a.back() - a.front()) / static_cast<double>(a.size() - 1);
  double sum = 0.0;
  for (const complex& v : values) sum += std::norm(v);
  return std::sqrt(sum * cell);
}

struct ComparisonReport {
  std::string channel;
  double gamma = 0.0;
  std::size_t time_nodes = 0;
  double time_span = 0.0;
  std::size_t omega_nodes = 0;
  double omega_min = 0.0, omega_max = 0.0;
  double tolerance = 0.0;
  double max_abs_err = 0.0;
  double rms_err = 0.0;
  bool pass = false;
};

struct SpectralValidationOptions {
  /// Time samples per axis of the two-photon grid.
  std::size_t time_nodes = 2048;
  /// Time span; 0 selects max(40, 80 / Gamma).
  double time_span = 0.0;
  std::size_t omega_nodes = 64;
  double omega_max = 10.0;
  double tolerance = 1e-4;
};

inline double default_bridge_span(Bandwidth gamma_bw) { return std::max(40.0, 80.0 / gamma_bw.value()); }

/// Compares the Fourier-bridged long-time f0, f1, f2 and B of two identical exponential photons
/// (incident from the left, i.e. right-moving) against the frequency-domain forms on a square
/// window [-omega_max, omega_max]^2.
inline std::vector<ComparisonReport> frequency_domain_validation(Bandwidth gamma_bw,
                                                                 const SpectralValidationOptions& opt = {},
                                                                 const QuadratureSpec& quad = {}) {
  const double span = opt.time_span > 0.0 ? opt.time_span : default_bridge_span(gamma_bw);
  const PulseProfile p = make_exponential_profile(gamma_bw);
  const WavepacketN w = WavepacketN::product({{p, Direction::right}, {p, Direction::right}});
  const AmplitudeEngine engine(w, quad);
  const auto axis = uniform_axis(0.0, span, opt.time_nodes);
  const auto omega = uniform_axis(-opt.omega_max, opt.omega_max, opt.omega_nodes);
  const std::vector<std::vector<double>> window{omega, omega};

  const Spectrum2 xi2 = two_photon_spectrum(w);
  std::vector<double> totals;
  for (double a : omega) {
    for (double b : omega) totals.push_back(a + b);
  }
  std::sort(totals.begin(), totals.end());
  totals.erase(std::unique(totals.begin(), totals.end()), totals.end());
  std::vector<complex> anti(totals.size());
  parallel_for(totals.size(), [&](std::size_t q) { anti[q] = detail::antidiagonal_integral(totals[q], xi2, quad); });
  auto b_of = [&](double a, double b) {
    const auto it = std::lower_bound(totals.begin(), totals.end(), a + b);
    const complex r_sum = single_photon_r_t(FrequencyPoint(a)).r + single_photon_r_t(FrequencyPoint(b)).r;
    return r_sum / (2.0 * kPi) * anti[static_cast<std::size_t>(it - totals.begin())];
  };

  std::vector<ComparisonReport> reports;
  auto compare = [&](const std::string& name, const AmplitudeGrid& time_grid, auto&& expected) {
    const FreqAmplitudeGrid bridged = fourier_bridge(time_grid, window);
    ComparisonReport r{name, gamma_bw.value(), opt.time_nodes, span, opt.omega_nodes, -opt.omega_max, opt.omega_max,
                       opt.tolerance};
    double sum = 0.0;
    for (std::size_t a = 0; a < omega.size(); ++a) {
      for (std::size_t b = 0; b < omega.size(); ++b) {
        const double err = std::abs(bridged.at(a, b) - expected(omega[a], omega[b]));
        r.max_abs_err = std::max(r.max_abs_err, err);
        sum += err * err;
      }
    }
    r.rms_err = std::sqrt(sum / static_cast<double>(omega.size() * omega.size()));
    r.pass = r.max_abs_err <= opt.tolerance;
    reports.push_back(r);
  };

  {
    const auto grids = two_photon_grids(engine, axis, span);
    auto freq = [&](double a, double b) { return detail::assemble_freq_outputs(a, b, xi2(a, b), b_of(a, b)); };
    compare("f0", grids[0], [&](double a, double b) { return freq(a, b).f0; });
    compare("f1", grids[1], [&](double a, double b) { return freq(a, b).f1; });
    compare("f2", grids[2], [&](double a, double b) { return freq(a, b).f2; });
  }
  compare("B", nonlinear_correction_grid(engine, axis), b_of);
  return reports;
}

}  // namespace wgqed
