#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "amplitudes.hpp"
#include "parallel.hpp"

namespace wgqed {

/// count equally spaced points from start to stop inclusive.
inline std::vector<double> uniform_axis(double start, double stop, std::size_t count) {
  if (count < 2 || !(stop > start)) throw InvalidArgument("uniform axis needs count >= 2 and stop > start");
  std::vector<double> axis(count);
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) axis[i] = start + step * static_cast<double>(i);
  axis.back() = stop;
  return axis;
}

/// Channel tag from output directions, one letter per photon: "RL" is photon 1 right-moving,
/// photon 2 left-moving.
inline std::string channel_tag(std::span<const Direction> dirs) {
  std::string s;
  for (Direction d : dirs) s += direction_letter(d);
  return s;
}

/// Normalized output amplitude f sampled on a tensor grid; the last axis varies fastest.
struct AmplitudeGrid {
  std::vector<std::vector<double>> axes;
  double dynamical_time = 0.0;
  std::string channel;
  std::vector<complex> values;

  std::size_t size() const {
    std::size_t n = axes.empty() ? 0 : 1;
    for (const auto& a : axes) n *= a.size();
    return n;
  }

  void validate() const {
    if (axes.empty()) throw InvalidArgument("amplitude grid needs at least one axis");
    if (channel.size() != axes.size()) throw InvalidArgument("channel tag needs one letter per axis");
    for (const auto& a : axes) {
      if (a.empty()) throw InvalidArgument("amplitude grid axes must be non-empty");
      for (std::size_t i = 1; i < a.size(); ++i) {
        if (!(a[i] > a[i - 1])) throw InvalidArgument("amplitude grid axes must be strictly increasing");
      }
    }
    if (values.size() != size()) throw InvalidArgument("amplitude grid values do not match the axes");
  }

  complex& at(std::size_t i, std::size_t j) { return values[i * axes[1].size() + j]; }
  complex at(std::size_t i, std::size_t j) const { return values[i * axes[1].size() + j]; }

  /// Largest |f(a, b) - f(b, a)| over a square two-photon grid.
  double exchange_asymmetry() const {
    if (axes.size() != 2 || axes[0] != axes[1]) throw InvalidArgument("exchange symmetry needs a square 2-D grid");
    double worst = 0.0;
    const std::size_t n = axes[0].size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) worst = std::max(worst, std::abs(at(i, j) - at(j, i)));
    }
    return worst;
  }
};

/// Fixed %.12g formatting so identical inputs give byte-identical files.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// One row per node: tau1..tauN, t, re, im.
inline void write_csv(std::ostream& os, const AmplitudeGrid& g) {
  g.validate();
  for (std::size_t d = 0; d < g.axes.size(); ++d) os << "tau" << d + 1 << ',';
  os << "t,re,im\n";
  const std::string t = format_number(g.dynamical_time);
  std::vector<std::size_t> idx(g.axes.size(), 0);
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    for (std::size_t d = 0; d < g.axes.size(); ++d) os << format_number(g.axes[d][idx[d]]) << ',';
    os << t << ',' << format_number(g.values[k].real()) << ',' << format_number(g.values[k].imag()) << '\n';
    for (std::size_t d = g.axes.size(); d-- > 0;) {
      if (++idx[d] < g.axes[d].size()) break;
      idx[d] = 0;
    }
  }
}

/// f0 ("LL"), f1 ("RL") and f2 ("RR") of a two-photon input on axis x axis at time t.
inline std::array<AmplitudeGrid, 3> two_photon_grids(const AmplitudeEngine& engine, const std::vector<double>& axis,
                                                     double t) {
  if (engine.wavepacket().n_photons() != 2) throw InvalidArgument("two-photon grids need a two-photon input");
  const std::size_t n = axis.size();
  std::array<AmplitudeGrid, 3> out;
  const std::array<const char*, 3> tags{"LL", "RL", "RR"};
  for (std::size_t c = 0; c < 3; ++c) out[c] = {{axis, axis}, t, tags[c], std::vector<complex>(n * n)};
  auto store = [&](std::size_t i, std::size_t j, const TwoPhotonOutputs& o) {
    out[0].at(i, j) = o.f0;
    out[1].at(i, j) = o.f1;
    out[2].at(i, j) = o.f2;
  };
  const bool cached = engine.wavepacket().is_separable() && engine.method() == AmplitudeMethod::automatic;
  if (cached) {
    std::vector<AmplitudeEngine::Node> nodes(n);
    parallel_for(n, [&](std::size_t i) { nodes[i] = engine.node(axis[i]); });
    parallel_for(n, [&](std::size_t i) {
      for (std::size_t j = 0; j < n; ++j) store(i, j, engine.two_photon(nodes[i], nodes[j], t));
    });
  } else {
    parallel_for(n, [&](std::size_t i) {
      for (std::size_t j = 0; j < n; ++j) store(i, j, engine.two_photon(axis[i], axis[j], t));
    });
  }
  return out;
}

/// Nonlinear correction B(tau1, tau2) on axis x axis, tagged with the reflected channel.
inline AmplitudeGrid nonlinear_correction_grid(const AmplitudeEngine& engine, const std::vector<double>& axis) {
  const std::size_t n = axis.size();
  AmplitudeGrid g{{axis, axis}, std::numeric_limits<double>::infinity(), "LL", std::vector<complex>(n * n)};
  if (engine.wavepacket().is_separable() && engine.method() == AmplitudeMethod::automatic) {
    std::vector<AmplitudeEngine::Node> nodes(n);
    parallel_for(n, [&](std::size_t i) { nodes[i] = engine.node(axis[i]); });
    parallel_for(n, [&](std::size_t i) {
      for (std::size_t j = 0; j < n; ++j) g.at(i, j) = engine.nonlinear_correction(nodes[i], nodes[j]);
    });
  } else {
    parallel_for(n, [&](std::size_t i) {
      for (std::size_t j = 0; j < n; ++j) g.at(i, j) = engine.nonlinear_correction(axis[i], axis[j]);
    });
  }
  return g;
}

/// Single-photon output on axis at time t: {left ("L"), right ("R")}.
inline std::array<AmplitudeGrid, 2> single_photon_grids(const AmplitudeEngine& engine, const std::vector<double>& axis,
                                                        double t) {
  std::array<AmplitudeGrid, 2> out{AmplitudeGrid{{axis}, t, "L", std::vector<complex>(axis.size())},
                                   AmplitudeGrid{{axis}, t, "R", std::vector<complex>(axis.size())}};
  parallel_for(axis.size(), [&](std::size_t i) {
    const auto o = engine.single_photon(axis[i], t);
    out[0].values[i] = o.left;
    out[1].values[i] = o.right;
  });
  return out;
}

/// f0 of an N-photon one-sided input on a tensor grid (unordered tuples are sorted first).
inline AmplitudeGrid reflection_grid(const AmplitudeEngine& engine, const std::vector<std::vector<double>>& axes,
                                     double t) {
  const std::size_t n = static_cast<std::size_t>(engine.wavepacket().n_photons());
  if (axes.size() != n) throw InvalidArgument("reflection grid needs one axis per photon");
  AmplitudeGrid g{axes, t, std::string(n, 'L'), {}};
  g.values.resize(g.size());
  parallel_for(g.values.size(), [&](std::size_t k) {
    std::vector<double> tau(n);
    std::size_t rest = k;
    for (std::size_t d = n; d-- > 0;) {
      tau[d] = axes[d][rest % axes[d].size()];
      rest /= axes[d].size();
    }
    g.values[k] = reflection_amplitude_f0(EmissionTimeList::from_unsorted(std::move(tau)), engine, TimePoint(t));
  });
  return g;
}

}  // namespace wgqed
