#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "core.hpp"
#include "pulse.hpp"

namespace wgqed {

/// Permanent of a row-major n x n matrix (Ryser's formula with Gray-code updates).
inline complex permanent(std::span<const complex> m, std::size_t n) {
  if (m.size() != n * n) throw InvalidArgument("permanent: matrix size mismatch");
  switch (n) {
    case 0: return 1.0;
    case 1: return m[0];
    case 2: return m[0] * m[3] + m[1] * m[2];
    case 3:
      return m[0] * (m[4] * m[8] + m[5] * m[7]) + m[1] * (m[3] * m[8] + m[5] * m[6]) +
             m[2] * (m[3] * m[7] + m[4] * m[6]);
    default: break;
  }
  if (n > 30) throw InvalidArgument("permanent: matrix too large");
  std::vector<complex> row_sums(n, 0.0);
  complex total = 0.0;
  std::uint64_t gray = 0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < count; ++k) {
    const std::uint64_t next = k ^ (k >> 1);
    const std::uint64_t flipped = next ^ gray;
    const int col = __builtin_ctzll(flipped);
    const double sign = (next & flipped) ? 1.0 : -1.0;
    for (std::size_t r = 0; r < n; ++r) row_sums[r] += sign * m[r * n + col];
    gray = next;
    complex prod = 1.0;
    for (std::size_t r = 0; r < n; ++r) prod *= row_sums[r];
    const int bits = __builtin_popcountll(gray);
    total += ((static_cast<int>(n) - bits) % 2 == 0) ? prod : -prod;
  }
  return total;
}

/// One photon of a separable state.
struct PhotonMode {
  PulseProfile profile;
  Direction direction;
};

/// Symmetric-grid sampled two-time amplitude with bilinear interpolation, zero off-grid.
class SampledTensor2 {
 public:
  SampledTensor2() = default;
  SampledTensor2(std::shared_ptr<const std::vector<double>> axis, std::vector<complex> values)
      : axis_(std::move(axis)), values_(std::move(values)) {
    const std::size_t n = axis_->size();
    if (values_.empty()) values_.assign(n * n, 0.0);
    if (values_.size() != n * n) throw InvalidArgument("tensor values must be n x n for an axis of n nodes");
  }

  complex operator()(double t1, double t2) const {
    if (values_.empty()) return 0.0;
    const auto& ax = *axis_;
    std::size_t i, j;
    double u, v;
    if (!locate(ax, t1, i, u) || !locate(ax, t2, j, v)) return 0.0;
    const std::size_t n = ax.size();
    auto at = [&](std::size_t a, std::size_t b) { return values_[a * n + b]; };
    return (1 - u) * (1 - v) * at(i, j) + u * (1 - v) * at(i + 1, j) + (1 - u) * v * at(i, j + 1) +
           u * v * at(i + 1, j + 1);
  }

  /// Exact squared norm of the bilinear interpolant.
  double norm() const {
    if (values_.empty()) return 0.0;
    const auto& ax = *axis_;
    const std::size_t n = ax.size();
    // Two-point Gauss in each direction is exact for |bilinear|^2.
    const double g = 0.5 / std::sqrt(3.0);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = 0; j + 1 < n; ++j) {
        const double hx = ax[i + 1] - ax[i];
        const double hy = ax[j + 1] - ax[j];
        double cell = 0.0;
        for (double u : {0.5 - g, 0.5 + g}) {
          for (double v : {0.5 - g, 0.5 + g}) {
            const complex f = (1 - u) * (1 - v) * values_[i * n + j] + u * (1 - v) * values_[(i + 1) * n + j] +
                              (1 - u) * v * values_[i * n + j + 1] + u * v * values_[(i + 1) * n + j + 1];
            cell += std::norm(f);
          }
        }
        total += 0.25 * cell * hx * hy;
      }
    }
    return total;
  }

  /// Largest |T(a,b) - T(b,a)| over grid nodes.
  double asymmetry() const {
    const std::size_t n = axis_ ? axis_->size() : 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < n && !values_.empty(); ++i) {
      for (std::size_t j = i + 1; j < n; ++j) worst = std::max(worst, std::abs(values_[i * n + j] - values_[j * n + i]));
    }
    return worst;
  }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](const complex& c) { return c == 0.0; });
  }

  const std::vector<complex>& values() const { return values_; }
  const std::vector<double>& axis() const { return *axis_; }

 private:
  static bool locate(const std::vector<double>& ax, double t, std::size_t& i, double& u) {
    if (t < ax.front() || t > ax.back()) return false;
    auto it = std::upper_bound(ax.begin(), ax.end(), t);
    if (it == ax.end()) --it;
    i = static_cast<std::size_t>(it - ax.begin()) - 1;
    u = (t - ax[i]) / (ax[i + 1] - ax[i]);
    return true;
  }

  std::shared_ptr<const std::vector<double>> axis_;
  std::vector<complex> values_;
};

/// N-photon input state, either a (symmetrized) product of single-photon modes or a
/// sampled correlated two-photon amplitude.
///
/// Component convention: with |psi> = (1/sqrt(P)) prod_j A_j^dagger |vac>, where P is the
/// permanent of the overlap matrix <xi_i|xi_j> delta(d_i, d_j), the n-right-mover component is
/// xi_n = perm(right block) perm(left block) / sqrt(P n! (N-n)!), so that sum_n ||xi_n||^2 = 1.
class WavepacketN {
 public:
  enum class Representation { separable, correlated2 };

  static WavepacketN vacuum() { return WavepacketN(); }

  static WavepacketN product(std::vector<PhotonMode> modes, double norm_tol = kDefaultNormTolerance) {
    WavepacketN w;
    for (const auto& m : modes) {
      if (std::abs(m.profile.norm() - 1.0) > norm_tol) {
        throw NormalizationError("product wavepacket needs normalized profiles", m.profile.norm());
      }
    }
    const std::size_t n = modes.size();
    w.modes_ = std::move(modes);
    w.identical_ = n > 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (!(w.modes_[j].profile.same_mode(w.modes_[0].profile) && w.modes_[j].direction == w.modes_[0].direction)) {
        w.identical_ = false;
      }
    }
    if (w.identical_) {
      w.overlap_permanent_ = factorial(static_cast<int>(n)) * std::pow(w.modes_[0].profile.norm(), n);
    } else {
      std::vector<complex> overlap(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          overlap[i * n + j] = w.modes_[i].direction == w.modes_[j].direction
                                   ? profile_overlap(w.modes_[i].profile, w.modes_[j].profile)
                                   : complex(0.0);
        }
      }
      w.overlap_permanent_ = std::real(permanent(overlap, n));
    }
    return w;
  }

  /// Two-photon state from sampled components: xi0 (both left-moving), xi1 (first argument
  /// right-moving, second left-moving), xi2 (both right-moving). Empty vectors mean zero.
  static WavepacketN correlated2(std::vector<double> axis, std::vector<complex> xi0, std::vector<complex> xi1,
                                 std::vector<complex> xi2, double norm_tol = kDefaultNormTolerance) {
    if (axis.size() < 2) throw InvalidArgument("correlated2 axis needs at least two nodes");
    if (axis.front() < 0.0) throw InvalidArgument("correlated2 axis must be non-negative");
    for (std::size_t i = 1; i < axis.size(); ++i) {
      if (!(axis[i] > axis[i - 1])) throw InvalidArgument("correlated2 axis must be strictly increasing");
    }
    auto shared = std::make_shared<const std::vector<double>>(std::move(axis));
    WavepacketN w;
    w.rep_ = Representation::correlated2;
    w.tensors_ = {SampledTensor2(shared, std::move(xi0)), SampledTensor2(shared, std::move(xi1)),
                  SampledTensor2(shared, std::move(xi2))};
    const double norm = w.tensors_[0].norm() + w.tensors_[1].norm() + w.tensors_[2].norm();
    if (std::abs(norm - 1.0) > norm_tol) throw NormalizationError("correlated2 state is not normalized", norm);
    for (int c : {0, 2}) {
      if (w.tensors_[c].asymmetry() > norm_tol) {
        throw InvalidArgument("correlated2 same-direction component is not exchange symmetric");
      }
    }
    return w;
  }

  Representation representation() const { return rep_; }
  bool is_separable() const { return rep_ == Representation::separable; }
  int n_photons() const { return rep_ == Representation::separable ? static_cast<int>(modes_.size()) : 2; }
  std::span<const PhotonMode> modes() const { return modes_; }
  /// True for separable states whose photons all share one mode and direction.
  bool identical_modes() const { return identical_; }
  double overlap_permanent() const { return overlap_permanent_; }
  const SampledTensor2& tensor(int n_right) const { return tensors_.at(static_cast<std::size_t>(n_right)); }

  /// Total state norm, sum_n ||xi_n||^2.
  double norm() const {
    if (rep_ == Representation::correlated2) return tensors_[0].norm() + tensors_[1].norm() + tensors_[2].norm();
    return 1.0;
  }

  /// Direction shared by every photon, if there is one.
  std::optional<Direction> common_direction() const {
    if (rep_ == Representation::separable) {
      if (modes_.empty()) return std::nullopt;
      for (const auto& m : modes_) {
        if (m.direction != modes_[0].direction) return std::nullopt;
      }
      return modes_[0].direction;
    }
    if (!tensors_[1].is_zero()) return std::nullopt;
    if (tensors_[0].is_zero()) return Direction::right;
    if (tensors_[2].is_zero()) return Direction::left;
    return std::nullopt;
  }

  /// <vac| prod_i a^{dirs_i}_{times_i} |psi>.
  complex directed_amplitude(std::span<const Direction> dirs, std::span<const double> times) const {
    const std::size_t n = static_cast<std::size_t>(n_photons());
    if (dirs.size() != n || times.size() != n) throw InvalidArgument("directed_amplitude: arity mismatch");
    if (rep_ == Representation::correlated2) {
      const Direction d1 = dirs[0], d2 = dirs[1];
      if (d1 == Direction::right && d2 == Direction::right) return std::sqrt(2.0) * tensors_[2](times[0], times[1]);
      if (d1 == Direction::left && d2 == Direction::left) return std::sqrt(2.0) * tensors_[0](times[0], times[1]);
      if (d1 == Direction::right) return tensors_[1](times[0], times[1]);
      return tensors_[1](times[1], times[0]);
    }
    if (n == 0) return 1.0;
    std::vector<complex> m(n * n);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t j = 0; j < n; ++j) {
        m[s * n + j] = modes_[j].direction == dirs[s] ? modes_[j].profile(times[s]) : complex(0.0);
      }
    }
    return permanent(m, n) / std::sqrt(overlap_permanent_);
  }

  /// <vac| prod_i d_in(t_i) |psi>, with d_in = a_left + a_right.
  complex extraction_amplitude(std::span<const double> times) const {
    const std::size_t n = static_cast<std::size_t>(n_photons());
    if (times.size() != n) throw InvalidArgument("extraction_amplitude: arity mismatch");
    if (rep_ == Representation::correlated2) {
      const double a = times[0], b = times[1];
      return std::sqrt(2.0) * (tensors_[0](a, b) + tensors_[2](a, b)) + tensors_[1](a, b) + tensors_[1](b, a);
    }
    if (n == 0) return 1.0;
    if (identical_) {
      complex prod = 1.0;
      for (double t : times) prod *= modes_[0].profile(t);
      return factorial(static_cast<int>(n)) * prod / std::sqrt(overlap_permanent_);
    }
    std::vector<complex> m(n * n);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t j = 0; j < n; ++j) m[s * n + j] = modes_[j].profile(times[s]);
    }
    return permanent(m, n) / std::sqrt(overlap_permanent_);
  }

  /// xi_{n_right}(times): first n_right arguments right-moving, the rest left-moving.
  complex component(int n_right, std::span<const double> times) const {
    const int n = n_photons();
    if (n_right < 0 || n_right > n) throw InvalidArgument("component index out of range");
    if (static_cast<int>(times.size()) != n) throw InvalidArgument("component: expected one time per photon");
    if (rep_ == Representation::correlated2) return tensors_[static_cast<std::size_t>(n_right)](times[0], times[1]);
    std::vector<Direction> dirs(static_cast<std::size_t>(n), Direction::left);
    std::fill_n(dirs.begin(), n_right, Direction::right);
    return directed_amplitude(dirs, times) / std::sqrt(factorial(n_right) * factorial(n - n_right));
  }

  /// Largest truncation horizon among the constituents.
  double horizon() const {
    if (rep_ == Representation::correlated2) return tensors_[2].axis().back();
    double h = 0.0;
    for (const auto& m : modes_) h = std::max(h, m.profile.t_max());
    return h;
  }

  /// Sample nodes of the constituents (kinks of the interpolated amplitudes).
  std::vector<double> breakpoints() const {
    if (rep_ == Representation::correlated2) return tensors_[2].axis();
    std::vector<double> cuts;
    for (const auto& m : modes_) cuts.insert(cuts.end(), m.profile.breakpoints().begin(), m.profile.breakpoints().end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
  }

  /// Finest natural quadrature panel among the constituents.
  double panel_width() const {
    if (rep_ == Representation::correlated2) {
      const auto& ax = tensors_[2].axis();
      double w = 0.5;
      for (std::size_t i = 0; i + 1 < ax.size(); ++i) w = std::min(w, ax[i + 1] - ax[i]);
      return w;
    }
    double w = 0.5;
    for (const auto& m : modes_) w = std::min(w, m.profile.panel_width());
    return w;
  }

 private:
  Representation rep_ = Representation::separable;
  std::vector<PhotonMode> modes_;
  bool identical_ = false;
  double overlap_permanent_ = 1.0;
  std::array<SampledTensor2, 3> tensors_{};
};

inline WavepacketN make_product_wavepacket(std::vector<PhotonMode> entries) {
  if (entries.empty()) throw InvalidArgument("a product wavepacket needs at least one photon");
  return WavepacketN::product(std::move(entries));
}

/// xi_n at the given times; times outside the support evaluate to 0.
inline complex wavepacket_component(const WavepacketN& w, int n_right, std::span<const TimePoint> times) {
  std::vector<double> t;
  t.reserve(times.size());
  for (const auto& tp : times) t.push_back(tp.value());
  return w.component(n_right, t);
}

/// c_g |psi_N, g> + c_e |psi_{N-1}, e>.
struct InitialState {
  complex c_g = 1.0;
  complex c_e = 0.0;
  WavepacketN field_g;
  WavepacketN field_e;

  static InitialState ground(WavepacketN field) { return {1.0, 0.0, std::move(field), WavepacketN::vacuum()}; }

  static InitialState make(complex c_g, complex c_e, WavepacketN field_g, WavepacketN field_e,
                           double norm_tol = kDefaultNormTolerance) {
    const double total = std::norm(c_g) + std::norm(c_e);
    if (std::abs(total - 1.0) > norm_tol) throw NormalizationError("|c_g|^2 + |c_e|^2 must equal 1", total);
    if (c_g != 0.0 && c_e != 0.0 && field_g.n_photons() != field_e.n_photons() + 1) {
      throw InvalidArgument("field photon counts must differ by exactly one between the atomic branches");
    }
    return {c_g, c_e, std::move(field_g), std::move(field_e)};
  }

  int excitations() const { return c_g != 0.0 ? field_g.n_photons() : field_e.n_photons() + 1; }
};

}  // namespace wgqed
