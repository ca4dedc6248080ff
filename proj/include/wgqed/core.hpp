#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

// Units: time in atomic lifetimes (1/gamma), frequencies as detunings from the
// atomic transition in units of gamma.
namespace wgqed {

using complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Default tolerance on state and profile normalization.
inline constexpr double kDefaultNormTolerance = 1e-8;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  NormalizationError(const std::string& what, double norm) : Error(what), norm_(norm) {}
  double norm() const noexcept { return norm_; }

 private:
  double norm_;
};

/// Thrown when an integral does not reach its tolerance within the subdivision budget.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate) : Error(what), estimate_(estimate) {}
  double error_estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

/// Non-negative time measured from the wavefront.
class TimePoint {
 public:
  constexpr TimePoint() = default;
  explicit TimePoint(double value) : value_(value) {
    if (!std::isfinite(value) || value < 0.0) {
      throw InvalidArgument("TimePoint must be finite and non-negative, got " + std::to_string(value));
    }
  }
  constexpr double value() const noexcept { return value_; }
  friend constexpr auto operator<=>(const TimePoint&, const TimePoint&) = default;

 private:
  double value_ = 0.0;
};

/// Spectral bandwidth of a pulse mode (the decay rate of its intensity).
class Bandwidth {
 public:
  explicit Bandwidth(double value) : value_(value) {
    if (!std::isfinite(value) || value <= 0.0) {
      throw InvalidArgument("Bandwidth must be finite and strictly positive, got " + std::to_string(value));
    }
  }
  constexpr double value() const noexcept { return value_; }
  friend constexpr auto operator<=>(const Bandwidth&, const Bandwidth&) = default;

 private:
  double value_;
};

/// Detuning from the atomic transition frequency.
class FrequencyPoint {
 public:
  explicit FrequencyPoint(double detuning) : value_(detuning) {
    if (!std::isfinite(detuning)) throw InvalidArgument("FrequencyPoint must be finite");
  }
  constexpr double value() const noexcept { return value_; }

 private:
  double value_;
};

enum class Direction { left, right };

inline std::string_view to_string(Direction d) { return d == Direction::left ? "left" : "right"; }

inline Direction parse_direction(std::string_view s) {
  if (s == "left" || s == "L" || s == "l") return Direction::left;
  if (s == "right" || s == "R" || s == "r") return Direction::right;
  throw InvalidArgument("unknown direction '" + std::string(s) + "'");
}

inline char direction_letter(Direction d) { return d == Direction::left ? 'L' : 'R'; }

/// Heaviside step with theta(0) = 1: an emission exactly at the observation time counts.
inline constexpr bool gate_open(double t, double tau) noexcept { return t >= tau; }

/// exp(z) - 1 without cancellation for small |z|.
inline complex expm1(complex z) {
  const double a = z.real(), b = z.imag();
  const double half_sin = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * half_sin * half_sin, std::exp(a) * std::sin(b)};
}

inline double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

}  // namespace wgqed
