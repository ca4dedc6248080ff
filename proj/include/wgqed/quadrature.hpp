#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "core.hpp"

namespace wgqed {

enum class QuadratureRule {
  /// Panels of bounded width seeded up front, then adaptive bisection on the error estimate.
  composite,
  /// Pure global adaptive bisection starting from the breakpoint partition.
  adaptive,
};

struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::composite;
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  /// Maximum number of bisections beyond the initial partition.
  int max_subdivisions = 4000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw InvalidArgument("quadrature tolerances must be positive");
    if (max_subdivisions < 1) throw InvalidArgument("max_subdivisions must be >= 1");
  }

  /// Same rule with every tolerance scaled, used for inner levels of nested integrals.
  QuadratureSpec tightened(double factor) const {
    QuadratureSpec q = *this;
    q.abs_tol *= factor;
    return q;
  }
};

inline std::string_view to_string(QuadratureRule r) {
  return r == QuadratureRule::composite ? "gauss-legendre-composite" : "adaptive";
}

inline QuadratureRule parse_quadrature_rule(std::string_view s) {
  if (s == "gauss-legendre-composite" || s == "composite") return QuadratureRule::composite;
  if (s == "adaptive") return QuadratureRule::adaptive;
  throw InvalidArgument("unknown quadrature rule '" + std::string(s) + "'");
}

template <class T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

template <class T>
double magnitude(const T& v) {
  using std::abs;
  return abs(v);
}

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  double roundoff;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One 7-point Gauss / 15-point Kronrod panel with the QUADPACK error heuristic.
template <class T, class F>
Panel<T> gk15_panel(F& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  constexpr double eps = std::numeric_limits<double>::epsilon();

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fv[15];
  fv[0] = f(c);
  for (int i = 1; i < 8; ++i) {
    fv[2 * i - 1] = f(c - h * x[i]);
    fv[2 * i] = f(c + h * x[i]);
  }
  T resk = wk[0] * fv[0];
  T resg = wg[0] * fv[0];
  double resabs = wk[0] * magnitude(fv[0]);
  for (int i = 1; i < 8; ++i) {
    const T pair = fv[2 * i - 1] + fv[2 * i];
    resk += wk[i] * pair;
    resabs += wk[i] * (magnitude(fv[2 * i - 1]) + magnitude(fv[2 * i]));
    if (i % 2 == 0) resg += wg[i / 2] * pair;
  }
  const T mean = resk * 0.5;
  double resasc = wk[0] * magnitude(fv[0] - mean);
  for (int i = 1; i < 8; ++i) {
    resasc += wk[i] * (magnitude(fv[2 * i - 1] - mean) + magnitude(fv[2 * i] - mean));
  }
  resk *= h;
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  double err = magnitude((resk - resg * h));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double roundoff = 50.0 * eps * resabs;
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(roundoff, err);
  return {a, b, resk, err, roundoff};
}

}  // namespace detail

/// Integrates f over [a, b]. `breakpoints` seed the partition (kinks, sample nodes);
/// `max_panel` > 0 bounds the initial panel width for the composite rule.
template <class F, class T = std::invoke_result_t<F&, double>>
QuadratureResult<T> integrate(F&& f, double a, double b, const QuadratureSpec& spec,
                              std::span<const double> breakpoints = {}, double max_panel = 0.0) {
  if (!(std::isfinite(a) && std::isfinite(b))) throw InvalidArgument("integration limits must be finite");
  if (a == b) return {};
  if (a > b) {
    auto r = integrate(f, b, a, spec, breakpoints, max_panel);
    r.value = -r.value;
    return r;
  }

  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Panel<T>> heap;
  T total{};
  double total_err = 0.0;
  double total_roundoff = 0.0;
  int evals = 0;
  auto push = [&](const detail::Panel<T>& p) {
    total += p.value;
    total_err += p.error;
    total_roundoff += p.roundoff;
    evals += 15;
    heap.push(p);
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    int pieces = 1;
    if (spec.rule == QuadratureRule::composite && max_panel > 0.0) {
      pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_panel - 1e-9)));
    }
    for (int k = 0; k < pieces; ++k) {
      const double pa = lo + (hi - lo) * k / pieces;
      const double pb = (k + 1 == pieces) ? hi : lo + (hi - lo) * (k + 1) / pieces;
      push(detail::gk15_panel<T>(f, pa, pb));
    }
  }

  for (int split = 0;; ++split) {
    const double tol = std::max(spec.abs_tol, spec.rel_tol * detail::magnitude(total));
    if (total_err <= tol || total_err <= 2.0 * total_roundoff) break;
    const detail::Panel<T> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (split >= spec.max_subdivisions || !(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("integral over [" + std::to_string(a) + ", " + std::to_string(b) +
                                "] did not converge; achieved error estimate " + std::to_string(total_err),
                            total_err);
    }
    heap.pop();
    total -= worst.value;
    total_err -= worst.error;
    total_roundoff -= worst.roundoff;
    push(detail::gk15_panel<T>(f, worst.a, mid));
    push(detail::gk15_panel<T>(f, mid, worst.b));
  }

  // Re-sum to shed drift from the incremental updates.
  QuadratureResult<T> out;
  out.evaluations = evals;
  while (!heap.empty()) {
    out.value += heap.top().value;
    out.error += heap.top().error;
    heap.pop();
  }
  return out;
}

/// Integrates f over [a, inf) through t = a - ln(1 - u) / rate, u in [0, 1).
template <class F, class T = std::invoke_result_t<F&, double>>
QuadratureResult<T> integrate_to_infinity(F&& f, double a, double rate, const QuadratureSpec& spec,
                                          int initial_panels = 8) {
  if (!(rate > 0.0)) throw InvalidArgument("decay rate for the semi-infinite map must be positive");
  auto mapped = [&](double u) -> T {
    const double one_minus = 1.0 - u;
    const double t = a - std::log(one_minus) / rate;
    if (!std::isfinite(t)) return T{};
    return f(t) / (rate * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, spec, {}, 1.0 / initial_panels);
}

/// Integrates f over the whole real line through w = center + scale * x / (1 - x^2).
template <class F, class T = std::invoke_result_t<F&, double>>
QuadratureResult<T> integrate_real_line(F&& f, double center, double scale, const QuadratureSpec& spec,
                                        int initial_panels = 16) {
  if (!(scale > 0.0)) throw InvalidArgument("scale for the real-line map must be positive");
  auto mapped = [&](double x) -> T {
    const double d = 1.0 - x * x;
    const double w = center + scale * x / d;
    if (!std::isfinite(w)) return T{};
    return f(w) * (scale * (1.0 + x * x) / (d * d));
  };
  return integrate(mapped, -1.0, 1.0, spec, {}, 2.0 / initial_panels);
}

}  // namespace wgqed
