#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "amplitude_grid.hpp"
#include "observables.hpp"
#include "pulse.hpp"
#include "quadrature.hpp"
#include "spectral.hpp"
#include "wavepacket.hpp"

namespace wgqed {

using json = nlohmann::json;

namespace detail {

inline std::vector<complex> complex_list(const json& j) {
  std::vector<complex> out;
  for (const auto& v : j) {
    if (v.is_number()) {
      out.emplace_back(v.get<double>(), 0.0);
    } else if (v.is_array() && v.size() == 2) {
      out.emplace_back(v[0].get<double>(), v[1].get<double>());
    } else {
      throw InvalidArgument("complex values are numbers or [re, im] pairs");
    }
  }
  return out;
}

inline json complex_json(const std::vector<complex>& values) {
  json a = json::array();
  for (const complex& v : values) a.push_back({v.real(), v.imag()});
  return a;
}

}  // namespace detail

/// {"kind": "exponential", "gamma": G[, "t_max": T]} or
/// {"kind": "sampled", "times": [...], "values": [re or [re, im], ...]}.
inline PulseProfile profile_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "exponential") {
      const Bandwidth g(j.at("gamma").get<double>());
      const TimePoint t_max = j.contains("t_max") ? TimePoint(j["t_max"].get<double>()) : default_horizon(g);
      return PulseProfile::exponential(g, t_max);
    }
    if (kind == "sampled") {
      return PulseProfile::sampled(j.at("times").get<std::vector<double>>(), detail::complex_list(j.at("values")));
    }
    throw InvalidArgument("unknown profile kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("profile: ") + e.what());
  }
}

inline json profile_to_json(const PulseProfile& p) {
  switch (p.kind()) {
    case PulseProfile::Kind::exponential:
      return {{"kind", "exponential"}, {"gamma", p.bandwidth()->value()}, {"t_max", p.t_max()}};
    case PulseProfile::Kind::sampled:
      return {{"kind", "sampled"}, {"times", *p.sample_times()}, {"values", detail::complex_json(*p.sample_values())}};
    case PulseProfile::Kind::closure:
      break;
  }
  throw InvalidArgument("closure profiles cannot be serialized");
}

/// {"photons": [{"profile": {...}, "direction": "left"|"right"}, ...]} or
/// {"correlated2": {"axis": [...], "xi0": [...], "xi1": [...], "xi2": [...]}} with row-major tensors.
inline WavepacketN wavepacket_from_json(const json& j) {
  try {
    if (j.contains("correlated2")) {
      const json& c = j["correlated2"];
      auto component = [&](const char* key) {
        return c.contains(key) ? detail::complex_list(c[key]) : std::vector<complex>{};
      };
      return WavepacketN::correlated2(c.at("axis").get<std::vector<double>>(), component("xi0"), component("xi1"),
                                      component("xi2"));
    }
    std::vector<PhotonMode> modes;
    for (const auto& p : j.at("photons")) {
      modes.push_back({profile_from_json(p.at("profile")), parse_direction(p.at("direction").get<std::string>())});
    }
    return WavepacketN::product(std::move(modes));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("wavepacket: ") + e.what());
  }
}

inline json wavepacket_to_json(const WavepacketN& w) {
  if (!w.is_separable()) {
    return {{"correlated2",
             {{"axis", w.tensor(2).axis()},
              {"xi0", detail::complex_json(w.tensor(0).values())},
              {"xi1", detail::complex_json(w.tensor(1).values())},
              {"xi2", detail::complex_json(w.tensor(2).values())}}}};
  }
  json photons = json::array();
  for (const auto& m : w.modes()) photons.push_back({{"profile", profile_to_json(m.profile)}, {"direction", to_string(m.direction)}});
  return {{"photons", photons}};
}

inline QuadratureSpec quadrature_from_json(const json& j, QuadratureSpec q = {}) {
  if (j.contains("rule")) q.rule = parse_quadrature_rule(j["rule"].get<std::string>());
  if (j.contains("rel_tol")) q.rel_tol = j["rel_tol"].get<double>();
  if (j.contains("abs_tol")) q.abs_tol = j["abs_tol"].get<double>();
  if (j.contains("max_subdivisions")) q.max_subdivisions = j["max_subdivisions"].get<int>();
  q.validate();
  return q;
}

inline json quadrature_to_json(const QuadratureSpec& q) {
  return {{"rule", to_string(q.rule)}, {"rel_tol", q.rel_tol}, {"abs_tol", q.abs_tol},
          {"max_subdivisions", q.max_subdivisions}};
}

/// Header describing a grid written with write_csv.
inline json grid_header(const AmplitudeGrid& g) {
  json axes = json::array();
  for (const auto& a : g.axes) axes.push_back({{"start", a.front()}, {"stop", a.back()}, {"count", a.size()}});
  return {{"channel", g.channel}, {"dynamical_time", g.dynamical_time}, {"axes", axes},
          {"columns", [&] {
             std::vector<std::string> c;
             for (std::size_t d = 0; d < g.axes.size(); ++d) c.push_back("tau" + std::to_string(d + 1));
             c.insert(c.end(), {"t", "re", "im"});
             return c;
           }()}};
}

inline json to_json(const ComparisonReport& r) {
  return {{"channel", r.channel},
          {"grid",
           {{"gamma", r.gamma},
            {"time_nodes", r.time_nodes},
            {"time_span", r.time_span},
            {"omega_nodes", r.omega_nodes},
            {"omega_min", r.omega_min},
            {"omega_max", r.omega_max}}},
          {"tolerance", r.tolerance},
          {"max_abs_err", r.max_abs_err},
          {"rms_err", r.rms_err},
          {"pass", r.pass}};
}

inline json to_json(const ReflectionResult& r) {
  json j{{"n", r.n_photons}, {"gamma", r.gamma_bw.value()}, {"r_closed", r.r_closed}};
  j["r_numeric"] = r.r_numeric ? json(*r.r_numeric) : json(nullptr);
  j["abs_err"] = r.abs_err ? json(*r.abs_err) : json(nullptr);
  return j;
}

}  // namespace wgqed
