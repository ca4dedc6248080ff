#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <wgqed/wgqed.hpp>

namespace wgqed::cli {

/// Bad flags, unreadable config, inconsistent settings or unwritable output (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Command { reflect, excite, two_photon, validate, figure3 };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::reflect: return "reflect";
    case Command::excite: return "excite";
    case Command::two_photon: return "two-photon";
    case Command::validate: return "validate";
    case Command::figure3: return "figure3";
  }
  return "";
}

inline Command parse_command(const std::string& s) {
  for (Command c : {Command::reflect, Command::excite, Command::two_photon, Command::validate, Command::figure3}) {
    if (to_string(c) == s) return c;
  }
  throw ConfigError("unknown command '" + s + "'");
}

struct GridSpec {
  double start = 0.0;
  double stop = 10.0;
  std::size_t count = 101;

  std::vector<double> axis() const { return uniform_axis(start, stop, count); }
};

/// "start:stop:count".
inline GridSpec parse_grid(const std::string& s) {
  std::stringstream ss(s);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c) ) {
    throw ConfigError("grid must read start:stop:count, got '" + s + "'");
  }
  try {
    GridSpec g{std::stod(a), std::stod(b), static_cast<std::size_t>(std::stoul(c))};
    if (g.count < 2 || !(g.stop > g.start)) throw ConfigError("grid needs stop > start and count >= 2");
    return g;
  } catch (const std::logic_error&) {
    throw ConfigError("grid must read start:stop:count, got '" + s + "'");
  }
}

/// "log:a:b:count", "lin:a:b:count" or a comma-separated list.
inline std::vector<double> parse_gamma_grid(const std::string& s) {
  try {
    if (s.rfind("log:", 0) == 0 || s.rfind("lin:", 0) == 0) {
      const GridSpec g = parse_grid(s.substr(4));
      if (s[1] == 'i') return g.axis();
      if (!(g.start > 0.0)) throw ConfigError("log grid needs a positive start");
      std::vector<double> out(g.count);
      const double la = std::log(g.start), lb = std::log(g.stop);
      for (std::size_t i = 0; i < g.count; ++i) {
        out[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(g.count - 1));
      }
      out.front() = g.start;
      out.back() = g.stop;
      return out;
    }
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stod(item));
    if (out.empty()) throw ConfigError("empty gamma grid");
    return out;
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse gamma grid '" + s + "'");
  }
}

struct BridgeSettings {
  std::size_t time_nodes = 2048;
  std::size_t omega_nodes = 64;
  double omega_max = 10.0;
};

struct RunConfig {
  Command command = Command::reflect;
  std::optional<int> n;
  std::optional<double> gamma;
  Direction direction = Direction::right;
  /// Explicit input wavepacket; otherwise n identical exponential photons of bandwidth gamma.
  std::optional<json> input;
  GridSpec grid;
  std::optional<double> time;
  std::vector<int> n_list{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 20};
  std::string gamma_grid = "log:0.01:100:200";
  std::string suite = "appendix-b";
  std::optional<bool> numeric;
  BridgeSettings bridge;
  QuadratureSpec quad;
  std::string output;
  std::optional<std::string> format;

  std::string resolved_format() const {
    return format.value_or(command == Command::validate ? "json" : "csv");
  }

  void validate() const {
    const std::string f = resolved_format();
    if (f != "csv" && f != "json") throw ConfigError("format must be csv or json");
    if (n && *n < 1) throw ConfigError("n must be >= 1");
    if (gamma && !(*gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (input) {
      const bool correlated = input->contains("correlated2");
      if (correlated && n && *n != 2) throw ConfigError("correlated input carries exactly two photons");
      if (!correlated && n && input->contains("photons") && (*input)["photons"].size() != static_cast<std::size_t>(*n)) {
        throw ConfigError("n disagrees with the number of photons in the input");
      }
    }
    for (int k : n_list) {
      if (k < 1) throw ConfigError("n-list entries must be >= 1");
    }
    if (suite != "appendix-b" && suite != "reflection" && suite != "unitarity") {
      throw ConfigError("suite must be appendix-b, reflection or unitarity");
    }
    if (command == Command::two_photon && resolved_format() == "csv" && output.empty()) {
      throw ConfigError("two-photon csv output needs --out (one file per channel)");
    }
    quad.validate();
  }
};

inline RunConfig config_from_json(const json& j, RunConfig c = {}) {
  try {
    if (j.contains("command")) c.command = parse_command(j["command"].get<std::string>());
    if (j.contains("n")) c.n = j["n"].get<int>();
    if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
    if (j.contains("direction")) c.direction = parse_direction(j["direction"].get<std::string>());
    if (j.contains("input")) c.input = j["input"];
    if (j.contains("grid")) {
      const json& g = j["grid"];
      c.grid = g.is_string() ? parse_grid(g.get<std::string>())
                             : GridSpec{g.at("start").get<double>(), g.at("stop").get<double>(),
                                        g.at("count").get<std::size_t>()};
    }
    if (j.contains("time")) c.time = j["time"].get<double>();
    if (j.contains("n_list")) c.n_list = j["n_list"].get<std::vector<int>>();
    if (j.contains("gamma_grid")) c.gamma_grid = j["gamma_grid"].get<std::string>();
    if (j.contains("suite")) c.suite = j["suite"].get<std::string>();
    if (j.contains("numeric")) c.numeric = j["numeric"].get<bool>();
    if (j.contains("bridge")) {
      const json& b = j["bridge"];
      if (b.contains("time_nodes")) c.bridge.time_nodes = b["time_nodes"].get<std::size_t>();
      if (b.contains("omega_nodes")) c.bridge.omega_nodes = b["omega_nodes"].get<std::size_t>();
      if (b.contains("omega_max")) c.bridge.omega_max = b["omega_max"].get<double>();
    }
    if (j.contains("quadrature")) c.quad = quadrature_from_json(j["quadrature"], c.quad);
    if (j.contains("output")) c.output = j["output"].get<std::string>();
    if (j.contains("format")) c.format = j["format"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

inline json config_to_json(const RunConfig& c) {
  json j{{"command", to_string(c.command)},
         {"direction", wgqed::to_string(c.direction)},
         {"grid", {{"start", c.grid.start}, {"stop", c.grid.stop}, {"count", c.grid.count}}},
         {"n_list", c.n_list},
         {"gamma_grid", c.gamma_grid},
         {"suite", c.suite},
         {"bridge",
          {{"time_nodes", c.bridge.time_nodes}, {"omega_nodes", c.bridge.omega_nodes}, {"omega_max", c.bridge.omega_max}}},
         {"quadrature", quadrature_to_json(c.quad)},
         {"output", c.output},
         {"format", c.resolved_format()}};
  if (c.n) j["n"] = *c.n;
  if (c.gamma) j["gamma"] = *c.gamma;
  if (c.input) j["input"] = *c.input;
  if (c.time) j["time"] = *c.time;
  if (c.numeric) j["numeric"] = *c.numeric;
  return j;
}

namespace detail {

inline WavepacketN resolve_input(const RunConfig& c) {
  try {
    if (c.input) return wavepacket_from_json(*c.input);
    if (!c.n || !c.gamma) throw ConfigError("input needs either an explicit wavepacket or both --n and --gamma");
    const PulseProfile p = make_exponential_profile(Bandwidth(*c.gamma));
    return WavepacketN::product(std::vector<PhotonMode>(static_cast<std::size_t>(*c.n), PhotonMode{p, c.direction}));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("input: ") + e.what());
  } catch (const NormalizationError& e) {
    throw ConfigError(std::string("input: ") + e.what());
  }
}

inline std::string csv_optional(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

inline std::string reflection_row(const ReflectionResult& r) {
  return std::to_string(r.n_photons) + ',' + format_number(r.gamma_bw.value()) + ',' + format_number(r.r_closed) + ',' +
         csv_optional(r.r_numeric) + ',' + csv_optional(r.abs_err) + '\n';
}

inline ReflectionResult reflection_result(int n, double gamma, bool numeric, const QuadratureSpec& quad) {
  if (numeric) return reflection_probability_numeric(n, Bandwidth(gamma), quad);
  return {n, Bandwidth(gamma), reflection_probability_closed(n, Bandwidth(gamma)), std::nullopt, std::nullopt};
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os_ = &fallback;
      return;
    }
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw ConfigError("cannot write output file '" + path + "'");
    os_ = &file_;
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

inline void write_json(const json& j, const std::string& path, std::ostream& out) {
  Sink sink(path, out);
  *sink << j.dump(2) << '\n';
}

inline int run_reflect(const RunConfig& c, std::ostream& out) {
  if (!c.n || !c.gamma) throw ConfigError("reflect needs --n and --gamma");
  const bool numeric = c.numeric.value_or(*c.n <= 5);
  if (numeric && *c.n > 5) throw ConfigError("numeric reflection probability supports n <= 5");
  const ReflectionResult r = reflection_result(*c.n, *c.gamma, numeric, c.quad);
  if (c.resolved_format() == "json") {
    write_json(to_json(r), c.output, out);
  } else {
    Sink sink(c.output, out);
    *sink << "N,gamma,R_closed,R_numeric,abs_err\n" << reflection_row(r);
  }
  return 0;
}

inline int run_figure3(const RunConfig& c, std::ostream& out) {
  const std::vector<double> gammas = parse_gamma_grid(c.gamma_grid);
  const bool numeric = c.numeric.value_or(false);
  std::vector<ReflectionResult> rows;
  for (int n : c.n_list) {
    if (numeric && n > 5) throw ConfigError("numeric reflection probability supports n <= 5");
    for (double g : gammas) rows.push_back(reflection_result(n, g, numeric, c.quad));
  }
  if (c.resolved_format() == "json") {
    json a = json::array();
    for (const auto& r : rows) a.push_back(to_json(r));
    write_json(a, c.output, out);
  } else {
    Sink sink(c.output, out);
    *sink << "N,gamma,R_closed,R_numeric,abs_err\n";
    for (const auto& r : rows) *sink << reflection_row(r);
  }
  return 0;
}

inline int run_excite(const RunConfig& c, std::ostream& out) {
  const WavepacketN w = resolve_input(c);
  if (w.n_photons() != 1 && w.n_photons() != 2) throw ConfigError("excite supports one or two photons");
  const ExcitationTrace trace = excitation_trace(c.grid.axis(), w, c.quad);
  if (c.resolved_format() == "json") {
    write_json({{"t", trace.times}, {"p_e", trace.values}}, c.output, out);
  } else {
    Sink sink(c.output, out);
    *sink << "t,P_e\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      *sink << format_number(trace.times[i]) << ',' << format_number(trace.values[i]) << '\n';
    }
  }
  return 0;
}

inline int run_two_photon(const RunConfig& c, std::ostream& out) {
  const WavepacketN w = resolve_input(c);
  if (w.n_photons() != 2) throw ConfigError("two-photon needs a two-photon input");
  const double t = c.time.value_or(std::max(c.grid.stop, w.horizon()));
  const AmplitudeEngine engine(w, c.quad);
  const auto grids = two_photon_grids(engine, c.grid.axis(), t);
  json header{{"input", wavepacket_to_json(w)}, {"quadrature", quadrature_to_json(c.quad)}, {"channels", json::array()}};
  if (c.resolved_format() == "json") {
    for (const auto& g : grids) {
      json ch = grid_header(g);
      ch["values"] = wgqed::detail::complex_json(g.values);
      header["channels"].push_back(ch);
    }
    write_json(header, c.output, out);
    return 0;
  }
  for (const auto& g : grids) {
    const std::string path = c.output + "." + g.channel + ".csv";
    Sink sink(path, out);
    write_csv(*sink, g);
    json ch = grid_header(g);
    ch["file"] = path;
    header["channels"].push_back(ch);
  }
  write_json(header, c.output + ".json", out);
  return 0;
}

inline int run_validate(const RunConfig& c, std::ostream& out) {
  json result{{"suite", c.suite}};
  bool pass = true;
  json rows = json::array();
  if (c.suite == "appendix-b") {
    const std::vector<double> gammas = c.gamma ? std::vector<double>{*c.gamma} : std::vector<double>{0.5, 1.0, 2.0};
    SpectralValidationOptions opt;
    opt.time_nodes = c.bridge.time_nodes;
    opt.omega_nodes = c.bridge.omega_nodes;
    opt.omega_max = c.bridge.omega_max;
    double worst = 0.0;
    for (double g : gammas) {
      for (const auto& r : frequency_domain_validation(Bandwidth(g), opt, c.quad)) {
        rows.push_back(to_json(r));
        pass = pass && r.pass;
        worst = std::max(worst, r.max_abs_err);
      }
    }
    result["max_abs_err"] = worst;
    result["tolerance"] = opt.tolerance;
  } else if (c.suite == "reflection") {
    const std::vector<double> gammas =
        c.gamma ? std::vector<double>{*c.gamma} : std::vector<double>{0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
    std::vector<int> ns{1, 2, 3, 4, 5};
    if (c.n) ns = {*c.n};
    constexpr double tol = 1e-6;
    double worst = 0.0;
    for (int n : ns) {
      if (n > 5) throw ConfigError("reflection suite supports n <= 5");
      for (double g : gammas) {
        const ReflectionResult r = reflection_probability_numeric(n, Bandwidth(g), c.quad);
        rows.push_back(to_json(r));
        worst = std::max(worst, *r.abs_err);
      }
    }
    pass = worst <= tol;
    result["max_abs_err"] = worst;
    result["tolerance"] = tol;
  } else {
    const std::vector<double> gammas = c.gamma ? std::vector<double>{*c.gamma} : std::vector<double>{0.5, 2.0, 20.0};
    constexpr double tol = 1e-5;
    double worst = 0.0;
    for (double g : gammas) {
      const PulseProfile p = make_exponential_profile(Bandwidth(g));
      const WavepacketN w = WavepacketN::product({{p, c.direction}, {p, c.direction}});
      const double total = unitarity_check_two_photon(w, c.quad);
      rows.push_back({{"gamma", g}, {"total_probability", total}, {"abs_err", std::abs(total - 1.0)}});
      worst = std::max(worst, std::abs(total - 1.0));
    }
    pass = worst <= tol;
    result["max_abs_err"] = worst;
    result["tolerance"] = tol;
  }
  result["pass"] = pass;
  result["reports"] = rows;
  if (c.resolved_format() == "json") {
    write_json(result, c.output, out);
  } else {
    Sink sink(c.output, out);
    *sink << "suite,pass,max_abs_err,tolerance\n"
          << c.suite << ',' << (pass ? "true" : "false") << ',' << format_number(result["max_abs_err"].get<double>())
          << ',' << format_number(result["tolerance"].get<double>()) << '\n';
  }
  return pass ? 0 : 1;
}

}  // namespace detail

inline int run(const RunConfig& c, std::ostream& out) {
  c.validate();
  switch (c.command) {
    case Command::reflect: return detail::run_reflect(c, out);
    case Command::excite: return detail::run_excite(c, out);
    case Command::two_photon: return detail::run_two_photon(c, out);
    case Command::validate: return detail::run_validate(c, out);
    case Command::figure3: return detail::run_figure3(c, out);
  }
  return 2;
}

/// Exit codes: 0 success, 1 validation failure or numerical error, 2 configuration error.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Few-photon scattering on a two-level atom in a 1-D waveguide", "wgqed-scatter"};
  app.require_subcommand(1);

  struct Flags {
    std::string config, out, format, direction, grid, n_list, gamma_grid, suite, rule;
    std::optional<int> n, max_subdivisions;
    std::optional<double> gamma, time, rel_tol, abs_tol, omega_max;
    std::optional<std::size_t> time_nodes, omega_nodes;
    bool numeric = false, no_numeric = false;
  } f;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", f.config, "JSON run configuration; flags override it")->check(CLI::ExistingFile);
    s->add_option("--out", f.out, "output path (stdout if omitted; prefix for two-photon csv)");
    s->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--rel-tol", f.rel_tol, "quadrature relative tolerance");
    s->add_option("--abs-tol", f.abs_tol, "quadrature absolute tolerance");
    s->add_option("--rule", f.rule, "gauss-legendre-composite or adaptive");
    s->add_option("--max-subdivisions", f.max_subdivisions, "quadrature bisection budget");
  };
  auto input = [&](CLI::App* s) {
    s->add_option("--n", f.n, "photon number");
    s->add_option("--gamma", f.gamma, "pulse bandwidth in units of the atomic decay rate");
    s->add_option("--direction", f.direction, "propagation direction of the input photons")
        ->check(CLI::IsMember({"left", "right"}));
  };

  CLI::App* reflect = app.add_subcommand("reflect", "probability that all N photons are reflected");
  common(reflect);
  input(reflect);
  reflect->add_flag("--numeric", f.numeric, "also evaluate the nested integral numerically (N <= 5)");
  reflect->add_flag("--no-numeric", f.no_numeric, "closed form only");

  CLI::App* excite = app.add_subcommand("excite", "atomic excitation probability P_e(t)");
  common(excite);
  input(excite);
  excite->add_option("--grid", f.grid, "time grid start:stop:count");

  CLI::App* two = app.add_subcommand("two-photon", "two-photon output amplitudes f0, f1, f2 on a time grid");
  common(two);
  input(two);
  two->add_option("--grid", f.grid, "time grid start:stop:count for both photons");
  two->add_option("--time", f.time, "dynamical time t (default: long time)");

  CLI::App* validate = app.add_subcommand("validate", "cross-check against independent results");
  common(validate);
  input(validate);
  validate->add_option("--suite", f.suite, "appendix-b, reflection or unitarity")
      ->check(CLI::IsMember({"appendix-b", "reflection", "unitarity"}));
  validate->add_option("--time-nodes", f.time_nodes, "time samples per axis for the Fourier bridge");
  validate->add_option("--omega-nodes", f.omega_nodes, "frequency samples per axis");
  validate->add_option("--omega-max", f.omega_max, "half-width of the frequency window");

  CLI::App* figure3 = app.add_subcommand("figure3", "reflection probability R_N over a bandwidth sweep");
  common(figure3);
  figure3->add_option("--n-list", f.n_list, "comma-separated photon numbers");
  figure3->add_option("--gamma-grid", f.gamma_grid, "log:a:b:count, lin:a:b:count or a comma list");
  figure3->add_flag("--numeric", f.numeric, "also evaluate R_N numerically (N <= 5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    RunConfig c;
    if (!f.config.empty()) {
      std::ifstream in(f.config);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError("cannot read config '" + f.config + "': " + e.what());
      }
      c = config_from_json(j);
    }
    c.command = parse_command(sub->get_name());
    auto given = [&](const char* name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };
    if (given("--out")) c.output = f.out;
    if (given("--format")) c.format = f.format;
    if (f.rel_tol) c.quad.rel_tol = *f.rel_tol;
    if (f.abs_tol) c.quad.abs_tol = *f.abs_tol;
    if (f.max_subdivisions) c.quad.max_subdivisions = *f.max_subdivisions;
    if (given("--rule")) c.quad.rule = parse_quadrature_rule(f.rule);
    if (f.n) c.n = f.n;
    if (f.gamma) c.gamma = f.gamma;
    if (given("--direction")) c.direction = parse_direction(f.direction);
    if (given("--grid")) c.grid = parse_grid(f.grid);
    if (f.time) c.time = f.time;
    if (given("--suite")) c.suite = f.suite;
    if (f.time_nodes) c.bridge.time_nodes = *f.time_nodes;
    if (f.omega_nodes) c.bridge.omega_nodes = *f.omega_nodes;
    if (f.omega_max) c.bridge.omega_max = *f.omega_max;
    if (given("--n-list")) {
      c.n_list.clear();
      std::stringstream ss(f.n_list);
      for (std::string item; std::getline(ss, item, ',');) {
        try {
          c.n_list.push_back(std::stoi(item));
        } catch (const std::logic_error&) {
          throw ConfigError("cannot parse n-list '" + f.n_list + "'");
        }
      }
    }
    if (given("--gamma-grid")) c.gamma_grid = f.gamma_grid;
    if (f.numeric && f.no_numeric) throw ConfigError("--numeric and --no-numeric are exclusive");
    if (f.numeric) c.numeric = true;
    if (f.no_numeric) c.numeric = false;
    if (c.input && c.gamma && !c.input->contains("correlated2") && given("--gamma")) {
      throw ConfigError("--gamma conflicts with an explicit input wavepacket");
    }
    return run(c, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace wgqed::cli
