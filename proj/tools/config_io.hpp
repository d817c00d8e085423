// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "symlab/experiments.hpp"

namespace symlab::cli {

using json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
void get(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

inline void get_seed(const json& j, const char* key, std::uint64_t& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_unsigned()) throw ConfigError(where + "." + key + ": expected a nonnegative integer");
  out = j.at(key).get<std::uint64_t>();
}

}  // namespace detail

// ---- per-experiment sections ------------------------------------------------------------------

inline void read(const json& j, FlatConfig& c) {
  detail::only_keys(j, "flat", {"t2_grids", "t4_grid", "t2_tol", "t4_tol", "min_order_ratio"});
  detail::get(j, "t2_grids", c.t2_grids, "flat");
  detail::get(j, "t4_grid", c.t4_grid, "flat");
  detail::get(j, "t2_tol", c.t2_tol, "flat");
  detail::get(j, "t4_tol", c.t4_tol, "flat");
  detail::get(j, "min_order_ratio", c.min_order_ratio, "flat");
}
inline json echo(const FlatConfig& c) {
  return {{"t2_grids", c.t2_grids}, {"t4_grid", c.t4_grid}, {"t2_tol", c.t2_tol}, {"t4_tol", c.t4_tol},
          {"min_order_ratio", c.min_order_ratio}};
}

inline void read(const json& j, HormanderConfig& c) {
  detail::only_keys(j, "hormander", {"points", "depth", "wronskian_points", "higher_k", "seed"});
  detail::get(j, "points", c.points, "hormander");
  detail::get(j, "depth", c.depth, "hormander");
  detail::get(j, "wronskian_points", c.wronskian_points, "hormander");
  detail::get(j, "higher_k", c.higher_k, "hormander");
  detail::get_seed(j, "seed", c.seed, "hormander");
}
inline json echo(const HormanderConfig& c) {
  return {{"points", c.points}, {"depth", c.depth}, {"wronskian_points", c.wronskian_points},
          {"higher_k", c.higher_k}, {"seed", c.seed}};
}

struct CollapseExtras {
  bool export_operator = false;  // write the t = first stiffness matrix as (row, col, value) triplets
};

inline void read(const json& j, CollapseConfig& c, CollapseExtras& x) {
  detail::only_keys(j, "collapse", {"grid", "ts", "anisotropy_limit", "fiber_dim", "k", "min_slope", "eps_disc", "tol",
                                    "export_operator"});
  detail::get(j, "grid", c.grid, "collapse");
  detail::get(j, "ts", c.ts, "collapse");
  detail::get(j, "anisotropy_limit", c.anisotropy_limit, "collapse");
  detail::get(j, "fiber_dim", c.fiber_dim, "collapse");
  detail::get(j, "k", c.k, "collapse");
  detail::get(j, "min_slope", c.min_slope, "collapse");
  detail::get(j, "eps_disc", c.eps_disc, "collapse");
  detail::get(j, "tol", c.tol, "collapse");
  detail::get(j, "export_operator", x.export_operator, "collapse");
}
inline json echo(const CollapseConfig& c, const CollapseExtras& x) {
  return {{"grid", c.grid}, {"ts", c.ts}, {"anisotropy_limit", c.anisotropy_limit}, {"fiber_dim", c.fiber_dim},
          {"k", c.k}, {"min_slope", c.min_slope}, {"eps_disc", c.eps_disc}, {"tol", c.tol},
          {"export_operator", x.export_operator}};
}

inline void read(const json& j, HolonomyConfig& c) {
  detail::only_keys(j, "holonomy", {"smoothing", "base_steps", "flow_tol", "equality_tol", "min_refinement_ratio",
                                    "random_connections", "random_scale", "extremum_base_samples",
                                    "extremum_fiber_samples", "fiber_quad", "s_values", "seed"});
  detail::get(j, "smoothing", c.smoothing, "holonomy");
  detail::get(j, "base_steps", c.base_steps, "holonomy");
  detail::get(j, "flow_tol", c.flow_tol, "holonomy");
  detail::get(j, "equality_tol", c.equality_tol, "holonomy");
  detail::get(j, "min_refinement_ratio", c.min_refinement_ratio, "holonomy");
  detail::get(j, "random_connections", c.random_connections, "holonomy");
  detail::get(j, "random_scale", c.random_scale, "holonomy");
  detail::get(j, "extremum_base_samples", c.extrema.base_samples, "holonomy");
  detail::get(j, "extremum_fiber_samples", c.extrema.fiber_samples, "holonomy");
  detail::get(j, "fiber_quad", c.fiber_quad, "holonomy");
  detail::get(j, "s_values", c.s_values, "holonomy");
  detail::get_seed(j, "seed", c.seed, "holonomy");
}
inline json echo(const HolonomyConfig& c) {
  return {{"smoothing", c.smoothing}, {"base_steps", c.base_steps}, {"flow_tol", c.flow_tol},
          {"equality_tol", c.equality_tol}, {"min_refinement_ratio", c.min_refinement_ratio},
          {"random_connections", c.random_connections}, {"random_scale", c.random_scale},
          {"extremum_base_samples", c.extrema.base_samples}, {"extremum_fiber_samples", c.extrema.fiber_samples},
          {"fiber_quad", c.fiber_quad}, {"s_values", c.s_values}, {"seed", c.seed}};
}

inline void read(const json& j, SizeConfig& c) {
  detail::only_keys(j, "size", {"smoothings", "u_fractions", "reject_fraction", "perturbations", "perturbation_scale",
                                "volume_tol", "fi_tol", "size_reference", "size_rel_tol", "seed",
                                "perturbed_base_samples", "perturbed_fiber_samples"});
  detail::get(j, "smoothings", c.smoothings, "size");
  detail::get(j, "u_fractions", c.u_fractions, "size");
  detail::get(j, "reject_fraction", c.reject_fraction, "size");
  detail::get(j, "perturbations", c.perturbations, "size");
  detail::get(j, "perturbation_scale", c.perturbation_scale, "size");
  detail::get(j, "volume_tol", c.volume_tol, "size");
  detail::get(j, "fi_tol", c.fi_tol, "size");
  detail::get(j, "size_reference", c.size_reference, "size");
  detail::get(j, "size_rel_tol", c.size_rel_tol, "size");
  detail::get_seed(j, "seed", c.seed, "size");
  detail::get(j, "perturbed_base_samples", c.perturbed_extrema.base_samples, "size");
  detail::get(j, "perturbed_fiber_samples", c.perturbed_extrema.fiber_samples, "size");
}
inline json echo(const SizeConfig& c) {
  return {{"smoothings", c.smoothings}, {"u_fractions", c.u_fractions}, {"reject_fraction", c.reject_fraction},
          {"perturbations", c.perturbations}, {"perturbation_scale", c.perturbation_scale},
          {"volume_tol", c.volume_tol}, {"fi_tol", c.fi_tol}, {"size_reference", c.size_reference},
          {"size_rel_tol", c.size_rel_tol}, {"seed", c.seed},
          {"perturbed_base_samples", c.perturbed_extrema.base_samples},
          {"perturbed_fiber_samples", c.perturbed_extrema.fiber_samples}};
}

inline void read(const json& j, LambdaFibrationConfig& c) {
  detail::only_keys(j, "lambda", {"base_x", "base_y", "fiber", "fiber_area", "connection_scale", "u_fractions", "margin",
                                  "product_u"});
  detail::get(j, "base_x", c.base_x, "lambda");
  detail::get(j, "base_y", c.base_y, "lambda");
  detail::get(j, "fiber", c.fiber, "lambda");
  detail::get(j, "fiber_area", c.fiber_area, "lambda");
  detail::get(j, "connection_scale", c.connection_scale, "lambda");
  detail::get(j, "u_fractions", c.u_fractions, "lambda");
  detail::get(j, "margin", c.margin, "lambda");
  detail::get(j, "product_u", c.product_u, "lambda");
}
inline json echo(const LambdaFibrationConfig& c) {
  return {{"base_x", c.base_x}, {"base_y", c.base_y}, {"fiber", c.fiber}, {"fiber_area", c.fiber_area},
          {"connection_scale", c.connection_scale}, {"u_fractions", c.u_fractions}, {"margin", c.margin},
          {"product_u", c.product_u}};
}

inline void read(const json& j, BoundsConfig& c) {
  detail::only_keys(j, "bounds", {"sphere_nz", "sphere_ntheta", "torus_grid", "sphere_tol", "max_n", "measured", "genus",
                                  "area", "cohomology"});
  detail::get(j, "sphere_nz", c.sphere_nz, "bounds");
  detail::get(j, "sphere_ntheta", c.sphere_ntheta, "bounds");
  detail::get(j, "torus_grid", c.torus_grid, "bounds");
  detail::get(j, "sphere_tol", c.sphere_tol, "bounds");
  detail::get(j, "max_n", c.max_n, "bounds");
  detail::get(j, "genus", c.genus, "bounds");
  detail::get(j, "area", c.area, "bounds");
  if (j.contains("measured") && !j.at("measured").is_null()) {
    double m = 0.0;
    detail::get(j, "measured", m, "bounds");
    c.measured = m;
  }
  if (j.contains("cohomology")) {
    const auto& h = j.at("cohomology");
    detail::only_keys(h, "bounds.cohomology", {"n", "c1", "vol", "deg", "constant"});
    auto& d = c.cohomology;
    detail::get(h, "n", d.n, "bounds.cohomology");
    detail::get(h, "c1", d.c1, "bounds.cohomology");
    detail::get(h, "vol", d.vol, "bounds.cohomology");
    if (h.contains("deg")) d.deg = h.at("deg").is_null() ? std::nullopt : std::optional<double>(h.at("deg").get<double>());
    if (h.contains("constant"))
      d.constant = h.at("constant").is_null() ? std::nullopt : std::optional<double>(h.at("constant").get<double>());
  }
}
inline json echo(const BoundsConfig& c) {
  const auto& d = c.cohomology;
  json coh{{"n", d.n}, {"c1", d.c1}, {"vol", d.vol}, {"deg", d.deg ? json(*d.deg) : json(nullptr)},
           {"constant", d.constant ? json(*d.constant) : json(nullptr)}};
  return {{"sphere_nz", c.sphere_nz}, {"sphere_ntheta", c.sphere_ntheta}, {"torus_grid", c.torus_grid},
          {"sphere_tol", c.sphere_tol}, {"max_n", c.max_n}, {"measured", c.measured ? json(*c.measured) : json(nullptr)},
          {"genus", c.genus}, {"area", c.area}, {"cohomology", coh}};
}

inline void read(const json& j, DualityConfig& c) {
  detail::only_keys(j, "duality", {"smoothing", "random_points", "tol", "seed"});
  detail::get(j, "smoothing", c.smoothing, "duality");
  detail::get(j, "random_points", c.random_points, "duality");
  detail::get(j, "tol", c.tol, "duality");
  detail::get_seed(j, "seed", c.seed, "duality");
}
inline json echo(const DualityConfig& c) {
  return {{"smoothing", c.smoothing}, {"random_points", c.random_points}, {"tol", c.tol}, {"seed", c.seed}};
}

// ---- user connections ------------------------------------------------------------------------

/// A connection described in the config file: fiber kind and area, then either the preset
/// "rotation" (sphere only) or explicit terms of a and b.
struct ConnectionSpec {
  json source;  // kept verbatim for the report echo
  std::string fiber = "sphere";
  double area = 1.0;
  std::vector<double> s_values{0.25, 0.5, 0.75};
  int fiber_quad = 8;
  int extremum_base_samples = 65;
  int extremum_fiber_samples = 24;
};

namespace detail {

inline Profile1D parse_profile(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": profiles are strings such as \"bump\", \"sine:2\", \"ramp:0.05\"");
  const std::string s = j.get<std::string>();
  const auto colon = s.find(':');
  const std::string name = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  try {
    if (name == "constant") return Profile1D::constant();
    if (name == "linear") return Profile1D::linear();
    if (name == "bump") return Profile1D::bump();
    if (name == "sine") return Profile1D::sine(arg.empty() ? 1 : std::stoi(arg));
    if (name == "ramp") return Profile1D::ramp(arg.empty() ? 0.05 : std::stod(arg));
    if (name == "density") return Profile1D::density(arg.empty() ? 0.05 : std::stod(arg));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown profile '" + s + "'");
}

inline TrigPoly parse_torus_hamiltonian(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of {\"k\": [kp, kq], \"cos\": c, \"sin\": s}");
  TrigPoly H(2);
  for (const auto& t : j) {
    only_keys(t, where, {"k", "cos", "sin"});
    Frequency k;
    double c = 0.0, s = 0.0;
    get(t, "k", k, where);
    get(t, "cos", c, where);
    get(t, "sin", s, where);
    if (k.size() != 2) throw ConfigError(where + ": torus frequencies have two entries");
    H.add_term(k, c, s);
  }
  return H;
}

inline SpherePoly parse_sphere_hamiltonian(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of {\"exp\": [a, b, c], \"coef\": v}");
  SpherePoly H;
  for (const auto& t : j) {
    only_keys(t, where, {"exp", "coef"});
    std::vector<int> e;
    double c = 0.0;
    get(t, "exp", e, where);
    get(t, "coef", c, where);
    if (e.size() != 3 || e[0] < 0 || e[1] < 0 || e[2] < 0) throw ConfigError(where + ": exponents are three nonnegative integers");
    H.add({e[0], e[1], e[2]}, c);
  }
  return H;
}

template <class Fiber, class ParseH>
Connection<Fiber> parse_terms(const Fiber& fiber, const json& terms, ParseH&& parse_h) {
  SeparableField<Fiber> a, b;
  int i = 0;
  for (const auto& t : terms) {
    const std::string where = "connection.terms[" + std::to_string(i++) + "]";
    only_keys(t, where, {"field", "coef", "fx", "fy", "hamiltonian"});
    std::string field = "b";
    get(t, "field", field, where);
    if (field != "a" && field != "b") throw ConfigError(where + ".field: must be \"a\" or \"b\"");
    SeparableTerm<Fiber> term;
    get(t, "coef", term.coef, where);
    if (t.contains("fx"))
      for (const auto& p : t.at("fx")) term.fx.push_back(parse_profile(p, where + ".fx"));
    if (t.contains("fy"))
      for (const auto& p : t.at("fy")) term.fy.push_back(parse_profile(p, where + ".fy"));
    if (!t.contains("hamiltonian")) throw ConfigError(where + ": missing hamiltonian");
    // the fiber mean is removed so the term is a normalized Hamiltonian
    term.H = Fiber::without_mean(parse_h(t.at("hamiltonian"), where + ".hamiltonian"));
    (field == "a" ? a : b).add(std::move(term));
  }
  return Connection<Fiber>(fiber, std::move(a), std::move(b));
}

}  // namespace detail

using AnyConnection = std::variant<Connection<SphereFiber>, Connection<TorusFiber>>;

inline std::pair<ConnectionSpec, AnyConnection> read_connection(const json& j) {
  detail::only_keys(j, "connection", {"fiber", "area", "preset", "smoothing", "terms", "s_values", "fiber_quad",
                                      "extremum_base_samples", "extremum_fiber_samples"});
  ConnectionSpec spec;
  spec.source = j;
  detail::get(j, "fiber", spec.fiber, "connection");
  detail::get(j, "area", spec.area, "connection");
  detail::get(j, "s_values", spec.s_values, "connection");
  detail::get(j, "fiber_quad", spec.fiber_quad, "connection");
  detail::get(j, "extremum_base_samples", spec.extremum_base_samples, "connection");
  detail::get(j, "extremum_fiber_samples", spec.extremum_fiber_samples, "connection");
  if (!(spec.area > 0.0)) throw ConfigError("connection.area: must be positive");
  for (double s : spec.s_values)
    if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("connection.s_values: must lie in [0, 1]");
  if (spec.fiber_quad < 2) throw ConfigError("connection.fiber_quad: too coarse");
  if (spec.extremum_base_samples < 2 || spec.extremum_fiber_samples < 2)
    throw ConfigError("connection: extremum sampling too coarse");
  const bool has_preset = j.contains("preset"), has_terms = j.contains("terms");
  if (has_preset == has_terms) throw ConfigError("connection: give exactly one of 'preset' and 'terms'");
  if (spec.fiber == "sphere") {
    const SphereFiber fiber(spec.area);
    if (has_preset) {
      std::string preset;
      double smoothing = 0.05;
      detail::get(j, "preset", preset, "connection");
      detail::get(j, "smoothing", smoothing, "connection");
      if (preset != "rotation") throw ConfigError("connection.preset: only \"rotation\" is available");
      if (!(smoothing > 0.0 && smoothing < 0.5)) throw ConfigError("connection.smoothing: must lie in (0, 0.5)");
      return {spec, rotation_connection(fiber, smoothing)};
    }
    return {spec, detail::parse_terms(fiber, j.at("terms"), detail::parse_sphere_hamiltonian)};
  }
  if (spec.fiber == "torus") {
    if (has_preset) throw ConfigError("connection.preset: presets exist only for the sphere fiber");
    return {spec, detail::parse_terms(TorusFiber(spec.area), j.at("terms"), detail::parse_torus_hamiltonian)};
  }
  throw ConfigError("connection.fiber: must be \"sphere\" or \"torus\"");
}

// ---- whole file ------------------------------------------------------------------------------

struct FileConfig {
  SuiteConfig suite;
  CollapseExtras collapse_extras;
  std::optional<std::pair<ConnectionSpec, AnyConnection>> connection;
  json raw = json::object();
};

inline FileConfig parse_config(const json& j) {
  FileConfig f;
  f.raw = j;
  detail::only_keys(j, "config", {"seed", "tol_scale", "flat", "hormander", "collapse", "holonomy", "size", "lambda",
                                  "bounds", "duality", "connection"});
  auto& s = f.suite;
  detail::get_seed(j, "seed", s.seed, "config");
  detail::get(j, "tol_scale", s.tol_scale, "config");
  if (j.contains("flat")) read(j.at("flat"), s.flat);
  if (j.contains("hormander")) read(j.at("hormander"), s.hormander);
  if (j.contains("collapse")) read(j.at("collapse"), s.collapse, f.collapse_extras);
  if (j.contains("holonomy")) read(j.at("holonomy"), s.holonomy);
  if (j.contains("size")) read(j.at("size"), s.size);
  if (j.contains("lambda")) read(j.at("lambda"), s.lambda);
  if (j.contains("bounds")) read(j.at("bounds"), s.bounds);
  if (j.contains("duality")) read(j.at("duality"), s.duality);
  if (j.contains("connection")) f.connection = read_connection(j.at("connection"));
  return f;
}

inline FileConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

/// Checks every section against its module preconditions, so no computation starts on bad input.
inline void validate_all(const SuiteConfig& s) {
  try {
    if (!(s.tol_scale > 0.0)) throw std::invalid_argument("tol_scale must be positive");
    s.flat.validate();
    s.hormander.validate();
    s.collapse.validate();
    s.holonomy.validate();
    s.size.validate();
    s.lambda.validate();
    s.bounds.validate();
    s.duality.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

inline json echo(const FileConfig& f) {
  const auto& s = f.suite;
  json j{{"seed", s.seed},
         {"tol_scale", s.tol_scale},
         {"flat", echo(s.flat)},
         {"hormander", echo(s.hormander)},
         {"collapse", echo(s.collapse, f.collapse_extras)},
         {"holonomy", echo(s.holonomy)},
         {"size", echo(s.size)},
         {"lambda", echo(s.lambda)},
         {"bounds", echo(s.bounds)},
         {"duality", echo(s.duality)}};
  if (f.connection) j["connection"] = f.connection->first.source;
  return j;
}

}  // namespace symlab::cli
