#include "shapecalc/cli.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace shapecalc::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  boost::algorithm::trim(s);
  return s;
}

std::vector<std::string> split(const std::string& text, const std::string& seps) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(seps));
  std::vector<std::string> out;
  for (auto& p : parts)
    if (auto t = trim(p); !t.empty()) out.push_back(t);
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
}

int to_int(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
}

bool to_bool(const std::string& key, const std::string& text) {
  const auto t = boost::algorithm::to_lower_copy(text);
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split(text, ", \t")) out.push_back(to_double(key, p));
  return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& p : split(text, ", \t")) out.push_back(to_int(key, p));
  return out;
}

Vec2 to_vec2(const std::string& key, const std::string& text) {
  const auto v = to_doubles(key, text);
  if (v.size() != 2) throw ConfigError(key + ": expected two numbers");
  return {v[0], v[1]};
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"domain",
       {"type", "inner_radius", "outer_radius", "inner_label", "outer_label", "center", "radius", "a", "b", "r0",
        "modes", "points", "breaks", "labels"}},
      {"data", {}},  // loop0, loop1, ...
      {"flow", {"kind", "degree"}},
      {"mesh", {"h0", "level", "quadrature_order"}},
      {"basis", {"kind", "size", "bump_width"}},
      {"verify", {"fields", "multipliers", "t_list", "fd_step", "probe_level", "obstruction_threshold"}},
      {"control", {"n_list", "alpha_list", "target", "project_kernel"}},
      {"output", {"dir"}},
  };
  return keys;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    auto it = keys.find(section);
    if (it == keys.end() || body.data().size() > 0) throw ConfigError("config: unknown section or key '" + section + "'");
    for (const auto& kv : body) {
      const bool ok = section == "data" ? kv.first.rfind("loop", 0) == 0 : it->second.count(kv.first) > 0;
      if (!ok) throw ConfigError("config: unknown key '" + section + "." + kv.first + "'");
    }
  }

  ExperimentConfig c;
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return trim(*v);
    return std::nullopt;
  };
  auto set_double = [&](const std::string& key, double& dst) {
    if (auto v = get(key)) dst = to_double(key, *v);
  };
  auto set_int = [&](const std::string& key, int& dst) {
    if (auto v = get(key)) dst = to_int(key, *v);
  };
  auto set_string = [&](const std::string& key, std::string& dst) {
    if (auto v = get(key)) dst = *v;
  };

  set_string("domain.type", c.domain_type);
  set_double("domain.inner_radius", c.inner_radius);
  set_double("domain.outer_radius", c.outer_radius);
  set_string("domain.inner_label", c.inner_label);
  set_string("domain.outer_label", c.outer_label);
  if (auto v = get("domain.center")) c.center = to_vec2("domain.center", *v);
  set_double("domain.radius", c.radius);
  set_double("domain.a", c.semi_a);
  set_double("domain.b", c.semi_b);
  set_double("domain.r0", c.star_r0);
  if (auto v = get("domain.modes")) {
    c.star_modes.clear();
    for (const auto& m : split(*v, ";")) {
      const auto p = split(m, ", \t");
      if (p.size() != 3) throw ConfigError("domain.modes: each mode is 'k a b', got '" + m + "'");
      c.star_modes.push_back({to_int("domain.modes", p[0]), to_double("domain.modes", p[1]), to_double("domain.modes", p[2])});
    }
  }
  if (auto v = get("domain.points")) {
    c.spline_points.clear();
    for (const auto& p : split(*v, ";")) c.spline_points.push_back(to_vec2("domain.points", p));
  }
  if (auto v = get("domain.breaks")) c.breaks = to_doubles("domain.breaks", *v);
  if (auto v = get("domain.labels")) c.labels = split(*v, ", \t");

  if (auto d = tree.get_child_optional("data")) {
    std::map<int, std::string> loops;
    for (const auto& kv : *d) loops[to_int("data." + kv.first, kv.first.substr(4))] = trim(kv.second.data());
    c.data.clear();
    for (const auto& [i, text] : loops) {
      if (i != static_cast<int>(c.data.size())) throw ConfigError("data: loops must be numbered loop0, loop1, ... without gaps");
      c.data.push_back(text);
    }
  }

  set_string("flow.kind", c.flow);
  set_int("flow.degree", c.degree);
  set_double("mesh.h0", c.h0);
  set_int("mesh.level", c.level);
  set_int("mesh.quadrature_order", c.quadrature_order);
  set_string("basis.kind", c.basis);
  set_int("basis.size", c.basis_size);
  set_double("basis.bump_width", c.bump_width);
  if (auto v = get("verify.fields")) c.fields = split(*v, "|");
  if (auto v = get("verify.multipliers")) c.multipliers = split(*v, "|");
  if (auto v = get("verify.t_list")) c.t_list = to_doubles("verify.t_list", *v);
  set_double("verify.fd_step", c.fd_step);
  set_int("verify.probe_level", c.probe_level);
  set_double("verify.obstruction_threshold", c.obstruction_threshold);
  if (auto v = get("control.n_list")) c.n_list = to_ints("control.n_list", *v);
  if (auto v = get("control.alpha_list")) c.alpha_list = to_doubles("control.alpha_list", *v);
  set_string("control.target", c.target);
  if (auto v = get("control.project_kernel")) c.project_kernel = to_bool("control.project_kernel", *v);
  set_string("output.dir", c.output_dir);

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  static const std::set<std::string> types{"annulus", "circle", "ellipse", "star", "spline"};
  require(types.count(c.domain_type) > 0, "domain.type: expected annulus, circle, ellipse, star or spline");
  require(c.inner_radius > 0 && c.outer_radius > c.inner_radius, "domain.inner_radius/outer_radius: need 0 < inner < outer");
  require(c.radius > 0, "domain.radius: must be positive");
  require(c.semi_a > 0 && c.semi_b > 0, "domain.a/b: must be positive");
  require(c.star_r0 > 0, "domain.r0: must be positive");
  if (c.domain_type == "spline") require(c.spline_points.size() >= 4, "domain.points: a spline needs at least 4 points");
  if (c.domain_type != "annulus") {
    require(!c.breaks.empty() && c.breaks.size() == c.labels.size(), "domain.breaks/labels: need one label per break");
    for (std::size_t i = 0; i < c.breaks.size(); ++i) {
      require(c.breaks[i] >= 0 && c.breaks[i] < 1, "domain.breaks: values must lie in [0, 1)");
      require(i == 0 || c.breaks[i] > c.breaks[i - 1], "domain.breaks: values must increase");
    }
  }
  require(c.flow == "potential" || c.flow == "stokes", "flow.kind: expected potential or stokes");
  require(c.degree == 2 || c.degree == 3, "flow.degree: expected 2 or 3");
  require(c.h0 > 0 && c.h0 <= 1, "mesh.h0: expected 0 < h0 <= 1");
  require(c.level >= 0 && c.level <= 5, "mesh.level: expected 0..5");
  require(c.quadrature_order >= 2 && c.quadrature_order <= 6, "mesh.quadrature_order: expected 2..6");
  require(c.basis == "fourier" || c.basis == "bump", "basis.kind: expected fourier or bump");
  require(c.basis_size >= 1 && c.basis_size <= 256, "basis.size: expected 1..256");
  require(c.bump_width > 0 && c.bump_width < 1, "basis.bump_width: expected a fraction in (0, 1)");
  require(!c.fields.empty(), "verify.fields: the deformation basis for verification is empty");
  require(!c.multipliers.empty(), "verify.multipliers: at least one multiplier is required");
  require(c.t_list.size() >= 2, "verify.t_list: need at least two step sizes");
  for (std::size_t i = 0; i < c.t_list.size(); ++i) {
    require(c.t_list[i] > 0 && c.t_list[i] <= 0.5, "verify.t_list: steps must lie in (0, 0.5]");
    require(i == 0 || c.t_list[i] < c.t_list[i - 1], "verify.t_list: steps must be strictly decreasing");
  }
  require(c.fd_step > 0 && c.fd_step <= 0.5, "verify.fd_step: expected (0, 0.5]");
  require(c.probe_level >= 0 && c.probe_level <= 5, "verify.probe_level: expected 0..5");
  require(c.obstruction_threshold > 0 && c.obstruction_threshold < 1, "verify.obstruction_threshold: expected (0, 1)");
  require(!c.n_list.empty(), "control.n_list: empty");
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    require(c.n_list[i] >= 1 && c.n_list[i] <= c.basis_size, "control.n_list: entries must lie in 1..basis.size");
    require(i == 0 || c.n_list[i] > c.n_list[i - 1], "control.n_list: entries must increase");
  }
  require(!c.alpha_list.empty(), "control.alpha_list: empty");
  for (double a : c.alpha_list) require(a >= 0 && a <= 1, "control.alpha_list: entries must lie in [0, 1]");
  require(!c.target.empty(), "control.target: empty");
  require(!c.output_dir.empty(), "output.dir: empty");
  require(c.threads >= 1 && c.threads <= 256, "--threads: expected 1..256");
}

std::string config_reference() {
  return R"([domain]
# annulus | circle | ellipse | star | spline
type = annulus
# annulus
inner_radius = 1
# annulus
outer_radius = 2
# annulus, inflow | wall
inner_label = inflow
# annulus, inflow | wall
outer_label = wall
# circle, ellipse, star
center = 0 0
# circle
radius = 1
# ellipse semi-axis along x
a = 2
# ellipse semi-axis along y
b = 1
# star: r(phi) = r0 + sum a_k cos k phi + b_k sin k phi
r0 = 1
# star, "k a b" per mode
modes = 2 0.1 0; 3 0 0.05
# spline control points, counterclockwise
points = 1 0; 0 1; -1 0; 0 -1
# single loop: arc starts as fractions of the parameter range
breaks = 0
# single loop: one label per break
labels = wall

[data]
# arcs of loop 0 in order: "const c" or "ramp from to"
loop0 = const 1
# wall arcs must be constant
loop1 = const 0

[flow]
# potential | stokes
kind = potential
# Lagrange degree, 2 or 3
degree = 3

[mesh]
# target edge length of the coarse mesh
h0 = 0.25
# uniform refinements, 0..5
level = 2
# Gauss points per wall edge, 2..6
quadrature_order = 4

[basis]
# fourier | bump
kind = fourier
size = 16
# fraction of the wall component length
bump_width = 0.2

[verify]
fields = uniform 0 | bump 0 3.0 2.0 * 0.5 | fourier 0 3 cos * 0.3
multipliers = uniform 0 | fourier 0 2 cos; fourier 0 1 sin * 0.5
t_list = 0.1 0.05 0.025 0.0125
fd_step = 0.01
# mesh level of the Stokes obstruction probe
probe_level = 1
obstruction_threshold = 1e-6

[control]
n_list = 1 2 4 8 12 16
alpha_list = 1e-4 1e-8 1e-12
# gaussian L center width | mode L k | column i
target = gaussian 0 2.0 1.0
# Stokes: also fit after removing obstruction candidates
project_kernel = true

[output]
dir = out

# Comment lines start with #. Wall functions (fields, multipliers): terms joined by ';', each one of
#   uniform L | fourier L k cos|sin | windowed L arc k | bump L center width | zero
# optionally followed by '* scale'. Lists of wall functions are separated by '|'.
)";
}

}  // namespace shapecalc::cli
