#include "shapecalc/cli.hpp"

#include <boost/algorithm/string.hpp>

#include <sstream>

namespace shapecalc::cli {

namespace {

std::vector<std::string> tokens(const std::string& text, const char* seps = " \t,") {
  std::vector<std::string> parts, out;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(seps));
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

double number(const std::string& where, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(where + ": expected a number, got '" + text + "'");
}

int integer(const std::string& where, const std::string& text) {
  const double v = number(where, text);
  if (v != static_cast<int>(v)) throw ConfigError(where + ": expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

geometry::BoundaryLabel label(const std::string& key, const std::string& text) {
  try {
    return geometry::parse_label(text);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected inflow or wall, got '" + text + "'");
  }
}

}  // namespace

geometry::DomainPtr build_domain(const ExperimentConfig& c) {
  try {
    if (c.domain_type == "annulus")
      return geometry::make_annulus(c.inner_radius, c.outer_radius, label("domain.inner_label", c.inner_label),
                                    label("domain.outer_label", c.outer_label));
    geometry::CurvePtr curve;
    if (c.domain_type == "circle")
      curve = std::make_shared<geometry::Circle>(c.center, c.radius);
    else if (c.domain_type == "ellipse")
      curve = std::make_shared<geometry::Ellipse>(c.center, c.semi_a, c.semi_b);
    else if (c.domain_type == "star")
      curve = std::make_shared<geometry::StarCurve>(c.center, c.star_r0, c.star_modes);
    else
      curve = std::make_shared<geometry::PeriodicSpline>(c.spline_points);
    if (!curve->is_simple()) throw ConfigError("domain: the boundary curve intersects itself");
    if (curve->signed_area() <= 0) throw ConfigError("domain: the boundary curve must run counterclockwise");
    std::vector<geometry::BoundaryLabel> labels;
    for (const auto& l : c.labels) labels.push_back(label("domain.labels", l));
    return geometry::make_single_loop(curve, c.breaks, labels);
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
}

namespace {

geometry::BoundaryData build_data(const ExperimentConfig& c, const geometry::DomainPtr& domain) {
  if (static_cast<int>(c.data.size()) != domain->num_loops())
    throw ConfigError("data: expected " + std::to_string(domain->num_loops()) + " loop entries, got " +
                      std::to_string(c.data.size()));
  std::vector<std::vector<geometry::BoundaryData::ArcData>> per_loop;
  for (std::size_t l = 0; l < c.data.size(); ++l) {
    const std::string key = "data.loop" + std::to_string(l);
    std::vector<geometry::BoundaryData::ArcData> arcs;
    for (const auto& arc : tokens(c.data[l], ";")) {
      const auto t = tokens(arc);
      if (t.size() == 2 && t[0] == "const")
        arcs.push_back(geometry::BoundaryData::constant(number(key, t[1])));
      else if (t.size() == 3 && t[0] == "ramp")
        arcs.push_back(geometry::BoundaryData::ramp(number(key, t[1]), number(key, t[2])));
      else
        throw ConfigError(key + ": expected 'const c' or 'ramp from to', got '" + arc + "'");
    }
    if (arcs.size() != domain->loop(static_cast<int>(l)).arcs.size())
      throw ConfigError(key + ": expected " + std::to_string(domain->loop(static_cast<int>(l)).arcs.size()) +
                        " arc entries, got " + std::to_string(arcs.size()));
    per_loop.push_back(std::move(arcs));
  }
  try {
    return geometry::BoundaryData(domain, std::move(per_loop));
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("data: ") + e.what());
  }
}

}  // namespace

Setup build_setup(const ExperimentConfig& c, int level) {
  Setup s;
  s.domain = build_domain(c);
  s.g = build_data(c, s.domain);
  s.mesh = mesh::build_mesh(s.domain, c.h0, level);
  s.disc = std::make_shared<fem::Discretization>(s.mesh, c.degree);
  s.quad = mesh::wall_quadrature(*s.mesh, c.quadrature_order);
  s.flow_case = ops::FlowCase{ops::parse_flow_kind(c.flow), s.g, s.disc, s.quad};
  return s;
}

geometry::WallFunction parse_wall_function(const geometry::DomainPtr& domain, const std::string& spec) {
  std::vector<geometry::WallFunction::Term> terms;
  for (const auto& term : tokens(spec, ";")) {
    const auto star = tokens(term, "*");
    if (star.empty() || star.size() > 2) throw ConfigError("wall function: malformed term '" + term + "'");
    const double scale = star.size() == 2 ? number("wall function '" + term + "'", star[1]) : 1.0;
    const auto t = tokens(star[0]);
    const std::string where = "wall function '" + term + "'";
    auto arg = [&](std::size_t i) { return integer(where, t[i]); };
    try {
      if (t.size() == 1 && t[0] == "zero") continue;
      if (t.size() == 2 && t[0] == "uniform")
        terms.push_back({scale, geometry::uniform_mode(*domain, arg(1))});
      else if (t.size() == 4 && t[0] == "fourier" && (t[3] == "cos" || t[3] == "sin"))
        terms.push_back({scale, geometry::fourier_mode(*domain, arg(1), arg(2), t[3] == "sin")});
      else if (t.size() == 4 && t[0] == "windowed")
        terms.push_back({scale, geometry::windowed_mode(*domain, arg(1), arg(2), arg(3))});
      else if (t.size() == 4 && t[0] == "bump")
        terms.push_back({scale, geometry::bump_mode(*domain, arg(1), number(where, t[2]), number(where, t[3]))});
      else
        throw ConfigError(where + ": unknown form (expected uniform, fourier, windowed, bump or zero)");
    } catch (const GeometryError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return geometry::WallFunction(domain, std::move(terms));
}

fem::WallProfile build_target(const ExperimentConfig& c, const Setup& s, const control::GramSystem& sys) {
  const auto t = tokens(c.target);
  const std::string where = "control.target";
  try {
    if (t.size() == 4 && t[0] == "gaussian")
      return control::gaussian_target(*s.domain, s.quad, integer(where, t[1]), number(where, t[2]), number(where, t[3]));
    if (t.size() == 3 && t[0] == "mode") return control::mode_target(*s.domain, s.quad, integer(where, t[1]), integer(where, t[2]));
    if (t.size() == 2 && t[0] == "column") {
      const int i = integer(where, t[1]);
      if (i < 0 || i >= sys.size()) throw ConfigError(where + ": column index out of range");
      auto p = sys.column(i);
      p.name = "target";
      return p;
    }
  } catch (const GeometryError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": expected 'gaussian L center width', 'mode L k' or 'column i'");
}

}  // namespace shapecalc::cli
