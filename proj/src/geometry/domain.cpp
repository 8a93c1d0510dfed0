#include "shapecalc/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace shapecalc::geometry {

std::string to_string(BoundaryLabel label) { return label == BoundaryLabel::Inflow ? "inflow" : "wall"; }

BoundaryLabel parse_label(const std::string& text) {
  if (text == "inflow" || text == "in") return BoundaryLabel::Inflow;
  if (text == "wall" || text == "w") return BoundaryLabel::Wall;
  throw GeometryError("unknown boundary label '" + text + "' (expected inflow or wall)");
}

Domain::Domain(std::vector<BoundaryLoop> loops) : loops_(std::move(loops)) {
  if (loops_.empty()) throw GeometryError("domain needs at least one boundary loop");
  bool any_inflow = false, any_wall = false;
  for (std::size_t i = 0; i < loops_.size(); ++i) {
    const auto& lp = loops_[i];
    if (!lp.curve) throw GeometryError("boundary loop without curve");
    if (lp.arcs.empty()) throw GeometryError("boundary loop " + std::to_string(i) + " has no arcs");
    double total = 0.0;
    for (const auto& a : lp.arcs) {
      if (!(a.extent > 0)) throw GeometryError("arc with non-positive extent on loop " + std::to_string(i));
      total += a.extent;
      any_inflow |= a.label == BoundaryLabel::Inflow;
      any_wall |= a.label == BoundaryLabel::Wall;
    }
    if (std::abs(total - lp.curve->period()) > 1e-12 * lp.curve->period())
      throw GeometryError("arcs on loop " + std::to_string(i) + " do not cover the parameter range");
    for (std::size_t a = 1; a < lp.arcs.size(); ++a) {
      const double expect = lp.arcs[a - 1].u_begin + lp.arcs[a - 1].extent;
      if (std::abs(lp.curve->wrap(expect) - lp.curve->wrap(lp.arcs[a].u_begin)) > 1e-12 * lp.curve->period())
        throw GeometryError("arcs on loop " + std::to_string(i) + " are not consecutive");
    }
    const double area = lp.curve->signed_area();
    if (i == 0 && !(area > 0)) throw GeometryError("outer boundary must be counterclockwise");
    if (i > 0 && !(area < 0)) throw GeometryError("hole boundaries must be clockwise");
    if (!lp.curve->is_simple()) throw GeometryError("boundary loop " + std::to_string(i) + " self-intersects");
  }
  if (!any_inflow) throw GeometryError("partition has no inflow arc");
  if (!any_wall) throw GeometryError("partition has no wall arc");
}

int Domain::arc_at(int loop_index, double u) const {
  const auto& lp = loop(loop_index);
  const double d = lp.curve->wrap(u - lp.arcs.front().u_begin);
  double acc = 0.0;
  for (std::size_t a = 0; a < lp.arcs.size(); ++a) {
    acc += lp.arcs[a].extent;
    if (d < acc) return static_cast<int>(a);
  }
  return static_cast<int>(lp.arcs.size()) - 1;
}

BoundaryLabel Domain::label_at(int loop_index, double u) const {
  return loop(loop_index).arcs[static_cast<std::size_t>(arc_at(loop_index, u))].label;
}

double Domain::offset_in_arc(int loop_index, int arc, double u) const {
  const auto& lp = loop(loop_index);
  return lp.curve->wrap(u - lp.arcs.at(static_cast<std::size_t>(arc)).u_begin);
}

bool Domain::is_full_wall_loop(int loop_index) const {
  const auto& lp = loop(loop_index);
  for (const auto& a : lp.arcs)
    if (a.label != BoundaryLabel::Wall) return false;
  return true;
}

bool Domain::has_label(BoundaryLabel label) const {
  for (const auto& lp : loops_)
    for (const auto& a : lp.arcs)
      if (a.label == label) return true;
  return false;
}

double Domain::arc_start_arclength(int loop_index, int arc) const {
  const auto& lp = loop(loop_index);
  return lp.curve->arclength(lp.arcs.at(static_cast<std::size_t>(arc)).u_begin);
}

double Domain::arc_length(int loop_index, int arc) const {
  const auto& lp = loop(loop_index);
  const auto& a = lp.arcs.at(static_cast<std::size_t>(arc));
  if (lp.arcs.size() == 1) return lp.curve->length();
  double len = lp.curve->arclength(a.u_begin + a.extent) - lp.curve->arclength(a.u_begin);
  if (len <= 0) len += lp.curve->length();
  return len;
}

double Domain::wall_length() const {
  double total = 0.0;
  for (int l = 0; l < num_loops(); ++l)
    for (int a = 0; a < static_cast<int>(loop(l).arcs.size()); ++a)
      if (loop(l).arcs[static_cast<std::size_t>(a)].label == BoundaryLabel::Wall) total += arc_length(l, a);
  return total;
}

DomainPtr make_annulus(double inner_radius, double outer_radius, BoundaryLabel inner, BoundaryLabel outer) {
  if (!(inner_radius > 0 && outer_radius > inner_radius))
    throw GeometryError("annulus radii must satisfy 0 < r1 < r2");
  auto outer_curve = std::make_shared<Circle>(Vec2::Zero(), outer_radius, true);
  auto inner_curve = std::make_shared<Circle>(Vec2::Zero(), inner_radius, false);
  std::vector<BoundaryLoop> loops;
  loops.push_back({outer_curve, {Arc{0.0, outer_curve->period(), outer}}});
  loops.push_back({inner_curve, {Arc{0.0, inner_curve->period(), inner}}});
  return std::make_shared<Domain>(std::move(loops));
}

DomainPtr make_single_loop(CurvePtr curve, const std::vector<double>& breaks,
                           const std::vector<BoundaryLabel>& labels) {
  if (breaks.empty() || breaks.size() != labels.size())
    throw GeometryError("arc breaks and labels must be nonempty and of equal length");
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (breaks[i] < 0.0 || breaks[i] >= 1.0) throw GeometryError("arc breaks must lie in [0, 1)");
    if (i > 0 && !(breaks[i] > breaks[i - 1])) throw GeometryError("arc breaks must be increasing");
  }
  const double P = curve->period();
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    const double next = i + 1 < breaks.size() ? breaks[i + 1] : breaks.front() + 1.0;
    arcs.push_back(Arc{breaks[i] * P, (next - breaks[i]) * P, labels[i]});
  }
  std::vector<BoundaryLoop> loops;
  loops.push_back({std::move(curve), std::move(arcs)});
  return std::make_shared<Domain>(std::move(loops));
}

// --- BoundaryData ------------------------------------------------------------

BoundaryData::BoundaryData(DomainPtr domain, std::vector<std::vector<ArcData>> per_loop)
    : domain_(std::move(domain)), arcs_(std::move(per_loop)) {
  validate();
}

BoundaryData BoundaryData::uniform(DomainPtr domain, double value) {
  std::vector<std::vector<ArcData>> per_loop;
  for (int l = 0; l < domain->num_loops(); ++l)
    per_loop.emplace_back(domain->loop(l).arcs.size(), constant(value));
  return BoundaryData(std::move(domain), std::move(per_loop));
}

BoundaryData::ArcData BoundaryData::constant(double c) {
  ArcData d;
  d.kind = ArcData::Kind::Constant;
  d.a = c;
  return d;
}

BoundaryData::ArcData BoundaryData::ramp(double from, double to) {
  ArcData d;
  d.kind = ArcData::Kind::Ramp;
  d.a = from;
  d.b = to;
  return d;
}

BoundaryData::ArcData BoundaryData::function(std::function<double(double)> fn) {
  ArcData d;
  d.kind = ArcData::Kind::Function;
  d.fn = std::move(fn);
  return d;
}

void BoundaryData::validate() const {
  if (!domain_) throw GeometryError("boundary data without domain");
  if (static_cast<int>(arcs_.size()) != domain_->num_loops())
    throw GeometryError("boundary data must list every loop");
  for (int l = 0; l < domain_->num_loops(); ++l) {
    const auto& lp = domain_->loop(l);
    if (arcs_[static_cast<std::size_t>(l)].size() != lp.arcs.size())
      throw GeometryError("boundary data must list every arc of loop " + std::to_string(l));
    for (std::size_t a = 0; a < lp.arcs.size(); ++a) {
      const auto& d = arcs_[static_cast<std::size_t>(l)][a];
      if (lp.arcs[a].label == BoundaryLabel::Wall && d.kind != ArcData::Kind::Constant)
        throw GeometryError("wall data must be constant on each wall arc (loop " + std::to_string(l) +
                            ", arc " + std::to_string(a) + ")");
      if (d.kind == ArcData::Kind::Function && !d.fn) throw GeometryError("empty boundary data function");
    }
  }
}

double BoundaryData::value(int loop, double u) const {
  const int a = domain_->arc_at(loop, u);
  const auto& d = arcs_[static_cast<std::size_t>(loop)][static_cast<std::size_t>(a)];
  switch (d.kind) {
    case ArcData::Kind::Constant:
      return scale_ * d.a;
    case ArcData::Kind::Ramp: {
      const double ext = domain_->loop(loop).arcs[static_cast<std::size_t>(a)].extent;
      const double x = std::clamp(domain_->offset_in_arc(loop, a, u) / ext, 0.0, 1.0);
      const double s = x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
      return scale_ * (d.a + (d.b - d.a) * s);
    }
    case ArcData::Kind::Function:
      return scale_ * d.fn(u);
  }
  return 0.0;
}

BoundaryData BoundaryData::scaled(double factor) const {
  BoundaryData out = *this;
  out.scale_ *= factor;
  return out;
}

}  // namespace shapecalc::geometry
