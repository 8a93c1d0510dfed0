#include "shapecalc/mesh.hpp"

#include "mesh_internal.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace shapecalc::mesh {

namespace {

void expect(std::istream& in, const std::string& word) {
  std::string w;
  if (!(in >> w) || w != word) throw MeshError("mesh file: expected '" + word + "', found '" + w + "'");
}

// Closest point on any loop of the domain: (loop, parameter, distance).
struct Projection {
  int loop = -1;
  double u = 0.0;
  double dist = 1e300;
};

Projection project(const geometry::Domain& d, const Vec2& p) {
  Projection best;
  for (int l = 0; l < d.num_loops(); ++l) {
    const auto& c = d.curve(l);
    constexpr int samples = 2048;
    double bu = 0.0, bd = 1e300;
    for (int k = 0; k < samples; ++k) {
      const double u = c.period() * k / samples;
      const double dist = (c.point(u) - p).squaredNorm();
      if (dist < bd) {
        bd = dist;
        bu = u;
      }
    }
    // Newton on f(u) = (gamma(u) - p) . gamma'(u).
    for (int it = 0; it < 50; ++it) {
      const Vec2 r = c.point(bu) - p, g1 = c.d1(bu), g2 = c.d2(bu);
      const double f = r.dot(g1), df = g1.squaredNorm() + r.dot(g2);
      if (df <= 0) break;
      const double step = f / df;
      bu -= step;
      if (std::abs(step) < 1e-15 * c.period()) break;
    }
    bu = c.wrap(bu);
    const double dist = (c.point(bu) - p).norm();
    if (dist < best.dist) best = {l, bu, dist};
  }
  return best;
}

}  // namespace

void write_mesh(const TriMesh& m, std::ostream& out) {
  out << "shapecalc-mesh 1\n";
  out << std::setprecision(17);
  out << "level " << m.level << " h " << m.h << "\n";
  out << "nodes " << m.num_nodes() << " " << m.num_vertices << "\n";
  for (int i = 0; i < m.num_nodes(); ++i) {
    const auto& x = m.nodes[static_cast<std::size_t>(i)];
    const auto& b = m.boundary[static_cast<std::size_t>(i)];
    out << x.x() << " " << x.y() << " " << b.loop << " " << b.u << "\n";
  }
  out << "triangles " << m.num_triangles() << "\n";
  for (const auto& t : m.tris) out << t[0] << " " << t[1] << " " << t[2] << " " << t[3] << " " << t[4] << " " << t[5] << "\n";
  out << "boundary_edges " << m.edges.size() << "\n";
  for (const auto& e : m.edges)
    out << e.nodes[0] << " " << e.nodes[1] << " " << e.nodes[2] << " " << e.loop << " " << e.arc << " "
        << geometry::to_string(e.label) << "\n";
}

TriMeshPtr read_mesh(std::istream& in, const geometry::DomainPtr& domain) {
  if (!domain) throw MeshError("read_mesh: a domain is required to attach boundary curves");
  expect(in, "shapecalc-mesh");
  int version = 0;
  in >> version;
  if (version != 1) throw MeshError("mesh file: unsupported version " + std::to_string(version));
  auto m = std::make_shared<TriMesh>();
  m->domain = domain;
  expect(in, "level");
  in >> m->level;
  expect(in, "h");
  in >> m->h;
  int n = 0;
  expect(in, "nodes");
  in >> n >> m->num_vertices;
  if (!in || n <= 0 || m->num_vertices <= 0 || m->num_vertices > n) throw MeshError("mesh file: bad node header");
  m->nodes.resize(static_cast<std::size_t>(n));
  m->boundary.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& x = m->nodes[static_cast<std::size_t>(i)];
    auto& b = m->boundary[static_cast<std::size_t>(i)];
    in >> x.x() >> x.y() >> b.loop >> b.u;
    if (b.loop >= domain->num_loops()) throw MeshError("mesh file: node " + std::to_string(i) + " refers to a missing loop");
  }
  int nt = 0;
  expect(in, "triangles");
  in >> nt;
  if (!in || nt <= 0) throw MeshError("mesh file: bad triangle header");
  m->tris.resize(static_cast<std::size_t>(nt));
  for (auto& t : m->tris)
    for (auto& v : t) in >> v;
  std::size_t ne = 0;
  expect(in, "boundary_edges");
  in >> ne;
  for (std::size_t i = 0; i < ne; ++i) {
    std::string line_label;
    int a, b, c, loop, arc;
    in >> a >> b >> c >> loop >> arc >> line_label;
  }
  if (!in) throw MeshError("mesh file: truncated");
  rebuild_boundary_edges(*m);
  if (m->edges.size() != ne) throw MeshError("mesh file: boundary edge list does not match topology");
  m->check();
  return m;
}

TriMeshPtr read_gmsh(std::istream& in, const geometry::DomainPtr& domain) {
  if (!domain) throw MeshError("read_gmsh: a domain is required to attach boundary curves");
  std::map<int, Vec2> node_pos;
  std::map<int, geometry::BoundaryLabel> phys_label;
  struct Elem {
    int type;
    int phys;
    std::vector<int> nodes;
  };
  std::vector<Elem> elems;
  std::string section;
  bool have_format = false;
  while (in >> section) {
    if (section == "$MeshFormat") {
      double ver;
      int file_type, data_size;
      in >> ver >> file_type >> data_size;
      if (ver < 2.0 || ver >= 3.0 || file_type != 0) throw MeshError("gmsh: only MSH 2.x ASCII is supported");
      have_format = true;
      expect(in, "$EndMeshFormat");
    } else if (section == "$PhysicalNames") {
      int count;
      in >> count;
      for (int i = 0; i < count; ++i) {
        int dim, tag;
        std::string name;
        in >> dim >> tag >> std::quoted(name);
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (dim == 1 && (name == "inflow" || name == "wall")) phys_label[tag] = geometry::parse_label(name);
      }
      expect(in, "$EndPhysicalNames");
    } else if (section == "$Nodes") {
      int count;
      in >> count;
      for (int i = 0; i < count; ++i) {
        int id;
        double x, y, z;
        in >> id >> x >> y >> z;
        node_pos[id] = Vec2(x, y);
      }
      expect(in, "$EndNodes");
    } else if (section == "$Elements") {
      int count;
      in >> count;
      for (int i = 0; i < count; ++i) {
        int id, type, ntags;
        in >> id >> type >> ntags;
        std::vector<int> tags(static_cast<std::size_t>(std::max(ntags, 0)));
        for (auto& t : tags) in >> t;
        int nn = 0;
        switch (type) {
          case 1: nn = 2; break;
          case 2: nn = 3; break;
          case 8: nn = 3; break;
          case 9: nn = 6; break;
          case 15: nn = 1; break;
          default: throw MeshError("gmsh: unsupported element type " + std::to_string(type));
        }
        Elem e{type, tags.empty() ? 0 : tags[0], std::vector<int>(static_cast<std::size_t>(nn))};
        for (auto& v : e.nodes) in >> v;
        if (type != 15) elems.push_back(std::move(e));
      }
      expect(in, "$EndElements");
    } else if (!section.empty() && section[0] == '$' && section.rfind("$End", 0) != 0) {
      // Skip unknown sections.
      const std::string end = "$End" + section.substr(1);
      std::string w;
      while (in >> w && w != end) {
      }
    }
    if (!in && !in.eof()) throw MeshError("gmsh: parse error in section " + section);
  }
  if (!have_format) throw MeshError("gmsh: missing $MeshFormat");
  if (phys_label.empty()) {
    phys_label[1] = geometry::BoundaryLabel::Inflow;
    phys_label[2] = geometry::BoundaryLabel::Wall;
  }

  // Corner nodes first, then any midpoints.
  std::map<int, int> index;
  std::vector<std::array<int, 6>> tris6;
  std::vector<std::array<int, 3>> tris3;
  bool quadratic = false, linear = false;
  auto pos = [&](int id) -> const Vec2& {
    auto it = node_pos.find(id);
    if (it == node_pos.end()) throw MeshError("gmsh: element references missing node " + std::to_string(id));
    return it->second;
  };
  for (auto& e : elems) {
    if (e.type != 2 && e.type != 9) continue;
    const double area = (pos(e.nodes[1]) - pos(e.nodes[0])).x() * (pos(e.nodes[2]) - pos(e.nodes[0])).y() -
                        (pos(e.nodes[1]) - pos(e.nodes[0])).y() * (pos(e.nodes[2]) - pos(e.nodes[0])).x();
    if (area < 0) {
      std::swap(e.nodes[1], e.nodes[2]);
      if (e.type == 9) {
        std::swap(e.nodes[3], e.nodes[5]);
      }
    }
    (e.type == 9 ? quadratic : linear) = true;
  }
  if (quadratic && linear) throw MeshError("gmsh: mixed linear and quadratic triangles");
  if (!quadratic && !linear) throw MeshError("gmsh: no triangles found");
  auto m = std::make_shared<TriMesh>();
  m->domain = domain;
  auto add = [&](int id) {
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    const int k = static_cast<int>(m->nodes.size());
    m->nodes.push_back(pos(id));
    m->boundary.push_back(BoundaryNode{});
    index[id] = k;
    return k;
  };
  for (const auto& e : elems)
    if (e.type == 2 || e.type == 9) tris3.push_back({add(e.nodes[0]), add(e.nodes[1]), add(e.nodes[2])});
  m->num_vertices = static_cast<int>(m->nodes.size());

  // Tag boundary nodes from line elements and snap them onto the curves.
  std::map<int, geometry::BoundaryLabel> node_label;
  double scale = 0.0;
  for (const auto& x : m->nodes) scale = std::max(scale, x.norm());
  for (const auto& e : elems) {
    if (e.type != 1 && e.type != 8) continue;
    auto lab = phys_label.find(e.phys);
    if (lab == phys_label.end()) throw MeshError("gmsh: line element with unknown physical group " + std::to_string(e.phys));
    for (int id : e.nodes) {
      const int k = e.type == 8 && id == e.nodes[2] ? -1 : index.count(id) ? index[id] : -1;
      if (k < 0) continue;
      const auto pr = project(*domain, m->nodes[static_cast<std::size_t>(k)]);
      if (pr.dist > 1e-6 * std::max(scale, 1.0))
        throw MeshError("gmsh: boundary node " + std::to_string(id) + " is " + std::to_string(pr.dist) +
                        " away from the domain boundary");
      m->boundary[static_cast<std::size_t>(k)] = BoundaryNode{pr.loop, pr.u};
      m->nodes[static_cast<std::size_t>(k)] = domain->curve(pr.loop).point(pr.u);
      node_label[k] = lab->second;
    }
  }

  if (quadratic) {
    std::map<std::pair<int, int>, int> mid_of;
    for (const auto& e : elems) {
      if (e.type != 9) continue;
      const std::array<int, 3> c{index[e.nodes[0]], index[e.nodes[1]], index[e.nodes[2]]};
      std::array<int, 6> t{c[0], c[1], c[2], -1, -1, -1};
      for (int k = 0; k < 3; ++k) {
        const int a = c[static_cast<std::size_t>(k)], b = c[static_cast<std::size_t>((k + 1) % 3)];
        const auto kk = std::minmax(a, b);
        auto it = mid_of.find({kk.first, kk.second});
        if (it == mid_of.end()) {
          const int id = static_cast<int>(m->nodes.size());
          m->nodes.push_back(pos(e.nodes[static_cast<std::size_t>(3 + k)]));
          m->boundary.push_back(BoundaryNode{});
          it = mid_of.emplace(std::make_pair(kk.first, kk.second), id).first;
        }
        t[static_cast<std::size_t>(3 + k)] = it->second;
      }
      tris6.push_back(t);
    }
    m->tris = tris6;
    // Boundary midpoints are re-placed at the curve midpoint parameter.
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : m->tris)
      for (int k = 0; k < 3; ++k) {
        const auto kk = std::minmax(t[static_cast<std::size_t>(k)], t[static_cast<std::size_t>((k + 1) % 3)]);
        ++count[{kk.first, kk.second}];
      }
    for (const auto& t : m->tris)
      for (int k = 0; k < 3; ++k) {
        const int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
        const auto kk = std::minmax(a, b);
        if (count[{kk.first, kk.second}] != 1) continue;
        const auto& ba = m->boundary[static_cast<std::size_t>(a)];
        const auto& bb = m->boundary[static_cast<std::size_t>(b)];
        if (ba.loop < 0 || bb.loop != ba.loop) throw MeshError("gmsh: boundary edge without tagged line element");
        const auto& c = domain->curve(ba.loop);
        const double um = c.wrap(ba.u + 0.5 * c.wrap(bb.u - ba.u));
        const int mid = t[static_cast<std::size_t>(3 + k)];
        m->nodes[static_cast<std::size_t>(mid)] = c.point(um);
        m->boundary[static_cast<std::size_t>(mid)] = BoundaryNode{ba.loop, um};
      }
  } else {
    build_p2(*m, tris3);
  }
  m->h = m->max_edge_length();
  rebuild_boundary_edges(*m);
  for (const auto& e : m->edges) {
    auto a = node_label.find(e.nodes[0]);
    auto b = node_label.find(e.nodes[1]);
    if (a != node_label.end() && b != node_label.end() && a->second == b->second && a->second != e.label)
      throw MeshError("gmsh: physical label of boundary edge (" + std::to_string(e.nodes[0]) + ", " +
                      std::to_string(e.nodes[1]) + ") disagrees with the domain partition");
  }
  m->check();
  return m;
}

void write_quadrature_csv(const WallQuadrature& q, std::ostream& out) {
  out << "index,loop,arc,edge,xi,s,u,x,y,weight,nx,ny,tx,ty,kappa\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < q.points.size(); ++i) {
    const auto& p = q.points[i];
    out << i << ',' << p.loop << ',' << p.arc << ',' << p.edge << ',' << p.xi << ',' << p.s << ',' << p.u << ','
        << p.x.x() << ',' << p.x.y() << ',' << p.weight << ',' << p.n.x() << ',' << p.n.y() << ',' << p.tau.x()
        << ',' << p.tau.y() << ',' << p.kappa << '\n';
  }
}

}  // namespace shapecalc::mesh
