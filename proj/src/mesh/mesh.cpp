#include "shapecalc/mesh.hpp"

#include "../common/p2.hpp"
#include "delaunay.hpp"
#include "mesh_internal.hpp"
#include "shapecalc/quadrature_rules.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace shapecalc::mesh {

namespace {

using geometry::Curve;
using geometry::Domain;

using EdgeKey = std::pair<int, int>;
EdgeKey key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

const std::array<Vec2, 6> kRefNodes = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(0.5, 0), Vec2(0.5, 0.5), Vec2(0, 0.5)};

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Even-odd test against a set of closed polygons.
bool inside(const Vec2& p, const std::vector<std::vector<Vec2>>& polys) {
  bool in = false;
  for (const auto& poly : polys) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[j];
      if ((a.y() > p.y()) != (b.y() > p.y())) {
        const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
        if (p.x() < x) in = !in;
      }
    }
  }
  return in;
}

// Deterministic jitter in [-1, 1] from an integer lattice index.
double hash_unit(long long i, long long j, int salt) {
  unsigned long long x = static_cast<unsigned long long>(i) * 0x9E3779B97F4A7C15ULL ^
                         static_cast<unsigned long long>(j) * 0xC2B2AE3D27D4EB4FULL ^
                         static_cast<unsigned long long>(salt) * 0x165667B19E3779F9ULL;
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  return static_cast<double>(x >> 11) / static_cast<double>(1ULL << 53) * 2.0 - 1.0;
}

// Unwrapped parameter samples of every loop, starting at its first arc.
std::vector<std::vector<double>> sample_boundary(const Domain& d, double h) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(d.num_loops()));
  for (int l = 0; l < d.num_loops(); ++l) {
    const auto& lp = d.loop(l);
    const Curve& c = *lp.curve;
    double u = lp.arcs.front().u_begin;
    for (int a = 0; a < static_cast<int>(lp.arcs.size()); ++a) {
      const double len = d.arc_length(l, a);
      const int n = std::max(lp.arcs.size() == 1 ? 3 : 2, static_cast<int>(std::ceil(len / h - 1e-9)));
      const double s0 = c.arclength(u);
      out[static_cast<std::size_t>(l)].push_back(u);
      for (int k = 1; k < n; ++k) {
        double uk = c.param_at_arclength(s0 + len * k / n);
        while (uk < u) uk += c.period();
        out[static_cast<std::size_t>(l)].push_back(uk);
      }
      u += lp.arcs[static_cast<std::size_t>(a)].extent;
    }
  }
  return out;
}

}  // namespace

// Assigns edge midpoints and boundary-edge records to a corner-only mesh.
void build_p2(TriMesh& m, const std::vector<std::array<int, 3>>& corners) {
  const Domain& d = *m.domain;
  std::map<EdgeKey, int> mids;
  m.tris.clear();
  for (const auto& c : corners) {
    std::array<int, 6> t{c[0], c[1], c[2], -1, -1, -1};
    for (int e = 0; e < 3; ++e) {
      const auto en = p2::edge_nodes(e);
      const int a = c[static_cast<std::size_t>(en[0])], b = c[static_cast<std::size_t>(en[1])];
      auto it = mids.find(key(a, b));
      if (it == mids.end()) {
        const int id = static_cast<int>(m.nodes.size());
        m.nodes.push_back(0.5 * (m.nodes[static_cast<std::size_t>(a)] + m.nodes[static_cast<std::size_t>(b)]));
        m.boundary.push_back(BoundaryNode{});
        it = mids.emplace(key(a, b), id).first;
      }
      t[static_cast<std::size_t>(en[2])] = it->second;
    }
    m.tris.push_back(t);
  }
  // Midpoints of boundary edges are moved onto the curve.
  std::map<EdgeKey, int> count;
  for (const auto& t : m.tris)
    for (int e = 0; e < 3; ++e) {
      const auto en = p2::edge_nodes(e);
      ++count[key(t[static_cast<std::size_t>(en[0])], t[static_cast<std::size_t>(en[1])])];
    }
  for (const auto& t : m.tris) {
    for (int e = 0; e < 3; ++e) {
      const auto en = p2::edge_nodes(e);
      const int a = t[static_cast<std::size_t>(en[0])], b = t[static_cast<std::size_t>(en[1])];
      if (count[key(a, b)] != 1) continue;
      const auto& ba = m.boundary[static_cast<std::size_t>(a)];
      const auto& bb = m.boundary[static_cast<std::size_t>(b)];
      if (ba.loop < 0 || bb.loop < 0 || ba.loop != bb.loop)
        throw MeshError("boundary edge between nodes " + std::to_string(a) + " and " + std::to_string(b) +
                        " does not lie on a single boundary loop");
      const Curve& c = d.curve(ba.loop);
      const double du = c.wrap(bb.u - ba.u);
      const int mid = t[static_cast<std::size_t>(en[2])];
      const double um = c.wrap(ba.u + 0.5 * du);
      m.nodes[static_cast<std::size_t>(mid)] = c.point(um);
      m.boundary[static_cast<std::size_t>(mid)] = BoundaryNode{ba.loop, um};
    }
  }
}

// Rebuilds the ordered boundary-edge list from topology and node tags.
void rebuild_boundary_edges(TriMesh& m) {
  const Domain& d = *m.domain;
  std::map<EdgeKey, int> count;
  for (const auto& t : m.tris)
    for (int e = 0; e < 3; ++e) {
      const auto en = p2::edge_nodes(e);
      ++count[key(t[static_cast<std::size_t>(en[0])], t[static_cast<std::size_t>(en[1])])];
    }
  m.edges.clear();
  for (int ti = 0; ti < m.num_triangles(); ++ti) {
    const auto& t = m.tris[static_cast<std::size_t>(ti)];
    for (int e = 0; e < 3; ++e) {
      const auto en = p2::edge_nodes(e);
      const int a = t[static_cast<std::size_t>(en[0])], b = t[static_cast<std::size_t>(en[1])];
      const int c = count[key(a, b)];
      if (c > 2) throw MeshError("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") shared by more than two triangles");
      if (c != 1) continue;
      const auto& ba = m.boundary[static_cast<std::size_t>(a)];
      const auto& bb = m.boundary[static_cast<std::size_t>(b)];
      if (ba.loop < 0 || bb.loop != ba.loop)
        throw MeshError("boundary edge (" + std::to_string(a) + ", " + std::to_string(b) + ") has untagged nodes");
      const Curve& cv = d.curve(ba.loop);
      const double du = cv.wrap(bb.u - ba.u);
      if (!(du > 0) || du > 0.5 * cv.period())
        throw MeshError("boundary edge (" + std::to_string(a) + ", " + std::to_string(b) +
                        ") runs against the loop orientation");
      BoundaryEdge be;
      be.tri = ti;
      be.local = e;
      be.nodes = {a, b, t[static_cast<std::size_t>(en[2])]};
      be.loop = ba.loop;
      be.u0 = ba.u;
      be.u1 = ba.u + du;
      be.arc = d.arc_at(ba.loop, ba.u + 0.5 * du);
      be.label = d.loop(ba.loop).arcs[static_cast<std::size_t>(be.arc)].label;
      m.edges.push_back(be);
    }
  }
  std::sort(m.edges.begin(), m.edges.end(), [&](const BoundaryEdge& x, const BoundaryEdge& y) {
    if (x.loop != y.loop) return x.loop < y.loop;
    const Curve& cv = d.curve(x.loop);
    const double start = d.loop(x.loop).arcs.front().u_begin;
    return cv.wrap(x.u0 - start) < cv.wrap(y.u0 - start);
  });
  m.cubic_offsets.clear();
  for (const auto& e : m.edges) {
    const Curve& cv = d.curve(e.loop);
    std::array<Vec2, 2> off;
    for (int j = 0; j < 2; ++j) {
      const double s = (j + 1) / 3.0;
      const Vec2 quad = (1 - s) * (1 - 2 * s) * m.nodes[static_cast<std::size_t>(e.nodes[0])] +
                        s * (2 * s - 1) * m.nodes[static_cast<std::size_t>(e.nodes[1])] +
                        4 * s * (1 - s) * m.nodes[static_cast<std::size_t>(e.nodes[2])];
      off[static_cast<std::size_t>(j)] = cv.point(e.u0 + s * (e.u1 - e.u0)) - quad;
    }
    m.cubic_offsets.push_back(off);
  }
}

Vec2 TriMesh::map(int t, double xi, double eta) const {
  const auto N = p2::shape(xi, eta);
  const auto& tr = tris[static_cast<std::size_t>(t)];
  Vec2 x = Vec2::Zero();
  for (int i = 0; i < 6; ++i) x += N[static_cast<std::size_t>(i)] * nodes[static_cast<std::size_t>(tr[static_cast<std::size_t>(i)])];
  return x;
}

Mat2 TriMesh::jacobian(int t, double xi, double eta) const {
  const auto G = p2::grad(xi, eta);
  const auto& tr = tris[static_cast<std::size_t>(t)];
  Mat2 J = Mat2::Zero();
  for (int i = 0; i < 6; ++i) J += nodes[static_cast<std::size_t>(tr[static_cast<std::size_t>(i)])] * G.row(i);
  return J;
}

double TriMesh::corner_area(int t) const {
  const auto& tr = tris[static_cast<std::size_t>(t)];
  return 0.5 * orient(nodes[static_cast<std::size_t>(tr[0])], nodes[static_cast<std::size_t>(tr[1])],
                      nodes[static_cast<std::size_t>(tr[2])]);
}

double TriMesh::min_jacobian(int t) const {
  double m = std::min({jacobian(t, 0, 0).determinant(), jacobian(t, 1, 0).determinant(),
                       jacobian(t, 0, 1).determinant()});
  for (const auto& q : quad::triangle_rule()) m = std::min(m, jacobian(t, q.xi, q.eta).determinant());
  return m;
}

double TriMesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& t : tris)
    for (int e = 0; e < 3; ++e)
      m = std::max(m, (nodes[static_cast<std::size_t>(t[static_cast<std::size_t>(e)])] -
                       nodes[static_cast<std::size_t>(t[static_cast<std::size_t>((e + 1) % 3)])])
                          .norm());
  return m;
}

double TriMesh::min_edge_length() const {
  double m = 1e300;
  for (const auto& t : tris)
    for (int e = 0; e < 3; ++e)
      m = std::min(m, (nodes[static_cast<std::size_t>(t[static_cast<std::size_t>(e)])] -
                       nodes[static_cast<std::size_t>(t[static_cast<std::size_t>((e + 1) % 3)])])
                          .norm());
  return m;
}

void TriMesh::check() const {
  if (boundary.size() != nodes.size()) throw MeshError("boundary tag count does not match node count");
  if (!cubic_offsets.empty() && cubic_offsets.size() != edges.size())
    throw MeshError("cubic edge offsets do not match the boundary edge list");
  std::map<EdgeKey, int> count;
  for (int ti = 0; ti < num_triangles(); ++ti) {
    const auto& t = tris[static_cast<std::size_t>(ti)];
    for (int i = 0; i < 6; ++i)
      if (t[static_cast<std::size_t>(i)] < 0 || t[static_cast<std::size_t>(i)] >= num_nodes())
        throw MeshError("triangle " + std::to_string(ti) + " references a missing node");
    if (!(corner_area(ti) > 0) || !(min_jacobian(ti) > 0))
      throw MeshError("triangle " + std::to_string(ti) + " is inverted or degenerate");
    for (int e = 0; e < 3; ++e) {
      const auto en = p2::edge_nodes(e);
      const int c = ++count[key(t[static_cast<std::size_t>(en[0])], t[static_cast<std::size_t>(en[1])])];
      if (c > 2) throw MeshError("edge shared by more than two triangles in triangle " + std::to_string(ti));
    }
  }
  for (const auto& e : edges)
    if (count[key(e.nodes[0], e.nodes[1])] != 1) throw MeshError("tagged boundary edge is shared by two triangles");
  std::size_t free_edges = 0;
  for (const auto& [k, c] : count) free_edges += c == 1 ? 1 : 0;
  if (free_edges != edges.size()) throw MeshError("untagged boundary edges present");
  // Tags are monotone and contiguous along every loop.
  std::size_t first = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i > 0 && edges[i].loop != edges[i - 1].loop) first = i;
    const auto& e = edges[i];
    const auto& next = (i + 1 < edges.size() && edges[i + 1].loop == e.loop) ? edges[i + 1] : edges[first];
    const Curve& c = domain->curve(e.loop);
    const double gap = c.wrap(next.u0 - e.u1);
    if (std::min(gap, c.period() - gap) > 1e-12 * c.period())
      throw MeshError("boundary edges on loop " + std::to_string(e.loop) + " are not contiguous");
  }
}

TriMeshPtr generate_mesh(const geometry::DomainPtr& domain, double h) {
  if (!(h > 0)) throw MeshError("target mesh size must be positive");
  const Domain& d = *domain;
  auto params = sample_boundary(d, h);

  std::vector<Vec2> pts;
  std::vector<BoundaryNode> tags;
  std::vector<std::array<int, 3>> tris;
  for (int pass = 0;; ++pass) {
    if (pass > 40) throw MeshError("boundary recovery did not converge; the curve may be degenerate");
    pts.clear();
    tags.clear();
    std::vector<std::vector<Vec2>> polys;
    std::vector<std::vector<int>> loop_ids;
    for (int l = 0; l < d.num_loops(); ++l) {
      const Curve& c = d.curve(l);
      polys.emplace_back();
      loop_ids.emplace_back();
      for (double u : params[static_cast<std::size_t>(l)]) {
        loop_ids.back().push_back(static_cast<int>(pts.size()));
        pts.push_back(c.point(u));
        polys.back().push_back(pts.back());
        tags.push_back(BoundaryNode{l, c.wrap(u)});
      }
    }
    Vec2 lo = polys.front().front(), hi = lo;
    for (const auto& p : polys.front()) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double dy = h * std::sqrt(3.0) / 2.0;
    const long long ny = static_cast<long long>(std::ceil((hi.y() - lo.y()) / dy));
    const long long nx = static_cast<long long>(std::ceil((hi.x() - lo.x()) / h));
    for (long long j = 0; j <= ny; ++j) {
      for (long long i = 0; i <= nx; ++i) {
        Vec2 p(lo.x() + (i + (j % 2 ? 0.5 : 0.0)) * h, lo.y() + j * dy);
        p += 1e-3 * h * Vec2(hash_unit(i, j, 1), hash_unit(i, j, 2));
        if (!inside(p, polys)) continue;
        double dist = 1e300;
        for (const auto& poly : polys)
          for (std::size_t k = 0; k < poly.size(); ++k)
            dist = std::min(dist, segment_distance(p, poly[k], poly[(k + 1) % poly.size()]));
        if (dist < 0.6 * h) continue;
        pts.push_back(p);
        tags.push_back(BoundaryNode{});
      }
    }
    tris = detail::delaunay(pts);

    std::set<EdgeKey> present;
    for (const auto& t : tris)
      for (int e = 0; e < 3; ++e) present.insert(key(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)]));
    bool recovered = true;
    for (int l = 0; l < d.num_loops(); ++l) {
      const auto& ids = loop_ids[static_cast<std::size_t>(l)];
      auto& us = params[static_cast<std::size_t>(l)];
      std::vector<double> refined;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        refined.push_back(us[k]);
        if (!present.count(key(ids[k], ids[(k + 1) % ids.size()]))) {
          const double next = k + 1 < us.size() ? us[k + 1] : us.front() + d.curve(l).period();
          refined.push_back(0.5 * (us[k] + next));
          recovered = false;
        }
      }
      us = std::move(refined);
    }
    if (recovered) {
      std::vector<std::vector<Vec2>> check_polys = polys;
      std::vector<std::array<int, 3>> kept;
      for (const auto& t : tris) {
        const Vec2 c = (pts[static_cast<std::size_t>(t[0])] + pts[static_cast<std::size_t>(t[1])] +
                        pts[static_cast<std::size_t>(t[2])]) / 3.0;
        if (inside(c, check_polys)) kept.push_back(t);
      }
      tris = std::move(kept);
      break;
    }
  }

  // Laplacian smoothing of interior vertices, rejecting moves that invert.
  std::vector<std::vector<int>> nbrs(pts.size());
  std::vector<std::vector<int>> vtris(pts.size());
  for (std::size_t ti = 0; ti < tris.size(); ++ti) {
    const auto& t = tris[ti];
    for (int e = 0; e < 3; ++e) {
      nbrs[static_cast<std::size_t>(t[static_cast<std::size_t>(e)])].push_back(t[static_cast<std::size_t>((e + 1) % 3)]);
      nbrs[static_cast<std::size_t>(t[static_cast<std::size_t>((e + 1) % 3)])].push_back(t[static_cast<std::size_t>(e)]);
      vtris[static_cast<std::size_t>(t[static_cast<std::size_t>(e)])].push_back(static_cast<int>(ti));
    }
  }
  for (int it = 0; it < 8; ++it) {
    for (std::size_t v = 0; v < pts.size(); ++v) {
      if (tags[v].loop >= 0 || nbrs[v].empty()) continue;
      Vec2 avg = Vec2::Zero();
      for (int w : nbrs[v]) avg += pts[static_cast<std::size_t>(w)];
      avg /= static_cast<double>(nbrs[v].size());
      const Vec2 old = pts[v];
      pts[v] = avg;
      for (int ti : vtris[v]) {
        const auto& t = tris[static_cast<std::size_t>(ti)];
        if (orient(pts[static_cast<std::size_t>(t[0])], pts[static_cast<std::size_t>(t[1])],
                   pts[static_cast<std::size_t>(t[2])]) <= 0) {
          pts[v] = old;
          break;
        }
      }
    }
  }

  // Drop vertices not used by any kept triangle and renumber.
  std::vector<int> remap(pts.size(), -1);
  auto m = std::make_shared<TriMesh>();
  m->domain = domain;
  m->h = h;
  for (auto& t : tris)
    for (auto& v : t) {
      if (remap[static_cast<std::size_t>(v)] < 0) {
        remap[static_cast<std::size_t>(v)] = static_cast<int>(m->nodes.size());
        m->nodes.push_back(pts[static_cast<std::size_t>(v)]);
        m->boundary.push_back(tags[static_cast<std::size_t>(v)]);
      }
      v = remap[static_cast<std::size_t>(v)];
    }
  m->num_vertices = static_cast<int>(m->nodes.size());
  build_p2(*m, tris);
  rebuild_boundary_edges(*m);
  m->check();
  return m;
}

TriMeshPtr refine(const TriMesh& mesh) {
  auto m = std::make_shared<TriMesh>();
  m->domain = mesh.domain;
  m->level = mesh.level + 1;
  m->h = 0.5 * mesh.h;
  m->nodes = mesh.nodes;
  m->boundary = mesh.boundary;
  m->num_vertices = mesh.num_nodes();

  std::map<EdgeKey, int> parent_boundary;  // corner edge -> index in mesh.edges
  for (std::size_t i = 0; i < mesh.edges.size(); ++i)
    parent_boundary[key(mesh.edges[i].nodes[0], mesh.edges[i].nodes[1])] = static_cast<int>(i);

  std::map<EdgeKey, int> mids;
  static constexpr int kChildren[4][3] = {{0, 3, 5}, {3, 1, 4}, {5, 4, 2}, {3, 4, 5}};
  for (int ti = 0; ti < mesh.num_triangles(); ++ti) {
    const auto& pt = mesh.tris[static_cast<std::size_t>(ti)];
    for (const auto& ch : kChildren) {
      std::array<int, 6> t{pt[static_cast<std::size_t>(ch[0])], pt[static_cast<std::size_t>(ch[1])],
                           pt[static_cast<std::size_t>(ch[2])], -1, -1, -1};
      for (int e = 0; e < 3; ++e) {
        const auto en = p2::edge_nodes(e);
        const int la = ch[en[0]], lb = ch[en[1]];
        const int a = t[static_cast<std::size_t>(en[0])], b = t[static_cast<std::size_t>(en[1])];
        auto it = mids.find(key(a, b));
        if (it == mids.end()) {
          const Vec2 r = 0.5 * (kRefNodes[static_cast<std::size_t>(la)] + kRefNodes[static_cast<std::size_t>(lb)]);
          Vec2 x = mesh.map(ti, r.x(), r.y());
          BoundaryNode tag;
          // A child edge on the boundary joins a parent boundary corner and the parent boundary midpoint.
          const auto& ba = mesh.boundary[static_cast<std::size_t>(a)];
          const auto& bb = mesh.boundary[static_cast<std::size_t>(b)];
          if (ba.loop >= 0 && bb.loop == ba.loop) {
            bool on_edge = false;
            for (int pe = 0; pe < 3 && !on_edge; ++pe) {
              const auto pen = p2::edge_nodes(pe);
              const int c0 = pt[static_cast<std::size_t>(pen[0])], c1 = pt[static_cast<std::size_t>(pen[1])];
              const int cm = pt[static_cast<std::size_t>(pen[2])];
              if (!parent_boundary.count(key(c0, c1))) continue;
              on_edge = (key(a, b) == key(c0, cm)) || (key(a, b) == key(cm, c1));
            }
            if (on_edge) {
              const auto& c = mesh.domain->curve(ba.loop);
              const double du = c.wrap(bb.u - ba.u);
              const double lo = du < 0.5 * c.period() ? ba.u : bb.u;
              const double span = du < 0.5 * c.period() ? du : c.period() - du;
              tag = BoundaryNode{ba.loop, c.wrap(lo + 0.5 * span)};
              x = c.point(tag.u);
            }
          }
          const int id = static_cast<int>(m->nodes.size());
          m->nodes.push_back(x);
          m->boundary.push_back(tag);
          it = mids.emplace(key(a, b), id).first;
        }
        t[static_cast<std::size_t>(en[2])] = it->second;
      }
      m->tris.push_back(t);
    }
  }
  rebuild_boundary_edges(*m);
  m->check();
  return m;
}

TriMeshPtr build_mesh(const geometry::DomainPtr& domain, double h0, int level) {
  if (level < 0) throw MeshError("mesh level must be nonnegative");
  TriMeshPtr m = generate_mesh(domain, h0);
  for (int l = 0; l < level; ++l) m = refine(*m);
  return m;
}

}  // namespace shapecalc::mesh
