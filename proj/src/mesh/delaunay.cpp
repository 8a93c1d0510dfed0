#include "delaunay.hpp"

#include "shapecalc/mesh.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace shapecalc::mesh::detail {

namespace {

struct Tri {
  std::array<int, 3> v;
  Vec2 center;
  double r2;
  bool alive;
};

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

Tri make_tri(const std::vector<Vec2>& p, int a, int b, int c) {
  if (orient(p[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(b)], p[static_cast<std::size_t>(c)]) < 0)
    std::swap(b, c);
  const Vec2& A = p[static_cast<std::size_t>(a)];
  const Vec2& B = p[static_cast<std::size_t>(b)];
  const Vec2& C = p[static_cast<std::size_t>(c)];
  const Vec2 ba = B - A, ca = C - A;
  const double d = 2.0 * (ba.x() * ca.y() - ba.y() * ca.x());
  const double b2 = ba.squaredNorm(), c2 = ca.squaredNorm();
  const Vec2 off((ca.y() * b2 - ba.y() * c2) / d, (ba.x() * c2 - ca.x() * b2) / d);
  return {{a, b, c}, A + off, off.squaredNorm(), true};
}

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw MeshError("delaunay: need at least 3 points");
  Vec2 lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double span = std::max((hi - lo).maxCoeff(), 1e-300);
  const Vec2 mid = 0.5 * (lo + hi);

  std::vector<Vec2> p = points;
  p.push_back(mid + Vec2(-20 * span, -20 * span));
  p.push_back(mid + Vec2(20 * span, -20 * span));
  p.push_back(mid + Vec2(0.0, 20 * span));

  std::vector<Tri> tris;
  tris.reserve(static_cast<std::size_t>(4 * n + 8));
  tris.push_back(make_tri(p, n, n + 1, n + 2));

  std::vector<int> bad;
  std::map<std::pair<int, int>, int> cavity;
  for (int i = 0; i < n; ++i) {
    const Vec2& q = p[static_cast<std::size_t>(i)];
    bad.clear();
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      const Tri& tr = tris[static_cast<std::size_t>(t)];
      if (!tr.alive) continue;
      if ((q - tr.center).squaredNorm() < tr.r2 * (1.0 - 1e-12)) bad.push_back(t);
    }
    if (bad.empty()) throw MeshError("delaunay: duplicate point " + std::to_string(i));
    // Directed cavity edges: an edge survives if its reverse is not in the cavity.
    cavity.clear();
    for (int t : bad) {
      Tri& tr = tris[static_cast<std::size_t>(t)];
      tr.alive = false;
      for (int e = 0; e < 3; ++e) {
        const int a = tr.v[static_cast<std::size_t>(e)], b = tr.v[static_cast<std::size_t>((e + 1) % 3)];
        auto rev = cavity.find({b, a});
        if (rev != cavity.end())
          cavity.erase(rev);
        else
          cavity[{a, b}] = 1;
      }
    }
    for (const auto& entry : cavity) tris.push_back(make_tri(p, entry.first.first, entry.first.second, i));
    if (tris.size() > static_cast<std::size_t>(4 * (i + 1) + 64)) {
      tris.erase(std::remove_if(tris.begin(), tris.end(), [](const Tri& t) { return !t.alive; }), tris.end());
    }
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& tr : tris) {
    if (!tr.alive) continue;
    if (tr.v[0] >= n || tr.v[1] >= n || tr.v[2] >= n) continue;
    out.push_back(tr.v);
  }
  return out;
}

}  // namespace shapecalc::mesh::detail
