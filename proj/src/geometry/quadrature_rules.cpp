#include "shapecalc/quadrature_rules.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace shapecalc::quad {

namespace {

Rule1D build_gauss_legendre(int n) {
  Rule1D rule;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (x + 1.0);
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
  }
  return rule;
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1 || n > 32) throw std::invalid_argument("gauss_legendre: order must be in [1, 32]");
  static std::mutex mutex;
  static std::map<int, Rule1D> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

const std::array<TrianglePoint, 12>& triangle_rule() {
  static const std::array<TrianglePoint, 12> rule = [] {
    // Dunavant degree 6: orbits of barycentric triples.
    const double w1 = 0.116786275726379, a1 = 0.501426509658179, b1 = 0.249286745170910;
    const double w2 = 0.050844906370207, a2 = 0.873821971016996, b2 = 0.063089014491502;
    const double w3 = 0.082851075618374;
    const double c1 = 0.053145049844817, c2 = 0.310352451033784, c3 = 0.636502499121399;
    std::array<TrianglePoint, 12> r{};
    int k = 0;
    auto put = [&](double l0, double l1, double l2, double w) {
      (void)l0;
      r[static_cast<std::size_t>(k++)] = {l1, l2, 0.5 * w};
    };
    put(a1, b1, b1, w1);
    put(b1, a1, b1, w1);
    put(b1, b1, a1, w1);
    put(a2, b2, b2, w2);
    put(b2, a2, b2, w2);
    put(b2, b2, a2, w2);
    put(c1, c2, c3, w3);
    put(c1, c3, c2, w3);
    put(c2, c1, c3, w3);
    put(c2, c3, c1, w3);
    put(c3, c1, c2, w3);
    put(c3, c2, c1, w3);
    return r;
  }();
  return rule;
}

}  // namespace shapecalc::quad
