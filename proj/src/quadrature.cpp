#include "tonekit/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace tonekit {

namespace {

GaussRule make_gauss(int q) {
  GaussRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= q; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = q * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[q - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[q - 1 - i] = w;
  }
  if (q % 2 == 1)
    rule.nodes[q / 2] = 0.0;
  return rule;
}

} // namespace

const GaussRule& gauss_legendre(int q) {
  if (q < 1 || q > 64)
    throw Error(ErrorKind::input, "Gauss rule size must lie in [1, 64]");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[q];
  if (!slot) {
    if (q == 1)
      slot = std::make_unique<GaussRule>(GaussRule{{0.0}, {2.0}});
    else
      slot = std::make_unique<GaussRule>(make_gauss(q));
  }
  return *slot;
}

const SimplexRule& simplex_rule(int dim) {
  static const SimplexRule tri = [] {
    SimplexRule r{};
    r.points = 3;
    const double a = 2.0 / 3.0, b = 1.0 / 6.0;
    r.bary[0] = {a, b, b, 0.0};
    r.bary[1] = {b, a, b, 0.0};
    r.bary[2] = {b, b, a, 0.0};
    r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0};
    return r;
  }();
  static const SimplexRule tet = [] {
    SimplexRule r{};
    r.points = 4;
    const double a = 0.5854101966249685, b = 0.1381966011250105;
    r.bary[0] = {a, b, b, b};
    r.bary[1] = {b, a, b, b};
    r.bary[2] = {b, b, a, b};
    r.bary[3] = {b, b, b, a};
    r.weights = {0.25, 0.25, 0.25, 0.25};
    return r;
  }();
  if (dim == 2)
    return tri;
  if (dim == 3)
    return tet;
  throw Error(ErrorKind::input, "simplex rules exist for dim 2 and 3 only");
}

Box bounding_box(const Point& center, double radius, int dim) {
  Box b;
  b.dim = dim;
  b.lo = center;
  b.hi = center;
  for (int i = 0; i < dim; ++i) {
    b.lo[i] -= radius;
    b.hi[i] += radius;
  }
  return b;
}

void for_each_box_node(const Box& box, int level, int q,
                       const std::function<void(const Point&, double)>& visit) {
  const GaussRule& g = gauss_legendre(q);
  const int cells = 1 << level;
  const int per_axis = cells * q;
  const int dim = box.dim;
  std::array<std::vector<double>, 3> coord, weight;
  for (int d = 0; d < dim; ++d) {
    const double h = (box.hi[d] - box.lo[d]) / cells;
    coord[d].resize(per_axis);
    weight[d].resize(per_axis);
    for (int c = 0; c < cells; ++c) {
      const double mid = box.lo[d] + (c + 0.5) * h;
      for (int k = 0; k < q; ++k) {
        coord[d][c * q + k] = mid + 0.5 * h * g.nodes[k];
        weight[d][c * q + k] = 0.5 * h * g.weights[k];
      }
    }
  }
  Point p = Point::Zero();
  if (dim == 2) {
    for (int i = 0; i < per_axis; ++i) {
      p[0] = coord[0][i];
      for (int j = 0; j < per_axis; ++j) {
        p[1] = coord[1][j];
        visit(p, weight[0][i] * weight[1][j]);
      }
    }
    return;
  }
  for (int i = 0; i < per_axis; ++i) {
    p[0] = coord[0][i];
    for (int j = 0; j < per_axis; ++j) {
      p[1] = coord[1][j];
      const double wij = weight[0][i] * weight[1][j];
      for (int k = 0; k < per_axis; ++k) {
        p[2] = coord[2][k];
        visit(p, wij * weight[2][k]);
      }
    }
  }
}

double integrate_box(const Box& box, int level, int q, const std::function<double(const Point&)>& f) {
  double sum = 0.0;
  for_each_box_node(box, level, q, [&](const Point& p, double w) { sum += w * f(p); });
  return sum;
}

QuadratureResult integrate_box_adaptive(const Box& box, const std::function<double(const Point&)>& f,
                                        const QuadratureOptions& options) {
  QuadratureResult r;
  r.level = options.min_level;
  r.value = integrate_box(box, r.level, options.q, f);
  while (r.level < options.max_level) {
    r.previous = r.value;
    ++r.level;
    r.value = integrate_box(box, r.level, options.q, f);
    const double scale = std::max(std::abs(r.value), 1e-300);
    if (std::abs(r.value - r.previous) <= options.rel_tol * scale || r.value == r.previous) {
      r.converged = true;
      break;
    }
  }
  return r;
}

} // namespace tonekit
