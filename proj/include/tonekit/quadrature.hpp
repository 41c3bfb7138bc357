#pragma once

#include "tonekit/core.hpp"

#include <array>
#include <functional>
#include <vector>

namespace tonekit {

struct GaussRule {
  std::vector<double> nodes;   // on [-1, 1]
  std::vector<double> weights; // sum to 2
};

// Gauss-Legendre rule with q points, 1 <= q <= 64.
const GaussRule& gauss_legendre(int q);

// Degree-2 simplex rules in barycentric coordinates; weights sum to 1.
struct SimplexRule {
  int points;
  std::array<std::array<double, 4>, 4> bary;
  std::array<double, 4> weights;
};
const SimplexRule& simplex_rule(int dim);

struct Box {
  int dim = 3;
  Point lo = Point::Zero();
  Point hi = Point::Zero();
};

Box bounding_box(const Point& center, double radius, int dim);

// Tensor Gauss rule on the box split into 2^level cells per axis.
void for_each_box_node(const Box& box, int level, int q,
                       const std::function<void(const Point&, double)>& visit);

double integrate_box(const Box& box, int level, int q, const std::function<double(const Point&)>& f);

struct QuadratureOptions {
  int q = 6;
  int min_level = 1;
  int max_level = 5;
  double rel_tol = 1e-8;
};

struct QuadratureResult {
  double value = 0.0;
  double previous = 0.0;
  int level = 0;
  bool converged = false;
};

// Dyadic refinement until two successive levels differ by less than rel_tol
// (relative to the finer value). Non-convergence is reported, not thrown.
QuadratureResult integrate_box_adaptive(const Box& box, const std::function<double(const Point&)>& f,
                                        const QuadratureOptions& options = {});

} // namespace tonekit
