#pragma once

#include "tonekit/core.hpp"
#include "tonekit/expr.hpp"
#include "tonekit/geometry.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tonekit {

struct EigenOptions;

// Closed ball containing the support of a compactly supported field.
struct SupportBall {
  Point center = Point::Zero();
  double radius = 0.0;
};

class ScalarField {
public:
  virtual ~ScalarField() = default;

  virtual int dim() const = 0;
  virtual double value(const Point& p) const = 0;
  virtual Point gradient(const Point& p) const = 0;

  // Evaluation at quadrature point `i` of element `elem`. Nodal fields use
  // their P1 interpolant here; everything else forwards to value/gradient.
  virtual double value_on(const Mesh& mesh, std::size_t elem, const ElementQuadrature& q, int i) const;
  virtual Point gradient_on(const Mesh& mesh, std::size_t elem, const ElementQuadrature& q, int i) const;

  virtual std::optional<SupportBall> support() const { return std::nullopt; }
  virtual std::string describe() const = 0;
};

using Field = std::shared_ptr<const ScalarField>;

Field analytic_field(const Expr& expr, int dim);
Field analytic_field(const std::string& source, int dim);
Field nodal_field(std::shared_ptr<const Mesh> mesh, std::vector<double> values);
// amplitude * (1 - |x - c|^2 / r^2)^power on the ball, zero outside.
Field bump_field(const Point& center, double radius, int power, int dim, double amplitude = 1.0);
// Shell bump on r0 < |x - c| < r1 with value 1 on the middle sphere.
Field annulus_bump(const Point& center, double r0, double r1, int power, int dim);
// 1 inside |x - c| < r - width/2, 0 outside r + width/2, septic smoothstep
// in between.
Field smooth_indicator(const Point& center, double radius, double width, int dim);
Field scaled_field(Field f, double t);
Field product_field(Field f, Field g);
Field zero_field(int dim);

// Max relative gap between the field gradient and central differences of
// its values over `points`, relative to max(|grad|, 1).
double gradient_fd_error(const ScalarField& f, const std::vector<Point>& points, double step = 1e-5);

struct Multiplier {
  Field field;
  // Max |a| over mesh nodes and quadrature points: a lower bound of the sup.
  double sup_bound = 0.0;
  std::string id;
};

Multiplier make_multiplier(Field field, const Mesh& mesh, std::string id = {});

// |grad a(p)|^2
double energy_density(const ScalarField& a, const Point& p);
double energy_density(const Multiplier& a, const Point& p);

double dirichlet_energy(const ScalarField& f, const Mesh& mesh);

// Discrete multiplier seminorm: sqrt of the largest eigenvalue of
// M_a v = lambda (K + M) v on the Neumann P1 space of the mesh.
double multiplier_seminorm(const Multiplier& a, const Mesh& mesh);
double multiplier_seminorm(const Multiplier& a, const Mesh& mesh, const EigenOptions& options);

} // namespace tonekit
