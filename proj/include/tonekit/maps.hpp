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

class Map {
public:
  virtual ~Map() = default;
  virtual int dim() const = 0;
  virtual Point apply(const Point& x) const = 0;
  virtual Jacobian jacobian(const Point& x) const = 0;
  // Throws input error when no inverse is known.
  virtual std::shared_ptr<const Map> inverse() const = 0;
  virtual std::string describe() const = 0;
};

using MapPtr = std::shared_ptr<const Map>;

// Map given by one expression per output coordinate, with a symbolic
// Jacobian and an optional inverse given the same way.
class AnalyticMap final : public Map {
public:
  AnalyticMap(int dim, std::vector<Expr> components, std::optional<std::vector<Expr>> inverse = std::nullopt);
  static AnalyticMap parse(int dim, const std::vector<std::string>& components,
                           const std::optional<std::vector<std::string>>& inverse = std::nullopt);
  // x -> A x + b with the inverse built from A^-1.
  static AnalyticMap affine(int dim, const Jacobian& a, const Point& b = Point::Zero());

  int dim() const override { return dim_; }
  Point apply(const Point& x) const override;
  Jacobian jacobian(const Point& x) const override;
  MapPtr inverse() const override;
  std::string describe() const override;
  const std::vector<Expr>& components() const { return comp_; }

private:
  int dim_;
  std::vector<Expr> comp_;
  std::array<std::array<Expr, 3>, 3> jac_;
  std::optional<std::vector<Expr>> inv_;
};

// Max relative gap (Frobenius, relative to max(|J|, 1)) between the map's
// Jacobian and central differences at the points.
double jacobian_fd_error(const Map& map, const std::vector<Point>& points, double step = 1e-6);

Mesh map_mesh(const Mesh& mesh, const Map& map);

} // namespace tonekit
