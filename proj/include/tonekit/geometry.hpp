#pragma once

#include "tonekit/core.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace tonekit {

struct DomainSpec {
  enum class Kind { square, rect, disk, annulus, box, ball };

  Kind kind = Kind::square;
  // square: a = L; rect: a = Lx, b = Ly; disk/ball: a = r; annulus: a = r0,
  // b = r1; box: a, b, c = Lx, Ly, Lz. Squares, rectangles and boxes sit at
  // the origin corner; disks, annuli and balls are centered at `center`.
  double a = 1.0, b = 0.0, c = 0.0;
  Point center = Point::Zero();

  static DomainSpec square(double side);
  static DomainSpec rect(double lx, double ly);
  static DomainSpec disk(double radius, const Point& center = Point::Zero());
  static DomainSpec annulus(double r0, double r1);
  static DomainSpec box(double lx, double ly, double lz);
  static DomainSpec ball(double radius, const Point& center = Point::Zero());

  int dim() const;
  // Smallest length scale the mesh has to resolve.
  double feature_size() const;
  // Signed distance-like test: true when p lies inside with at least `margin`
  // clearance from the boundary.
  bool contains(const Point& p, double margin = 0.0) const;
  std::string describe() const;
  void validate() const;
};

// Parses "square:1", "rect:2,1", "disk:1[,cx,cy]", "annulus:0.5,1",
// "box:1,1,1", "ball:1[,cx,cy,cz]".
DomainSpec parse_domain(const std::string& text);

struct ElementQuadrature {
  int count = 0;
  std::array<Point, 4> points;
  std::array<double, 4> weights{};
  // Barycentric coordinates of each point, used to evaluate P1 shape
  // functions without recomputing them.
  std::array<std::array<double, 4>, 4> bary{};
};

class Mesh {
public:
  enum class Orientation {
    // Swap two vertices of any element with negative signed volume.
    fix_each,
    // All elements must share one sign; a uniformly negative mesh is
    // re-oriented, a mixed one is a fold.
    require_consistent,
  };

  Mesh() = default;
  Mesh(int dim, std::vector<Point> nodes, std::vector<std::array<int, 4>> elements,
       Orientation orientation = Orientation::fix_each);

  int dim() const { return dim_; }
  int vertices_per_element() const { return dim_ + 1; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_elements() const { return elements_.size(); }
  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 4>>& elements() const { return elements_; }
  const std::vector<double>& element_volumes() const { return volumes_; }
  const std::vector<char>& boundary_nodes() const { return boundary_; }
  bool is_boundary(std::size_t node) const { return boundary_[node] != 0; }

  ElementQuadrature quadrature(std::size_t element) const;
  // Gradients of the P1 shape functions on an element, one per vertex.
  std::array<Point, 4> shape_gradients(std::size_t element) const;

  double max_edge_length() const;
  bool is_connected() const;

  // Nominal mesh size requested at construction (0 when unknown).
  double h() const { return h_; }
  void set_h(double h) { h_ = h; }

  void write(std::ostream& out) const;
  static Mesh read(std::istream& in);

private:
  int dim_ = 2;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 4>> elements_;
  std::vector<double> volumes_;
  std::vector<char> boundary_;
  double h_ = 0.0;
};

double signed_volume(const std::array<Point, 4>& v, int dim);

Mesh build_mesh(const DomainSpec& spec, double h);

Mesh map_mesh(const Mesh& mesh, const std::function<Point(const Point&)>& map);

double volume(const Mesh& mesh);

struct BallFamily {
  int dim = 2;
  std::vector<Point> centers;
  std::vector<double> radii;

  std::size_t size() const { return radii.size(); }
  void add(const Point& center, double radius);
  // Throws input error unless every ball satisfies `inside`.
  void validate(const std::function<bool(const Point&, double)>& inside) const;
};

} // namespace tonekit
