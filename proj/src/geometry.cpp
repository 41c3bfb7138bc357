#include "tonekit/geometry.hpp"
#include "tonekit/quadrature.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <queue>
#include <sstream>

namespace tonekit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxNodes = 5'000'000;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorKind::input, std::string(what) + " must be a positive finite number");
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0')
      throw Error(ErrorKind::input, "bad number '" + item + "' in domain spec");
    out.push_back(v);
  }
  return out;
}

} // namespace

DomainSpec DomainSpec::square(double side) {
  DomainSpec s;
  s.kind = Kind::square;
  s.a = side;
  return s;
}

DomainSpec DomainSpec::rect(double lx, double ly) {
  DomainSpec s;
  s.kind = Kind::rect;
  s.a = lx;
  s.b = ly;
  return s;
}

DomainSpec DomainSpec::disk(double radius, const Point& center) {
  DomainSpec s;
  s.kind = Kind::disk;
  s.a = radius;
  s.center = center;
  s.center[2] = 0.0;
  return s;
}

DomainSpec DomainSpec::annulus(double r0, double r1) {
  DomainSpec s;
  s.kind = Kind::annulus;
  s.a = r0;
  s.b = r1;
  return s;
}

DomainSpec DomainSpec::box(double lx, double ly, double lz) {
  DomainSpec s;
  s.kind = Kind::box;
  s.a = lx;
  s.b = ly;
  s.c = lz;
  return s;
}

DomainSpec DomainSpec::ball(double radius, const Point& center) {
  DomainSpec s;
  s.kind = Kind::ball;
  s.a = radius;
  s.center = center;
  return s;
}

int DomainSpec::dim() const {
  switch (kind) {
  case Kind::square:
  case Kind::rect:
  case Kind::disk:
  case Kind::annulus: return 2;
  case Kind::box:
  case Kind::ball: return 3;
  }
  return 2;
}

void DomainSpec::validate() const {
  switch (kind) {
  case Kind::square: require_positive(a, "side length"); break;
  case Kind::rect:
    require_positive(a, "side length");
    require_positive(b, "side length");
    break;
  case Kind::disk:
  case Kind::ball: require_positive(a, "radius"); break;
  case Kind::annulus:
    require_positive(a, "inner radius");
    require_positive(b, "outer radius");
    if (!(b > a))
      throw Error(ErrorKind::input, "annulus needs r1 > r0 > 0");
    break;
  case Kind::box:
    require_positive(a, "side length");
    require_positive(b, "side length");
    require_positive(c, "side length");
    break;
  }
}

double DomainSpec::feature_size() const {
  switch (kind) {
  case Kind::square: return a;
  case Kind::rect: return std::min(a, b);
  case Kind::disk:
  case Kind::ball: return a;
  case Kind::annulus: return b - a;
  case Kind::box: return std::min({a, b, c});
  }
  return a;
}

bool DomainSpec::contains(const Point& p, double margin) const {
  switch (kind) {
  case Kind::square:
    return p[0] >= margin && p[0] <= a - margin && p[1] >= margin && p[1] <= a - margin;
  case Kind::rect:
    return p[0] >= margin && p[0] <= a - margin && p[1] >= margin && p[1] <= b - margin;
  case Kind::box:
    return p[0] >= margin && p[0] <= a - margin && p[1] >= margin && p[1] <= b - margin &&
           p[2] >= margin && p[2] <= c - margin;
  case Kind::disk: return std::hypot(p[0] - center[0], p[1] - center[1]) <= a - margin;
  case Kind::ball: return (p - center).norm() <= a - margin;
  case Kind::annulus: {
    const double r = std::hypot(p[0], p[1]);
    return r >= a + margin && r <= b - margin;
  }
  }
  return false;
}

std::string DomainSpec::describe() const {
  switch (kind) {
  case Kind::square: return "square:" + fmt(a);
  case Kind::rect: return "rect:" + fmt(a) + "," + fmt(b);
  case Kind::disk:
    if (center.isZero())
      return "disk:" + fmt(a);
    return "disk:" + fmt(a) + "," + fmt(center[0]) + "," + fmt(center[1]);
  case Kind::annulus: return "annulus:" + fmt(a) + "," + fmt(b);
  case Kind::box: return "box:" + fmt(a) + "," + fmt(b) + "," + fmt(c);
  case Kind::ball:
    if (center.isZero())
      return "ball:" + fmt(a);
    return "ball:" + fmt(a) + "," + fmt(center[0]) + "," + fmt(center[1]) + "," + fmt(center[2]);
  }
  return "?";
}

DomainSpec parse_domain(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw Error(ErrorKind::input, "domain spec '" + text + "' must look like kind:params, e.g. square:1");
  const std::string kind = text.substr(0, colon);
  const std::vector<double> v = parse_numbers(text.substr(colon + 1));
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (v.size() < lo || v.size() > hi)
      throw Error(ErrorKind::input, "wrong number of parameters for domain '" + kind + "'");
  };
  DomainSpec s;
  if (kind == "square") {
    need(1, 1);
    s = DomainSpec::square(v[0]);
  } else if (kind == "rect") {
    need(2, 2);
    s = DomainSpec::rect(v[0], v[1]);
  } else if (kind == "disk") {
    need(1, 3);
    if (v.size() == 2)
      throw Error(ErrorKind::input, "disk center needs two coordinates");
    s = DomainSpec::disk(v[0], v.size() == 3 ? Point(v[1], v[2], 0.0) : Point::Zero());
  } else if (kind == "annulus") {
    need(2, 2);
    s = DomainSpec::annulus(v[0], v[1]);
  } else if (kind == "box") {
    need(3, 3);
    s = DomainSpec::box(v[0], v[1], v[2]);
  } else if (kind == "ball") {
    need(1, 4);
    if (v.size() != 1 && v.size() != 4)
      throw Error(ErrorKind::input, "ball center needs three coordinates");
    s = DomainSpec::ball(v[0], v.size() == 4 ? Point(v[1], v[2], v[3]) : Point::Zero());
  } else {
    throw Error(ErrorKind::input,
                "unknown domain kind '" + kind + "' (expected square, rect, disk, annulus, box, ball)");
  }
  s.validate();
  return s;
}

double signed_volume(const std::array<Point, 4>& v, int dim) {
  if (dim == 2) {
    const double ax = v[1][0] - v[0][0], ay = v[1][1] - v[0][1];
    const double bx = v[2][0] - v[0][0], by = v[2][1] - v[0][1];
    return 0.5 * (ax * by - ay * bx);
  }
  const Point a = v[1] - v[0], b = v[2] - v[0], c = v[3] - v[0];
  return a.dot(b.cross(c)) / 6.0;
}

Mesh::Mesh(int dim, std::vector<Point> nodes, std::vector<std::array<int, 4>> elements,
           Orientation orientation)
    : dim_(dim), nodes_(std::move(nodes)), elements_(std::move(elements)) {
  if (dim_ != 2 && dim_ != 3)
    throw Error(ErrorKind::input, "mesh dimension must be 2 or 3");
  const int nv = dim_ + 1;
  const int n = static_cast<int>(nodes_.size());
  for (auto& e : elements_)
    for (int k = 0; k < nv; ++k)
      if (e[k] < 0 || e[k] >= n)
        throw Error(ErrorKind::input, "element references a node out of range");

  volumes_.resize(elements_.size());
  auto corners = [&](const std::array<int, 4>& e) {
    std::array<Point, 4> v;
    for (int k = 0; k < nv; ++k)
      v[k] = nodes_[e[k]];
    return v;
  };
  std::size_t negative = 0;
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const double vol = signed_volume(corners(elements_[i]), dim_);
    if (vol == 0.0 || !std::isfinite(vol))
      throw Error(orientation == Orientation::fix_each ? ErrorKind::input : ErrorKind::fold,
                  "degenerate element " + std::to_string(i));
    if (vol < 0.0)
      ++negative;
    volumes_[i] = vol;
  }
  if (orientation == Orientation::require_consistent && negative != 0 && negative != elements_.size())
    throw Error(ErrorKind::fold, std::to_string(negative) + " of " + std::to_string(elements_.size()) +
                                     " elements inverted; h is too coarse for the map's curvature");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (volumes_[i] < 0.0) {
      std::swap(elements_[i][1], elements_[i][2]);
      volumes_[i] = -volumes_[i];
    }
  }

  // Boundary facets occur in exactly one element.
  std::vector<std::uint64_t> keys;
  keys.reserve(elements_.size() * nv);
  for (const auto& e : elements_) {
    for (int skip = 0; skip < nv; ++skip) {
      std::array<std::uint64_t, 3> f{};
      int m = 0;
      for (int k = 0; k < nv; ++k)
        if (k != skip)
          f[m++] = static_cast<std::uint64_t>(e[k]);
      std::sort(f.begin(), f.begin() + m);
      keys.push_back(dim_ == 2 ? (f[0] << 32) | f[1] : (f[0] << 42) | (f[1] << 21) | f[2]);
    }
  }
  std::sort(keys.begin(), keys.end());
  boundary_.assign(nodes_.size(), 0);
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i + 1;
    while (j < keys.size() && keys[j] == keys[i])
      ++j;
    if (j - i == 1) {
      const std::uint64_t k = keys[i];
      if (dim_ == 2) {
        boundary_[k >> 32] = 1;
        boundary_[k & 0xffffffffu] = 1;
      } else {
        boundary_[k >> 42] = 1;
        boundary_[(k >> 21) & 0x1fffff] = 1;
        boundary_[k & 0x1fffff] = 1;
      }
    }
    i = j;
  }
}

ElementQuadrature Mesh::quadrature(std::size_t element) const {
  const SimplexRule& rule = simplex_rule(dim_);
  const auto& e = elements_[element];
  ElementQuadrature q;
  q.count = rule.points;
  for (int i = 0; i < rule.points; ++i) {
    Point p = Point::Zero();
    for (int k = 0; k <= dim_; ++k)
      p += rule.bary[i][k] * nodes_[e[k]];
    q.points[i] = p;
    q.weights[i] = rule.weights[i] * volumes_[element];
    q.bary[i] = rule.bary[i];
  }
  return q;
}

std::array<Point, 4> Mesh::shape_gradients(std::size_t element) const {
  const auto& e = elements_[element];
  std::array<Point, 4> g;
  g.fill(Point::Zero());
  if (dim_ == 2) {
    const Point& p0 = nodes_[e[0]];
    const Point& p1 = nodes_[e[1]];
    const Point& p2 = nodes_[e[2]];
    const double two_area = 2.0 * volumes_[element];
    g[0] = Point((p1[1] - p2[1]) / two_area, (p2[0] - p1[0]) / two_area, 0.0);
    g[1] = Point((p2[1] - p0[1]) / two_area, (p0[0] - p2[0]) / two_area, 0.0);
    g[2] = Point((p0[1] - p1[1]) / two_area, (p1[0] - p0[0]) / two_area, 0.0);
    return g;
  }
  Eigen::Matrix3d edges;
  for (int k = 0; k < 3; ++k)
    edges.row(k) = (nodes_[e[k + 1]] - nodes_[e[0]]).transpose();
  const Eigen::Matrix3d inv = edges.inverse();
  for (int k = 0; k < 3; ++k)
    g[k + 1] = inv.col(k);
  g[0] = -(g[1] + g[2] + g[3]);
  return g;
}

double Mesh::max_edge_length() const {
  double m = 0.0;
  const int nv = dim_ + 1;
  for (const auto& e : elements_)
    for (int i = 0; i < nv; ++i)
      for (int j = i + 1; j < nv; ++j)
        m = std::max(m, (nodes_[e[i]] - nodes_[e[j]]).norm());
  return m;
}

bool Mesh::is_connected() const {
  if (elements_.empty())
    return false;
  // Union-find over nodes through element membership is equivalent to
  // element adjacency for conforming simplicial meshes with no isolated
  // vertices.
  std::vector<int> parent(nodes_.size());
  for (std::size_t i = 0; i < parent.size(); ++i)
    parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<char> used(nodes_.size(), 0);
  for (const auto& e : elements_) {
    for (int k = 0; k <= dim_; ++k) {
      used[e[k]] = 1;
      const int a = find(e[0]), b = find(e[k]);
      if (a != b)
        parent[b] = a;
    }
  }
  const int root = find(elements_[0][0]);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (!used[i] || find(static_cast<int>(i)) != root)
      return false;
  return true;
}

void Mesh::write(std::ostream& out) const {
  out << dim_ << ' ' << nodes_.size() << ' ' << elements_.size() << '\n';
  for (const auto& p : nodes_) {
    for (int d = 0; d < dim_; ++d)
      out << (d ? " " : "") << fmt(p[d]);
    out << '\n';
  }
  for (const auto& e : elements_) {
    for (int k = 0; k <= dim_; ++k)
      out << (k ? " " : "") << e[k];
    out << '\n';
  }
}

Mesh Mesh::read(std::istream& in) {
  int dim = 0;
  std::size_t nn = 0, ne = 0;
  if (!(in >> dim >> nn >> ne) || (dim != 2 && dim != 3))
    throw Error(ErrorKind::io, "mesh header must be 'dim n_nodes n_elems' with dim 2 or 3");
  std::vector<Point> nodes(nn, Point::Zero());
  std::string token;
  for (std::size_t i = 0; i < nn; ++i) {
    for (int d = 0; d < dim; ++d) {
      if (!(in >> token))
        throw Error(ErrorKind::io, "mesh file truncated in node block");
      char* end = nullptr;
      nodes[i][d] = std::strtod(token.c_str(), &end);
      if (*end != '\0')
        throw Error(ErrorKind::io, "bad coordinate '" + token + "'");
    }
  }
  std::vector<std::array<int, 4>> elems(ne, {-1, -1, -1, -1});
  for (std::size_t i = 0; i < ne; ++i)
    for (int k = 0; k <= dim; ++k)
      if (!(in >> elems[i][k]))
        throw Error(ErrorKind::io, "mesh file truncated in element block");
  return Mesh(dim, std::move(nodes), std::move(elems));
}

namespace {

Mesh rect_mesh(double lx, double ly, double h) {
  const int nx = static_cast<int>(std::ceil(lx / h - 1e-12));
  const int ny = static_cast<int>(std::ceil(ly / h - 1e-12));
  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      nodes.emplace_back(i == nx ? lx : lx * i / nx, j == ny ? ly : ly * j / ny, 0.0);
  std::vector<std::array<int, 4>> elems;
  elems.reserve(2 * static_cast<std::size_t>(nx) * ny);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      elems.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
      elems.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
    }
  }
  return Mesh(2, std::move(nodes), std::move(elems));
}

// Triangulates the strip between two closed rings of node ids ordered by
// angle. Each step takes the shorter of the two candidate diagonals.
void stitch_rings(const std::vector<Point>& nodes, const std::vector<int>& inner, const std::vector<int>& outer,
                  std::vector<std::array<int, 4>>& elems) {
  const std::size_t ni = inner.size(), no = outer.size();
  std::size_t i = 0, j = 0;
  auto dist = [&](int a, int b) { return (nodes[a] - nodes[b]).squaredNorm(); };
  while (i < ni || j < no) {
    const bool advance_outer =
        i == ni || (j < no && dist(inner[i % ni], outer[(j + 1) % no]) < dist(outer[j % no], inner[(i + 1) % ni]));
    if (advance_outer) {
      elems.push_back({inner[i % ni], outer[j % no], outer[(j + 1) % no], -1});
      ++j;
    } else {
      elems.push_back({inner[i % ni], outer[j % no], inner[(i + 1) % ni], -1});
      ++i;
    }
  }
}

Mesh disk_mesh(double r, const Point& c, double h) {
  const int rings = static_cast<int>(std::ceil(r / h - 1e-12));
  std::vector<Point> nodes;
  nodes.reserve(1 + 3 * static_cast<std::size_t>(rings) * (rings + 1));
  std::vector<std::array<int, 4>> elems;
  nodes.emplace_back(c[0], c[1], 0.0);
  std::vector<int> prev{0};
  for (int k = 1; k <= rings; ++k) {
    const double rk = k == rings ? r : r * k / rings;
    const int count = 6 * k;
    std::vector<int> ring(count);
    for (int j = 0; j < count; ++j) {
      const double ang = 2.0 * kPi * j / count;
      ring[j] = static_cast<int>(nodes.size());
      nodes.emplace_back(c[0] + rk * std::cos(ang), c[1] + rk * std::sin(ang), 0.0);
    }
    if (k == 1) {
      for (int j = 0; j < count; ++j)
        elems.push_back({0, ring[j], ring[(j + 1) % count], -1});
    } else {
      stitch_rings(nodes, prev, ring, elems);
    }
    prev = std::move(ring);
  }
  return Mesh(2, std::move(nodes), std::move(elems));
}

Mesh annulus_mesh(double r0, double r1, double h) {
  const int layers = static_cast<int>(std::ceil((r1 - r0) / h - 1e-12));
  std::vector<Point> nodes;
  std::vector<std::array<int, 4>> elems;
  std::vector<int> prev;
  for (int k = 0; k <= layers; ++k) {
    const double rk = k == layers ? r1 : r0 + (r1 - r0) * k / layers;
    const int count = std::max(6, static_cast<int>(std::ceil(2.0 * kPi * rk / h)));
    std::vector<int> ring(count);
    for (int j = 0; j < count; ++j) {
      const double ang = 2.0 * kPi * j / count;
      ring[j] = static_cast<int>(nodes.size());
      nodes.emplace_back(rk * std::cos(ang), rk * std::sin(ang), 0.0);
    }
    if (k > 0)
      stitch_rings(nodes, prev, ring, elems);
    prev = std::move(ring);
  }
  return Mesh(2, std::move(nodes), std::move(elems));
}

// Structured grid of (nx+1)(ny+1)(nz+1) nodes on [lo, hi], each cube split
// into the six Kuhn tetrahedra sharing its main diagonal.
std::pair<std::vector<Point>, std::vector<std::array<int, 4>>> cube_grid(const Point& lo, const Point& hi,
                                                                          int nx, int ny, int nz) {
  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  auto coord = [](double a, double b, int i, int n) { return i == n ? b : a + (b - a) * i / n; };
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        nodes.emplace_back(coord(lo[0], hi[0], i, nx), coord(lo[1], hi[1], j, ny), coord(lo[2], hi[2], k, nz));
  auto id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::array<int, 4>> elems;
  elems.reserve(6 * static_cast<std::size_t>(nx) * ny * nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> off{0, 0, 0};
          std::array<int, 4> t{};
          t[0] = id(i, j, k);
          for (int s = 0; s < 3; ++s) {
            off[p[s]] = 1;
            t[s + 1] = id(i + off[0], j + off[1], k + off[2]);
          }
          elems.push_back(t);
        }
  return {std::move(nodes), std::move(elems)};
}

// Longest Kuhn edge is the cube diagonal; keep it within 1.5 h.
int cube_divisions(double length, double h) {
  return std::max(1, static_cast<int>(std::ceil(length * std::sqrt(3.0) / (1.5 * h) - 1e-12)));
}

Mesh box_mesh(double lx, double ly, double lz, double h) {
  auto [nodes, elems] =
      cube_grid(Point::Zero(), Point(lx, ly, lz), cube_divisions(lx, h), cube_divisions(ly, h), cube_divisions(lz, h));
  return Mesh(3, std::move(nodes), std::move(elems));
}

Mesh ball_mesh(double r, const Point& c, double h) {
  const int n = std::max(2, cube_divisions(2.0 * r, h));
  auto [nodes, elems] = cube_grid(Point(-r, -r, -r), Point(r, r, r), n, n, n);
  for (auto& p : nodes) {
    const double l2 = p.norm();
    if (l2 > 0.0) {
      const double linf = p.cwiseAbs().maxCoeff();
      Point q = p * (linf / l2);
      if (linf == r)
        q *= r / q.norm(); // boundary nodes exactly on the sphere
      p = q;
    }
    p += c;
  }
  return Mesh(3, std::move(nodes), std::move(elems));
}

} // namespace

Mesh build_mesh(const DomainSpec& spec, double h) {
  spec.validate();
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorKind::input, "mesh size h must be positive");
  if (h >= spec.feature_size())
    throw Error(ErrorKind::resolution, "h = " + fmt(h) + " cannot resolve " + spec.describe() +
                                           " (smallest feature " + fmt(spec.feature_size()) + ")");
  // Rough node-count guard before allocating.
  double estimate = 0.0;
  switch (spec.kind) {
  case DomainSpec::Kind::square: estimate = std::pow(spec.a / h + 1, 2); break;
  case DomainSpec::Kind::rect: estimate = (spec.a / h + 1) * (spec.b / h + 1); break;
  case DomainSpec::Kind::disk: estimate = 3.0 * std::pow(spec.a / h + 1, 2); break;
  case DomainSpec::Kind::annulus: estimate = 2.0 * kPi * spec.b / h * ((spec.b - spec.a) / h + 1); break;
  case DomainSpec::Kind::box: estimate = (spec.a / h + 1) * (spec.b / h + 1) * (spec.c / h + 1) * 2.0; break;
  case DomainSpec::Kind::ball: estimate = std::pow(2.0 * spec.a / h * 1.2 + 1, 3); break;
  }
  if (estimate > static_cast<double>(kMaxNodes))
    throw Error(ErrorKind::input, "h = " + fmt(h) + " would exceed the mesh size limit");

  Mesh mesh;
  switch (spec.kind) {
  case DomainSpec::Kind::square: mesh = rect_mesh(spec.a, spec.a, h); break;
  case DomainSpec::Kind::rect: mesh = rect_mesh(spec.a, spec.b, h); break;
  case DomainSpec::Kind::disk: mesh = disk_mesh(spec.a, spec.center, h); break;
  case DomainSpec::Kind::annulus: mesh = annulus_mesh(spec.a, spec.b, h); break;
  case DomainSpec::Kind::box: mesh = box_mesh(spec.a, spec.b, spec.c, h); break;
  case DomainSpec::Kind::ball: mesh = ball_mesh(spec.a, spec.center, h); break;
  }
  mesh.set_h(h);
  return mesh;
}

Mesh map_mesh(const Mesh& mesh, const std::function<Point(const Point&)>& map) {
  std::vector<Point> nodes;
  nodes.reserve(mesh.num_nodes());
  for (const auto& p : mesh.nodes()) {
    Point q = map(p);
    if (mesh.dim() == 2)
      q[2] = 0.0;
    if (!q.allFinite())
      throw Error(ErrorKind::singular_point, "map produced a non-finite node");
    nodes.push_back(q);
  }
  Mesh out(mesh.dim(), std::move(nodes), mesh.elements(), Mesh::Orientation::require_consistent);
  out.set_h(mesh.h());
  return out;
}

double volume(const Mesh& mesh) {
  double v = 0.0;
  for (double e : mesh.element_volumes())
    v += e;
  return v;
}

void BallFamily::add(const Point& center, double radius) {
  if (!(radius > 0.0))
    throw Error(ErrorKind::input, "ball radius must be positive");
  centers.push_back(center);
  radii.push_back(radius);
}

void BallFamily::validate(const std::function<bool(const Point&, double)>& inside) const {
  for (std::size_t i = 0; i < size(); ++i)
    if (!inside(centers[i], radii[i]))
      throw Error(ErrorKind::input, "ball " + std::to_string(i) + " leaves the target domain");
}

} // namespace tonekit
