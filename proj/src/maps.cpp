#include "tonekit/maps.hpp"

#include <algorithm>
#include <cmath>

namespace tonekit {

AnalyticMap::AnalyticMap(int dim, std::vector<Expr> components, std::optional<std::vector<Expr>> inverse)
    : dim_(dim), comp_(std::move(components)), inv_(std::move(inverse)) {
  if (dim_ != 2 && dim_ != 3)
    throw Error(ErrorKind::input, "maps are defined in dimension 2 or 3");
  if (comp_.size() != static_cast<std::size_t>(dim_))
    throw Error(ErrorKind::input, "map needs one component per coordinate");
  if (inv_ && inv_->size() != static_cast<std::size_t>(dim_))
    throw Error(ErrorKind::input, "inverse map needs one component per coordinate");
  for (const Expr& e : comp_)
    if (e.max_variable() >= dim_)
      throw Error(ErrorKind::input, "map component uses a variable beyond the dimension");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      jac_[i][j] = (i < dim_ && j < dim_) ? comp_[i].derivative(j) : Expr::constant(i == j ? 1.0 : 0.0);
}

AnalyticMap AnalyticMap::parse(int dim, const std::vector<std::string>& components,
                               const std::optional<std::vector<std::string>>& inverse) {
  std::vector<Expr> c;
  for (const auto& s : components)
    c.push_back(parse_expr(s, dim));
  std::optional<std::vector<Expr>> inv;
  if (inverse) {
    inv.emplace();
    for (const auto& s : *inverse)
      inv->push_back(parse_expr(s, dim));
  }
  return AnalyticMap(dim, std::move(c), std::move(inv));
}

namespace {

std::vector<Expr> affine_exprs(int dim, const Jacobian& a, const Point& b) {
  std::vector<Expr> out;
  for (int i = 0; i < dim; ++i) {
    Expr e = Expr::constant(b[i]);
    for (int j = 0; j < dim; ++j)
      e = e + Expr::constant(a(i, j)) * Expr::variable(j);
    out.push_back(e);
  }
  return out;
}

} // namespace

AnalyticMap AnalyticMap::affine(int dim, const Jacobian& a, const Point& b) {
  Jacobian a_full = a;
  if (dim == 2) {
    a_full.row(2).setZero();
    a_full.col(2).setZero();
    a_full(2, 2) = 1.0;
  }
  const double det = determinant(a_full, dim);
  if (det == 0.0 || !std::isfinite(det))
    throw Error(ErrorKind::input, "affine map is singular");
  const Jacobian inv = a_full.inverse();
  Point binv = -(inv * b);
  if (dim == 2)
    binv[2] = 0.0;
  return AnalyticMap(dim, affine_exprs(dim, a_full, b), affine_exprs(dim, inv, binv));
}

Point AnalyticMap::apply(const Point& x) const {
  Point y = Point::Zero();
  for (int i = 0; i < dim_; ++i)
    y[i] = comp_[i].eval(x);
  return y;
}

Jacobian AnalyticMap::jacobian(const Point& x) const {
  Jacobian j;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      j(r, c) = jac_[r][c].eval(x);
  return j;
}

MapPtr AnalyticMap::inverse() const {
  if (!inv_)
    throw Error(ErrorKind::input, "map has no inverse given");
  return std::make_shared<AnalyticMap>(dim_, *inv_, comp_);
}

std::string AnalyticMap::describe() const {
  std::string s = "map(";
  for (int i = 0; i < dim_; ++i)
    s += (i ? ", " : "") + comp_[i].to_string();
  return s + ")";
}

double jacobian_fd_error(const Map& map, const std::vector<Point>& points, double step) {
  double worst = 0.0;
  const int n = map.dim();
  for (const Point& p : points) {
    const Jacobian j = map.jacobian(p);
    Jacobian fd = Jacobian::Identity();
    for (int c = 0; c < n; ++c) {
      Point a = p, b = p;
      a[c] += step;
      b[c] -= step;
      const Point d = (map.apply(a) - map.apply(b)) / (2.0 * step);
      for (int r = 0; r < n; ++r)
        fd(r, c) = d[r];
    }
    const double scale = std::max(j.topLeftCorner(n, n).norm(), 1.0);
    worst = std::max(worst, (j - fd).topLeftCorner(n, n).norm() / scale);
  }
  return worst;
}

Mesh map_mesh(const Mesh& mesh, const Map& map) {
  if (map.dim() != mesh.dim())
    throw Error(ErrorKind::input, "map and mesh dimensions differ");
  return map_mesh(mesh, [&](const Point& p) { return map.apply(p); });
}

} // namespace tonekit
