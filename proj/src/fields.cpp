#include "tonekit/fields.hpp"

#include "tonekit/assembly.hpp"
#include "tonekit/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tonekit {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class AnalyticField final : public ScalarField {
public:
  AnalyticField(Expr e, int dim) : expr_(std::move(e)), dim_(dim) {
    if (expr_.max_variable() >= dim)
      throw Error(ErrorKind::input, "expression uses a variable beyond dimension " + std::to_string(dim));
    for (int i = 0; i < dim; ++i)
      grad_[i] = expr_.derivative(i);
  }

  int dim() const override { return dim_; }
  double value(const Point& p) const override { return expr_.eval(p); }
  Point gradient(const Point& p) const override {
    Point g = Point::Zero();
    for (int i = 0; i < dim_; ++i)
      g[i] = grad_[i].eval(p);
    return g;
  }
  std::string describe() const override { return expr_.to_string(); }

private:
  Expr expr_;
  std::array<Expr, 3> grad_;
  int dim_;
};

class NodalField final : public ScalarField {
public:
  NodalField(std::shared_ptr<const Mesh> mesh, std::vector<double> values)
      : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (!mesh_ || values_.size() != mesh_->num_nodes())
      throw Error(ErrorKind::input, "nodal field needs one value per mesh node");
  }

  int dim() const override { return mesh_->dim(); }
  double value(const Point&) const override {
    throw Error(ErrorKind::evaluation, "nodal field can only be evaluated on its own mesh");
  }
  Point gradient(const Point&) const override {
    throw Error(ErrorKind::evaluation, "nodal field can only be evaluated on its own mesh");
  }
  double value_on(const Mesh& mesh, std::size_t elem, const ElementQuadrature& q, int i) const override {
    check(mesh);
    const auto& e = mesh.elements()[elem];
    double v = 0.0;
    for (int k = 0; k <= mesh.dim(); ++k)
      v += q.bary[i][k] * values_[e[k]];
    return v;
  }
  Point gradient_on(const Mesh& mesh, std::size_t elem, const ElementQuadrature&, int) const override {
    check(mesh);
    const auto& e = mesh.elements()[elem];
    const auto g = mesh.shape_gradients(elem);
    Point out = Point::Zero();
    for (int k = 0; k <= mesh.dim(); ++k)
      out += values_[e[k]] * g[k];
    return out;
  }
  std::string describe() const override { return "nodal[" + std::to_string(values_.size()) + "]"; }

private:
  void check(const Mesh& mesh) const {
    if (&mesh != mesh_.get() &&
        (mesh.num_nodes() != mesh_->num_nodes() || mesh.num_elements() != mesh_->num_elements()))
      throw Error(ErrorKind::input, "nodal field evaluated on a different mesh");
  }

  std::shared_ptr<const Mesh> mesh_;
  std::vector<double> values_;
};

class BumpField final : public ScalarField {
public:
  BumpField(const Point& c, double r, int k, int dim, double amp)
      : c_(c), r_(r), k_(k), dim_(dim), amp_(amp) {
    if (!(r > 0.0) || k < 1)
      throw Error(ErrorKind::input, "bump needs radius > 0 and power >= 1");
    if (dim == 2)
      c_[2] = 0.0;
  }

  int dim() const override { return dim_; }
  double value(const Point& p) const override {
    const double s = norm2(p - c_, dim_) / (r_ * r_);
    return s >= 1.0 ? 0.0 : amp_ * std::pow(1.0 - s, k_);
  }
  Point gradient(const Point& p) const override {
    const Point d = p - c_;
    const double s = norm2(d, dim_) / (r_ * r_);
    Point g = Point::Zero();
    if (s >= 1.0)
      return g;
    const double f = -2.0 * amp_ * k_ * std::pow(1.0 - s, k_ - 1) / (r_ * r_);
    for (int i = 0; i < dim_; ++i)
      g[i] = f * d[i];
    return g;
  }
  std::optional<SupportBall> support() const override { return SupportBall{c_, r_}; }
  std::string describe() const override {
    return "bump(c=(" + fmt(c_[0]) + "," + fmt(c_[1]) + "," + fmt(c_[2]) + "),r=" + fmt(r_) +
           ",k=" + std::to_string(k_) + ",amp=" + fmt(amp_) + ")";
  }

private:
  Point c_;
  double r_;
  int k_;
  int dim_;
  double amp_;
};

// (4 (s - r0^2)(r1^2 - s) / (r1^2 - r0^2)^2)^k with s = |x - c|^2, zero off
// the shell r0 < |x - c| < r1; peaks at 1 on the middle sphere.
class AnnulusBump final : public ScalarField {
public:
  AnnulusBump(const Point& c, double r0, double r1, int k, int dim) : c_(c), r0_(r0), r1_(r1), k_(k), dim_(dim) {
    if (!(r0 >= 0.0) || !(r1 > r0) || k < 1)
      throw Error(ErrorKind::input, "annulus bump needs 0 <= r0 < r1 and power >= 1");
    if (dim == 2)
      c_[2] = 0.0;
    norm_ = 4.0 / ((r1 * r1 - r0 * r0) * (r1 * r1 - r0 * r0));
  }

  int dim() const override { return dim_; }
  double value(const Point& p) const override {
    const double s = norm2(p - c_, dim_);
    if (s <= r0_ * r0_ || s >= r1_ * r1_)
      return 0.0;
    return std::pow(norm_ * (s - r0_ * r0_) * (r1_ * r1_ - s), k_);
  }
  Point gradient(const Point& p) const override {
    const Point d = p - c_;
    const double s = norm2(d, dim_);
    Point g = Point::Zero();
    if (s <= r0_ * r0_ || s >= r1_ * r1_)
      return g;
    const double q = norm_ * (s - r0_ * r0_) * (r1_ * r1_ - s);
    const double dq = norm_ * (r1_ * r1_ + r0_ * r0_ - 2.0 * s); // dq/ds
    const double f = 2.0 * k_ * std::pow(q, k_ - 1) * dq;
    for (int i = 0; i < dim_; ++i)
      g[i] = f * d[i];
    return g;
  }
  std::optional<SupportBall> support() const override { return SupportBall{c_, r1_}; }
  std::string describe() const override {
    return "annulus_bump(c=(" + fmt(c_[0]) + "," + fmt(c_[1]) + "," + fmt(c_[2]) + "),r0=" + fmt(r0_) +
           ",r1=" + fmt(r1_) + ",k=" + std::to_string(k_) + ")";
  }

private:
  Point c_;
  double r0_, r1_;
  int k_;
  int dim_;
  double norm_;
};

double septic(double t) {
  if (t <= 0.0)
    return 0.0;
  if (t >= 1.0)
    return 1.0;
  const double t2 = t * t, t4 = t2 * t2;
  return t4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}

double septic_slope(double t) {
  if (t <= 0.0 || t >= 1.0)
    return 0.0;
  const double u = t * (1.0 - t);
  return 140.0 * u * u * u;
}

class SmoothIndicator final : public ScalarField {
public:
  SmoothIndicator(const Point& c, double r, double w, int dim) : c_(c), r_(r), w_(w), dim_(dim) {
    if (!(w > 0.0) || !(r > 0.5 * w))
      throw Error(ErrorKind::input, "smooth indicator needs 0 < width < 2 radius");
    if (dim == 2)
      c_[2] = 0.0;
  }

  int dim() const override { return dim_; }
  double value(const Point& p) const override {
    const double rho = std::sqrt(norm2(p - c_, dim_));
    return 1.0 - septic((rho - (r_ - 0.5 * w_)) / w_);
  }
  Point gradient(const Point& p) const override {
    const Point d = p - c_;
    const double rho = std::sqrt(norm2(d, dim_));
    Point g = Point::Zero();
    const double slope = septic_slope((rho - (r_ - 0.5 * w_)) / w_);
    if (slope == 0.0)
      return g;
    for (int i = 0; i < dim_; ++i)
      g[i] = -slope / w_ * d[i] / rho;
    return g;
  }
  std::optional<SupportBall> support() const override { return SupportBall{c_, r_ + 0.5 * w_}; }
  std::string describe() const override { return "indicator(r=" + fmt(r_) + ",w=" + fmt(w_) + ")"; }

private:
  Point c_;
  double r_, w_;
  int dim_;
};

class ScaledField final : public ScalarField {
public:
  ScaledField(Field f, double t) : f_(std::move(f)), t_(t) {}
  int dim() const override { return f_->dim(); }
  double value(const Point& p) const override { return t_ * f_->value(p); }
  Point gradient(const Point& p) const override { return t_ * f_->gradient(p); }
  double value_on(const Mesh& m, std::size_t e, const ElementQuadrature& q, int i) const override {
    return t_ * f_->value_on(m, e, q, i);
  }
  Point gradient_on(const Mesh& m, std::size_t e, const ElementQuadrature& q, int i) const override {
    return t_ * f_->gradient_on(m, e, q, i);
  }
  std::optional<SupportBall> support() const override { return f_->support(); }
  std::string describe() const override { return fmt(t_) + "*" + f_->describe(); }

private:
  Field f_;
  double t_;
};

class ProductField final : public ScalarField {
public:
  ProductField(Field f, Field g) : f_(std::move(f)), g_(std::move(g)) {
    if (f_->dim() != g_->dim())
      throw Error(ErrorKind::input, "product of fields with different dimensions");
  }
  int dim() const override { return f_->dim(); }
  double value(const Point& p) const override { return f_->value(p) * g_->value(p); }
  Point gradient(const Point& p) const override {
    return f_->gradient(p) * g_->value(p) + f_->value(p) * g_->gradient(p);
  }
  double value_on(const Mesh& m, std::size_t e, const ElementQuadrature& q, int i) const override {
    return f_->value_on(m, e, q, i) * g_->value_on(m, e, q, i);
  }
  Point gradient_on(const Mesh& m, std::size_t e, const ElementQuadrature& q, int i) const override {
    return f_->gradient_on(m, e, q, i) * g_->value_on(m, e, q, i) +
           f_->value_on(m, e, q, i) * g_->gradient_on(m, e, q, i);
  }
  std::optional<SupportBall> support() const override {
    auto a = f_->support(), b = g_->support();
    if (a && b)
      return a->radius <= b->radius ? a : b;
    return a ? a : b;
  }
  std::string describe() const override { return "(" + f_->describe() + ")*(" + g_->describe() + ")"; }

private:
  Field f_, g_;
};

} // namespace

double ScalarField::value_on(const Mesh&, std::size_t, const ElementQuadrature& q, int i) const {
  return value(q.points[i]);
}

Point ScalarField::gradient_on(const Mesh&, std::size_t, const ElementQuadrature& q, int i) const {
  return gradient(q.points[i]);
}

Field analytic_field(const Expr& expr, int dim) { return std::make_shared<AnalyticField>(expr, dim); }

Field analytic_field(const std::string& source, int dim) {
  return std::make_shared<AnalyticField>(parse_expr(source, dim), dim);
}

Field nodal_field(std::shared_ptr<const Mesh> mesh, std::vector<double> values) {
  return std::make_shared<NodalField>(std::move(mesh), std::move(values));
}

Field bump_field(const Point& center, double radius, int power, int dim, double amplitude) {
  return std::make_shared<BumpField>(center, radius, power, dim, amplitude);
}

Field annulus_bump(const Point& center, double r0, double r1, int power, int dim) {
  return std::make_shared<AnnulusBump>(center, r0, r1, power, dim);
}

Field smooth_indicator(const Point& center, double radius, double width, int dim) {
  return std::make_shared<SmoothIndicator>(center, radius, width, dim);
}

Field scaled_field(Field f, double t) { return std::make_shared<ScaledField>(std::move(f), t); }

Field product_field(Field f, Field g) { return std::make_shared<ProductField>(std::move(f), std::move(g)); }

Field zero_field(int dim) { return analytic_field(Expr::constant(0.0), dim); }

double gradient_fd_error(const ScalarField& f, const std::vector<Point>& points, double step) {
  double worst = 0.0;
  const int dim = f.dim();
  for (const Point& p : points) {
    const Point g = f.gradient(p);
    Point fd = Point::Zero();
    for (int i = 0; i < dim; ++i) {
      Point a = p, b = p;
      a[i] += step;
      b[i] -= step;
      fd[i] = (f.value(a) - f.value(b)) / (2.0 * step);
    }
    const double scale = std::max(std::sqrt(norm2(g, dim)), 1.0);
    worst = std::max(worst, std::sqrt(norm2(g - fd, dim)) / scale);
  }
  return worst;
}

Multiplier make_multiplier(Field field, const Mesh& mesh, std::string id) {
  if (!field)
    throw Error(ErrorKind::input, "multiplier field is null");
  if (field->dim() != mesh.dim())
    throw Error(ErrorKind::input, "multiplier dimension does not match the mesh");
  Multiplier m;
  m.id = id.empty() ? field->describe() : std::move(id);
  double sup = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const ElementQuadrature q = mesh.quadrature(e);
    for (int i = 0; i < q.count; ++i)
      sup = std::max(sup, std::abs(field->value_on(mesh, e, q, i)));
    // Vertex values: barycentric point of the vertex itself.
    ElementQuadrature v = q;
    v.count = mesh.dim() + 1;
    for (int k = 0; k <= mesh.dim(); ++k) {
      v.points[k] = mesh.nodes()[mesh.elements()[e][k]];
      v.bary[k] = {0.0, 0.0, 0.0, 0.0};
      v.bary[k][k] = 1.0;
    }
    for (int k = 0; k < v.count; ++k)
      sup = std::max(sup, std::abs(field->value_on(mesh, e, v, k)));
  }
  m.sup_bound = sup;
  m.field = std::move(field);
  return m;
}

double energy_density(const ScalarField& a, const Point& p) { return norm2(a.gradient(p), a.dim()); }

double energy_density(const Multiplier& a, const Point& p) { return energy_density(*a.field, p); }

double dirichlet_energy(const ScalarField& f, const Mesh& mesh) {
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const ElementQuadrature q = mesh.quadrature(e);
    for (int i = 0; i < q.count; ++i)
      sum += q.weights[i] * norm2(f.gradient_on(mesh, e, q, i), mesh.dim());
  }
  return sum;
}

double multiplier_seminorm(const Multiplier& a, const Mesh& mesh) {
  return multiplier_seminorm(a, mesh, EigenOptions{});
}

double multiplier_seminorm(const Multiplier& a, const Mesh& mesh, const EigenOptions& options) {
  const SparseSymMatrix ma = assemble_energy_mass(mesh, *a.field);
  if (ma.is_zero())
    return 0.0;
  const SparseSymMatrix kpm = add(assemble_stiffness(mesh, BoundaryCondition::neumann),
                                  assemble_weighted_mass(mesh, QuadWeight{}));
  // Largest lambda of M_a v = lambda (K+M) v is 1 / smallest nu of
  // (K+M) v = nu M_a v.
  const EigResult r = solve_smallest(kpm, ma, 1, std::nullopt, options);
  return 1.0 / std::sqrt(r.eigenvalues[0]);
}

} // namespace tonekit
