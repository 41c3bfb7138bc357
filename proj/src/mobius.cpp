#include "tonekit/mobius.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace tonekit {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_dim(int dim) {
  if (dim != 2 && dim != 3)
    throw Error(ErrorKind::input, "Mobius maps are implemented for dimension 2 and 3");
}

Jacobian inversion_derivative(const Point& x, int dim) {
  const double r2 = norm2(x, dim);
  Jacobian d = Jacobian::Identity();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      d(i, j) = ((i == j ? 1.0 : 0.0) - 2.0 * x[i] * x[j] / r2) / r2;
  return d;
}

} // namespace

MobiusMap::MobiusMap(int dim, std::vector<Generator> word) : dim_(dim), word_(std::move(word)) {
  check_dim(dim);
  for (const Generator& g : word_) {
    if (g.kind == Generator::Kind::dilate && !(g.s > 0.0 && std::isfinite(g.s)))
      throw Error(ErrorKind::input, "dilation factor must be positive");
    if (g.kind == Generator::Kind::rotate) {
      const auto block = g.r.topLeftCorner(dim, dim);
      const double err = (block.transpose() * block - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
      if (err > 1e-10)
        throw Error(ErrorKind::input, "rotation matrix is not orthogonal");
    }
  }
}

MobiusMap MobiusMap::translation(const Point& v, int dim) {
  Generator g;
  g.kind = Generator::Kind::translate;
  g.v = v;
  if (dim == 2)
    g.v[2] = 0.0;
  return MobiusMap(dim, {g});
}

MobiusMap MobiusMap::rotation(const Jacobian& r, int dim) {
  Generator g;
  g.kind = Generator::Kind::rotate;
  g.r = Jacobian::Identity();
  g.r.topLeftCorner(dim, dim) = r.topLeftCorner(dim, dim);
  return MobiusMap(dim, {g});
}

MobiusMap MobiusMap::dilation(double s, int dim) {
  Generator g;
  g.kind = Generator::Kind::dilate;
  g.s = s;
  return MobiusMap(dim, {g});
}

MobiusMap MobiusMap::inversion(int dim) {
  Generator g;
  g.kind = Generator::Kind::invert;
  return MobiusMap(dim, {g});
}

MobiusMap MobiusMap::then(const MobiusMap& next) const {
  if (next.dim_ != dim_)
    throw Error(ErrorKind::input, "cannot compose maps of different dimensions");
  std::vector<Generator> w = word_;
  w.insert(w.end(), next.word_.begin(), next.word_.end());
  MobiusMap out(dim_, std::move(w));
  out.pole_tol_ = std::max(pole_tol_, next.pole_tol_);
  return out;
}

Point MobiusMap::apply(const Point& x) const {
  Point y = x;
  if (dim_ == 2)
    y[2] = 0.0;
  for (const Generator& g : word_) {
    switch (g.kind) {
    case Generator::Kind::translate: y += g.v; break;
    case Generator::Kind::rotate: y = g.r * y; break;
    case Generator::Kind::dilate: y *= g.s; break;
    case Generator::Kind::invert: {
      const double r2 = norm2(y, dim_);
      if (std::sqrt(r2) <= pole_tol_)
        throw Error(ErrorKind::singular_point, "point lies on the pole of an inversion");
      y /= r2;
      break;
    }
    }
  }
  return y;
}

Jacobian MobiusMap::jacobian(const Point& x) const {
  Point y = x;
  if (dim_ == 2)
    y[2] = 0.0;
  Jacobian j = Jacobian::Identity();
  for (const Generator& g : word_) {
    switch (g.kind) {
    case Generator::Kind::translate: y += g.v; break;
    case Generator::Kind::rotate:
      j = g.r * j;
      y = g.r * y;
      break;
    case Generator::Kind::dilate: {
      Jacobian d = Jacobian::Identity();
      d.topLeftCorner(dim_, dim_) *= g.s;
      j = d * j;
      y *= g.s;
      break;
    }
    case Generator::Kind::invert: {
      const double r2 = norm2(y, dim_);
      if (std::sqrt(r2) <= pole_tol_)
        throw Error(ErrorKind::singular_point, "point lies on the pole of an inversion");
      j = inversion_derivative(y, dim_) * j;
      y /= r2;
      break;
    }
    }
  }
  return j;
}

double MobiusMap::jacobian_det(const Point& x) const {
  Point y = x;
  if (dim_ == 2)
    y[2] = 0.0;
  double det = 1.0;
  for (const Generator& g : word_) {
    switch (g.kind) {
    case Generator::Kind::translate: y += g.v; break;
    case Generator::Kind::rotate:
      det *= determinant(g.r, dim_);
      y = g.r * y;
      break;
    case Generator::Kind::dilate:
      det *= std::pow(g.s, dim_);
      y *= g.s;
      break;
    case Generator::Kind::invert: {
      const double r2 = norm2(y, dim_);
      if (std::sqrt(r2) <= pole_tol_)
        throw Error(ErrorKind::singular_point, "point lies on the pole of an inversion");
      det *= -std::pow(r2, -dim_);
      y /= r2;
      break;
    }
    }
  }
  return det;
}

double MobiusMap::conformal_factor(const Point& x) const {
  Point y = x;
  if (dim_ == 2)
    y[2] = 0.0;
  double lambda = 1.0;
  for (const Generator& g : word_) {
    switch (g.kind) {
    case Generator::Kind::translate: y += g.v; break;
    case Generator::Kind::rotate: y = g.r * y; break;
    case Generator::Kind::dilate:
      lambda *= g.s;
      y *= g.s;
      break;
    case Generator::Kind::invert: {
      const double r2 = norm2(y, dim_);
      if (std::sqrt(r2) <= pole_tol_)
        throw Error(ErrorKind::singular_point, "point lies on the pole of an inversion");
      lambda /= r2;
      y /= r2;
      break;
    }
    }
  }
  return lambda;
}

Point MobiusMap::grad_log_conformal_factor(const Point& x) const {
  // sum over inversions of J_{prefix}^T grad log(1/|y|^2) at the prefix image
  Point y = x;
  if (dim_ == 2)
    y[2] = 0.0;
  Jacobian j = Jacobian::Identity();
  Point grad = Point::Zero();
  for (const Generator& g : word_) {
    switch (g.kind) {
    case Generator::Kind::translate: y += g.v; break;
    case Generator::Kind::rotate:
      j = g.r * j;
      y = g.r * y;
      break;
    case Generator::Kind::dilate: {
      Jacobian d = Jacobian::Identity();
      d.topLeftCorner(dim_, dim_) *= g.s;
      j = d * j;
      y *= g.s;
      break;
    }
    case Generator::Kind::invert: {
      const double r2 = norm2(y, dim_);
      if (std::sqrt(r2) <= pole_tol_)
        throw Error(ErrorKind::singular_point, "point lies on the pole of an inversion");
      grad += j.transpose() * (-2.0 * y / r2);
      j = inversion_derivative(y, dim_) * j;
      y /= r2;
      break;
    }
    }
  }
  if (dim_ == 2)
    grad[2] = 0.0;
  return grad;
}

MobiusMap MobiusMap::inverse_map() const {
  std::vector<Generator> w;
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) {
    Generator g = *it;
    switch (g.kind) {
    case Generator::Kind::translate: g.v = -g.v; break;
    case Generator::Kind::rotate: g.r.transposeInPlace(); break;
    case Generator::Kind::dilate: g.s = 1.0 / g.s; break;
    case Generator::Kind::invert: break;
    }
    w.push_back(g);
  }
  MobiusMap out(dim_, std::move(w));
  out.pole_tol_ = pole_tol_;
  return out;
}

MapPtr MobiusMap::inverse() const { return std::make_shared<MobiusMap>(inverse_map()); }

SupportBall MobiusMap::image(const SupportBall& ball) const {
  Point c = ball.center;
  if (dim_ == 2)
    c[2] = 0.0;
  double r = ball.radius;
  for (const Generator& g : word_) {
    switch (g.kind) {
    case Generator::Kind::translate: c += g.v; break;
    case Generator::Kind::rotate: c = g.r * c; break;
    case Generator::Kind::dilate:
      c *= g.s;
      r *= g.s;
      break;
    case Generator::Kind::invert: {
      const double c2 = norm2(c, dim_);
      if (std::sqrt(c2) <= r + pole_tol_)
        throw Error(ErrorKind::singular_point, "ball contains the pole of an inversion");
      const double d = c2 - r * r;
      c /= d;
      r /= d;
      break;
    }
    }
  }
  return {c, r};
}

std::string MobiusMap::serialize() const {
  std::string out;
  for (const Generator& g : word_) {
    switch (g.kind) {
    case Generator::Kind::translate:
      out += "translate";
      for (int i = 0; i < dim_; ++i)
        out += " " + fmt(g.v[i]);
      break;
    case Generator::Kind::rotate:
      out += "rotate";
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
          out += " " + fmt(g.r(i, j));
      break;
    case Generator::Kind::dilate: out += "dilate " + fmt(g.s); break;
    case Generator::Kind::invert: out += "invert"; break;
    }
    out += "\n";
  }
  return out;
}

MobiusMap MobiusMap::parse(const std::string& text, int dim) {
  check_dim(dim);
  std::istringstream in(text);
  std::string line;
  std::vector<Generator> word;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.resize(hash);
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name))
      continue;
    std::vector<double> args;
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (*end != '\0')
        throw ParseError("bad number '" + tok + "'", line_no, 1);
      args.push_back(v);
    }
    Generator g;
    auto need = [&](std::size_t n) {
      if (args.size() != n)
        throw ParseError("'" + name + "' expects " + std::to_string(n) + " numbers", line_no, 1);
    };
    if (name == "translate") {
      need(dim);
      g.kind = Generator::Kind::translate;
      for (int i = 0; i < dim; ++i)
        g.v[i] = args[i];
    } else if (name == "rotate") {
      need(static_cast<std::size_t>(dim * dim));
      g.kind = Generator::Kind::rotate;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          g.r(i, j) = args[i * dim + j];
    } else if (name == "dilate") {
      need(1);
      g.kind = Generator::Kind::dilate;
      g.s = args[0];
    } else if (name == "invert") {
      need(0);
      g.kind = Generator::Kind::invert;
    } else {
      throw ParseError("unknown generator '" + name + "' (expected translate, rotate, dilate, invert)", line_no, 1);
    }
    word.push_back(g);
  }
  return MobiusMap(dim, std::move(word));
}

namespace {

class PullbackField final : public ScalarField {
public:
  PullbackField(const MobiusMap& gamma, double p, Field f)
      : inv_(gamma.inverse_map()), f_(std::move(f)) {
    if (!(p >= 1.0))
      throw Error(ErrorKind::input, "pullback exponent must lie in [1, infinity]");
    if (f_->dim() != gamma.dim())
      throw Error(ErrorKind::input, "field and map dimensions differ");
    expo_ = std::isinf(p) ? 0.0 : gamma.dim() / p;
    p_ = p;
    if (auto s = f_->support())
      support_ = gamma.image(*s);
  }

  int dim() const override { return f_->dim(); }

  double value(const Point& y) const override {
    if (outside(y))
      return 0.0;
    const double v = f_->value(inv_.apply(y));
    if (expo_ == 0.0)
      return v;
    return std::pow(inv_.conformal_factor(y), expo_) * v;
  }

  Point gradient(const Point& y) const override {
    if (outside(y))
      return Point::Zero();
    const Point x = inv_.apply(y);
    const Point gf = inv_.jacobian(y).transpose() * f_->gradient(x);
    if (expo_ == 0.0)
      return gf;
    const double scale = std::pow(inv_.conformal_factor(y), expo_);
    return scale * (expo_ * f_->value(x) * inv_.grad_log_conformal_factor(y) + gf);
  }

  std::optional<SupportBall> support() const override { return support_; }

  std::string describe() const override {
    return "pullback(p=" + (std::isinf(p_) ? std::string("inf") : fmt(p_)) + ", " + f_->describe() + ")";
  }

private:
  bool outside(const Point& y) const {
    if (!support_)
      return false;
    return norm2(y - support_->center, dim()) > support_->radius * support_->radius;
  }

  MobiusMap inv_;
  Field f_;
  double expo_ = 0.0;
  double p_ = 1.0;
  std::optional<SupportBall> support_;
};

SupportBall require_support(const ScalarField& f) {
  auto s = f.support();
  if (!s)
    throw Error(ErrorKind::input, "field " + f.describe() + " has no compact support");
  return *s;
}

void require_dim3(int dim) {
  if (dim < 3)
    throw Error(ErrorKind::input, "conformal invariance checks need n >= 3");
}

InvarianceResult compare(const QuadratureResult& ref, const QuadratureResult& tr) {
  InvarianceResult r;
  r.reference = ref.value;
  r.transformed = tr.value;
  r.rel_error = std::abs(tr.value - ref.value) / (std::abs(ref.value) + 1e-12);
  r.level = std::max(ref.level, tr.level);
  r.converged = ref.converged && tr.converged;
  return r;
}

} // namespace

Field pullback(const MobiusMap& gamma, double p, Field f) {
  return std::make_shared<PullbackField>(gamma, p, std::move(f));
}

QuadratureResult dirichlet_integral(const ScalarField& f, const QuadratureOptions& options) {
  const SupportBall s = require_support(f);
  const int dim = f.dim();
  return integrate_box_adaptive(
      bounding_box(s.center, s.radius, dim), [&](const Point& p) { return norm2(f.gradient(p), dim); }, options);
}

InvarianceResult energy_invariance_check(const MobiusMap& gamma, const Field& f, const QuadratureOptions& options) {
  const int n = gamma.dim();
  require_dim3(n);
  const double r = 2.0 * n / (n - 2.0);
  const Field pulled = pullback(gamma, r, f);
  return compare(dirichlet_integral(*f, options), dirichlet_integral(*pulled, options));
}

InvarianceResult energy_measure_flow_check(const MobiusMap& gamma, const Field& a, const Field& b,
                                           const QuadratureOptions& options) {
  const int n = gamma.dim();
  require_dim3(n);
  const SupportBall sb = require_support(*b);
  const double r = 2.0 * n / (n - 2.0);
  const QuadratureResult lhs = integrate_box_adaptive(
      bounding_box(sb.center, sb.radius, n),
      [&](const Point& x) {
        if (norm2(x - sb.center, n) > sb.radius * sb.radius)
          return 0.0;
        const double bx = b->value(x);
        if (bx == 0.0)
          return 0.0;
        const Point g = gamma.jacobian(x).transpose() * a->gradient(gamma.apply(x));
        return bx * bx * norm2(g, n);
      },
      options);
  const Field pb = pullback(gamma, r, b);
  const SupportBall sp = *pb->support();
  const QuadratureResult rhs = integrate_box_adaptive(
      bounding_box(sp.center, sp.radius, n),
      [&](const Point& y) {
        const double v = pb->value(y);
        if (v == 0.0)
          return 0.0;
        return v * v * energy_density(*a, y);
      },
      options);
  return compare(lhs, rhs);
}

} // namespace tonekit
