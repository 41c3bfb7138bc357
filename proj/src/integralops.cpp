#include "tonekit/integralops.hpp"

#include <cmath>
#include <numbers>

namespace tonekit {

namespace {

SupportBall require_support(const ScalarField& f) {
  auto s = f.support();
  if (!s)
    throw Error(ErrorKind::input, "field " + f.describe() + " has no compact support");
  return *s;
}

void check_lambda(double lambda, int dim) {
  if (!(lambda > 0.0 && lambda < dim))
    throw Error(ErrorKind::input, "Riesz exponent must lie in (0, n)");
}

kernels::SourceSet gather(const ScalarField& f, const SupportBall& s, int level, int q, int dim) {
  kernels::SourceSet set;
  const Box box = bounding_box(s.center, s.radius, dim);
  for_each_box_node(box, level, q, [&](const Point& p, double w) {
    if (norm2(p - s.center, dim) > s.radius * s.radius)
      return;
    const double v = f.value(p);
    if (v != 0.0)
      set.push(p[0], p[1], p[2], w * v);
  });
  return set;
}

} // namespace

RieszEvaluator::RieszEvaluator(const ScalarField& f, double lambda, int level, const RieszOptions& options)
    : f_(f), lambda_(lambda), dim_(f.dim()), support_(require_support(f)), opt_(options) {
  check_lambda(lambda, dim_);
  const double cell = 2.0 * support_.radius / (1 << level);
  delta_ = opt_.delta_cells * cell;
  far_ = gather(f, support_, level, opt_.q, dim_);
  empty_ = far_.size() == 0;
}

double RieszEvaluator::operator()(const Point& x) const {
  const double target[3] = {x[0], x[1], dim_ == 3 ? x[2] : 0.0};
  double total = kernels::riesz_sum(target, far_, lambda_, delta_);
  if (empty_)
    return total;
  const double gap = std::sqrt(norm2(x - support_.center, dim_)) - support_.radius;
  if (gap >= delta_)
    return total;

  // Near ball: int_0^delta r^{n-1-lambda} (1 - S(r/delta)) int_sphere f(x + r w) dw dr
  const double expo = dim_ - 1 - lambda_;
  const bool polynomial = expo >= 0.0 && std::abs(expo - std::round(expo)) < 1e-12;
  const GaussRule& radial = gauss_legendre(opt_.near_radial);
  const GaussRule& polar = gauss_legendre(opt_.near_polar);
  const double two_pi = 2.0 * std::numbers::pi;
  const double dphi = two_pi / opt_.near_azimuth;

  auto sphere_mean = [&](double r) {
    double s = 0.0;
    Point y = x;
    if (dim_ == 2) {
      for (int k = 0; k < opt_.near_azimuth; ++k) {
        const double phi = (k + 0.5) * dphi;
        y[0] = x[0] + r * std::cos(phi);
        y[1] = x[1] + r * std::sin(phi);
        s += f_.value(y);
      }
      return s * dphi;
    }
    for (int i = 0; i < opt_.near_polar; ++i) {
      const double u = polar.nodes[i];
      const double st = std::sqrt(1.0 - u * u);
      double ring = 0.0;
      for (int k = 0; k < opt_.near_azimuth; ++k) {
        const double phi = (k + 0.5) * dphi;
        y[0] = x[0] + r * st * std::cos(phi);
        y[1] = x[1] + r * st * std::sin(phi);
        y[2] = x[2] + r * u;
        ring += f_.value(y);
      }
      s += polar.weights[i] * ring;
    }
    return s * dphi;
  };

  double near = 0.0;
  for (int k = 0; k < opt_.near_radial; ++k) {
    const double t = 0.5 * (radial.nodes[k] + 1.0);
    double r, w;
    if (polynomial) {
      r = delta_ * t;
      w = 0.5 * delta_ * radial.weights[k] * std::pow(r, expo);
    } else {
      const double m = dim_ - lambda_;
      r = delta_ * std::pow(t, 1.0 / m);
      w = 0.5 * radial.weights[k] * std::pow(delta_, m) / m;
    }
    const double cut = 1.0 - kernels::smooth_step(r / delta_);
    if (cut == 0.0)
      continue;
    near += w * cut * sphere_mean(r);
  }
  return total + near;
}

PotentialValue riesz_potential(const ScalarField& f, double lambda, const Point& x, const RieszOptions& options) {
  PotentialValue out;
  for (int level = options.min_level; level <= options.max_level; ++level) {
    const double v = RieszEvaluator(f, lambda, level, options)(x);
    out.previous = out.value;
    out.value = v;
    out.level = level;
    if (level > options.min_level &&
        (v == out.previous || std::abs(v - out.previous) <= options.rel_tol * std::abs(v))) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double green_constant(int n) {
  if (n < 3)
    throw Error(ErrorKind::input, "the Green operator is used for n >= 3");
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  return 1.0 / ((n - 2) * sphere);
}

PotentialValue green_apply(const ScalarField& f, const Point& x, const RieszOptions& options) {
  const int n = f.dim();
  const double c = green_constant(n);
  PotentialValue v = riesz_potential(f, n - 2.0, x, options);
  v.value *= c;
  v.previous *= c;
  return v;
}

CovarianceResult green_covariance_check(const MobiusMap& gamma, const Field& f, const std::vector<Point>& points,
                                        const RieszOptions& options) {
  const int n = gamma.dim();
  green_constant(n);
  const double p = 2.0 * n / (n + 2.0);
  const double r = 2.0 * n / (n - 2.0);
  const Field pushed = pullback(gamma, p, f);
  const MobiusMap inv = gamma.inverse_map();
  CovarianceResult out;
  for (const Point& x : points) {
    const PotentialValue lhs = green_apply(*pushed, x, options);
    const PotentialValue base = green_apply(*f, inv.apply(x), options);
    const double rhs = std::pow(inv.conformal_factor(x), n / r) * base.value;
    out.lhs.push_back(lhs.value);
    out.rhs.push_back(rhs);
    out.converged = out.converged && lhs.converged && base.converged;
    out.max_rel_error = std::max(out.max_rel_error, std::abs(lhs.value - rhs) / (std::abs(rhs) + 1e-12));
  }
  return out;
}

QuadratureResult hls_functional(const ScalarField& f, const ScalarField& g, double lambda, const HlsOptions& options) {
  const int n = f.dim();
  if (g.dim() != n)
    throw Error(ErrorKind::input, "HLS pair has mismatched dimensions");
  check_lambda(lambda, n);
  const SupportBall sf = require_support(f);
  const SupportBall sg = require_support(g);
  const bool disjoint = std::sqrt(norm2(sf.center - sg.center, n)) > sf.radius + sg.radius;
  QuadratureResult out;
  for (int level = options.min_level; level <= options.max_level; ++level) {
    const kernels::SourceSet outer = gather(f, sf, level, options.q, n);
    double sum = 0.0;
    if (disjoint) {
      const kernels::SourceSet inner = gather(g, sg, level, options.q, n);
      for (std::size_t i = 0; i < outer.size(); ++i) {
        const double t[3] = {outer.x[i], outer.y[i], outer.z[i]};
        sum += outer.w[i] * kernels::riesz_sum(t, inner, lambda, 0.0);
      }
    } else {
      RieszOptions ro = options.inner;
      ro.q = options.q;
      const RieszEvaluator potential(g, lambda, level, ro);
      for (std::size_t i = 0; i < outer.size(); ++i)
        sum += outer.w[i] * potential(Point(outer.x[i], outer.y[i], outer.z[i]));
    }
    out.previous = out.value;
    out.value = sum;
    out.level = level;
    if (level > options.min_level &&
        (sum == out.previous || std::abs(sum - out.previous) <= options.rel_tol * std::abs(sum))) {
      out.converged = true;
      break;
    }
  }
  return out;
}

InvarianceResult hls_invariance_check(const MobiusMap& gamma, const Field& f, const Field& g, double lambda,
                                      const HlsOptions& options) {
  const int n = gamma.dim();
  if (n < 3)
    throw Error(ErrorKind::input, "conformal invariance checks need n >= 3");
  const double p = 2.0 * n / (2.0 * n - lambda);
  const QuadratureResult ref = hls_functional(*f, *g, lambda, options);
  const QuadratureResult tr = hls_functional(*pullback(gamma, p, f), *pullback(gamma, p, g), lambda, options);
  InvarianceResult r;
  r.reference = ref.value;
  r.transformed = tr.value;
  r.rel_error = std::abs(tr.value - ref.value) / (std::abs(ref.value) + 1e-12);
  r.level = std::max(ref.level, tr.level);
  r.converged = ref.converged && tr.converged;
  return r;
}

} // namespace tonekit
