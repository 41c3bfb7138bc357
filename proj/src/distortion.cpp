#include "tonekit/distortion.hpp"

#include "tonekit/report.hpp"
#include "tonekit/tones.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace tonekit {

double direct_distortion(const Map& gamma, const std::vector<Point>& samples) {
  const int n = gamma.dim();
  double worst = 0.0;
  int sign = 0;
  for (const Point& x : samples) {
    const Jacobian j = gamma.jacobian(x);
    const double det = determinant(j, n);
    if (det == 0.0 || !std::isfinite(det))
      throw Error(ErrorKind::singular_point, "Jacobian is singular at a sample point");
    const int s = det > 0.0 ? 1 : -1;
    if (sign != 0 && s != sign)
      throw Error(ErrorKind::not_bounded_distortion, "Jacobian determinant changes sign across the samples");
    sign = s;
    worst = std::max(worst, spectral_norm(j, n) / std::pow(std::abs(det), 1.0 / n));
  }
  return worst;
}

std::vector<Point> sample_domain(const DomainSpec& domain, int per_axis, double margin) {
  const int n = domain.dim();
  Point lo = Point::Zero(), hi = Point::Zero();
  switch (domain.kind) {
  case DomainSpec::Kind::square:
    hi << domain.a, domain.a, 0.0;
    break;
  case DomainSpec::Kind::rect:
    hi << domain.a, domain.b, 0.0;
    break;
  case DomainSpec::Kind::box:
    hi << domain.a, domain.b, domain.c;
    break;
  case DomainSpec::Kind::annulus:
    lo = domain.center - Point::Constant(domain.b);
    hi = domain.center + Point::Constant(domain.b);
    break;
  default:
    lo = domain.center - Point::Constant(domain.a);
    hi = domain.center + Point::Constant(domain.a);
  }
  std::vector<Point> out;
  const int nz = n == 3 ? per_axis : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < per_axis; ++j)
      for (int i = 0; i < per_axis; ++i) {
        Point p = Point::Zero();
        const int idx[3] = {i, j, k};
        for (int d = 0; d < n; ++d)
          p[d] = lo[d] + (hi[d] - lo[d]) * (idx[d] + 0.5) / per_axis;
        if (domain.contains(p, margin))
          out.push_back(p);
      }
  return out;
}

namespace {

std::vector<Point> sphere_points(const Point& c, double r, int dim) {
  std::vector<Point> out{c};
  if (dim == 2) {
    for (int k = 0; k < 64; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 64;
      out.push_back(c + r * Point(std::cos(t), std::sin(t), 0.0));
    }
    return out;
  }
  for (int i = 0; i <= 16; ++i) {
    const double th = std::numbers::pi * i / 16;
    for (int k = 0; k < 32; ++k) {
      const double ph = 2.0 * std::numbers::pi * k / 32;
      out.push_back(c + r * Point(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)));
    }
  }
  return out;
}

} // namespace

bool ball_in_image(const Map& gamma_inverse, const DomainSpec& domain, const Point& c, double r, double margin) {
  for (const Point& p : sphere_points(c, r * (1.0 + margin), domain.dim())) {
    Point q;
    try {
      q = gamma_inverse.apply(p);
    } catch (const Error&) {
      return false;
    }
    if (!q.allFinite() || !domain.contains(q))
      return false;
  }
  return true;
}

BallFamily default_ball_family(const Map& gamma, const DomainSpec& domain, std::size_t max_balls) {
  const int n = domain.dim();
  const MapPtr inv = gamma.inverse();
  Point lo = Point::Constant(HUGE_VAL), hi = Point::Constant(-HUGE_VAL);
  for (const Point& p : sample_domain(domain, n == 2 ? 65 : 21)) {
    const Point q = gamma.apply(p);
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  double extent = HUGE_VAL;
  for (int d = 0; d < n; ++d)
    extent = std::min(extent, hi[d] - lo[d]);
  BallFamily family;
  family.dim = n;
  if (!(extent > 0.0) || !std::isfinite(extent))
    return family;
  const std::size_t per_radius = std::max<std::size_t>(1, max_balls / 3);
  for (int level = 2; level <= 4; ++level) {
    const double r = extent / std::pow(2.0, level);
    std::vector<Point> centers;
    const int cells = static_cast<int>(std::floor((hi[0] - lo[0]) / r + 1e-9));
    const int rows = static_cast<int>(std::floor((hi[1] - lo[1]) / r + 1e-9));
    const int layers = n == 3 ? static_cast<int>(std::floor((hi[2] - lo[2]) / r + 1e-9)) : 0;
    for (int k = 0; k <= layers; ++k)
      for (int j = 0; j <= rows; ++j)
        for (int i = 0; i <= cells; ++i) {
          Point c(lo[0] + i * r, lo[1] + j * r, n == 3 ? lo[2] + k * r : 0.0);
          if (ball_in_image(*inv, domain, c, r))
            centers.push_back(c);
        }
    const std::size_t take = std::min(per_radius, centers.size());
    for (std::size_t t = 0; t < take; ++t)
      family.add(centers[t * centers.size() / take + centers.size() / (2 * take)], r);
  }
  return family;
}

std::vector<Point> default_directions(int dim, int count) {
  std::vector<Point> out;
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = std::numbers::pi * k / count;
      out.emplace_back(std::cos(t), std::sin(t), 0.0);
    }
    return out;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - (k + 0.5) / count;
    const double s = std::sqrt(1.0 - z * z);
    out.emplace_back(s * std::cos(golden * k), s * std::sin(golden * k), z);
  }
  return out;
}

namespace {

void one_pass(const Map& gamma, const BallFamily& balls, const std::vector<Point>& directions,
              const SpectralOptions& opt, bool inverse_pass, SpectralDistortion& out) {
  const int n = gamma.dim();
  const MapPtr inv = gamma.inverse();
  for (std::size_t b = 0; b < balls.size(); ++b) {
    const Point& c = balls.centers[b];
    const double r = balls.radii[b];
    try {
      const DomainSpec spec = n == 2 ? DomainSpec::disk(r, c) : DomainSpec::ball(r, c);
      const Mesh mesh_b = build_mesh(spec, opt.h * r);
      const Mesh mesh_a = map_mesh(mesh_b, *inv);
      // The eikonal weight is exactly the Lebesgue mass, the same for all u.
      const double mu_num =
          weighted_spectrum(mesh_b, QuadWeight{}, BoundaryCondition::neumann, 1, opt.eigen).eigenvalues[0];
      for (const Point& u : directions) {
        const QuadWeight w = [&](std::size_t, const ElementQuadrature& q, int i) {
          return norm2(gamma.jacobian(q.points[i]).transpose() * u, n);
        };
        const double mu_den =
            weighted_spectrum(mesh_a, w, BoundaryCondition::neumann, 1, opt.eigen).eigenvalues[0];
        RatioRow row;
        row.ball = b;
        row.center = c;
        row.radius = r;
        row.direction = u;
        row.mu_num = mu_num;
        row.mu_den = mu_den;
        row.ratio = mu_num / mu_den;
        row.inverse = inverse_pass;
        out.rows.push_back(row);
        out.k_spec = std::max(out.k_spec, std::sqrt(row.ratio));
      }
    } catch (const Error& e) {
      out.failures.push_back(std::string(inverse_pass ? "inverse " : "") + "ball " + std::to_string(b) + ": " +
                             e.what());
    }
  }
  out.family_size += balls.size();
  out.directions = directions.size();
}

} // namespace

SpectralDistortion spectral_distortion(const Map& gamma, const DomainSpec&, const BallFamily& balls,
                                       const std::vector<Point>& directions, const SpectralOptions& options) {
  if (balls.size() == 0 || directions.empty())
    throw Error(ErrorKind::input, "spectral distortion needs at least one ball and one direction");
  SpectralDistortion out;
  one_pass(gamma, balls, directions, options, false, out);
  if (out.rows.empty())
    throw Error(ErrorKind::convergence, "no ball of the family produced a tone ratio");
  return out;
}

SpectralDistortion spectral_distortion_two_sided(const Map& gamma, const DomainSpec& domain,
                                                 const BallFamily& forward, const BallFamily& backward,
                                                 const std::vector<Point>& directions,
                                                 const SpectralOptions& options) {
  SpectralDistortion out = spectral_distortion(gamma, domain, forward, directions, options);
  if (backward.size() == 0)
    throw Error(ErrorKind::input, "inverse pass needs at least one ball");
  one_pass(*gamma.inverse(), backward, directions, options, true, out);
  return out;
}

double bracket_constant(int n) {
  return std::sqrt(static_cast<double>(n) / (n - 1)) * std::pow(sphere_volume(n) / ball_volume(n), 1.0 / n);
}

DistortionReport bracket_check(double k_dir, double k_spec, int dim, std::size_t family_size, double tau) {
  DistortionReport r;
  r.k_dir = k_dir;
  r.k_spec = k_spec;
  r.c_n = bracket_constant(dim);
  r.tau = tau;
  r.spec_below_dir = k_spec <= k_dir * (1.0 + tau);
  r.dir_below_spec = k_dir <= r.c_n * k_spec * (1.0 + tau);
  r.family_size = family_size;
  return r;
}

void write_ratio_csv(std::ostream& out, const std::vector<RatioRow>& rows, int dim) {
  CsvWriter csv(out);
  csv.row({"pass", "ball_center", "radius", "direction", "mu_num", "mu_den", "ratio"});
  auto vec = [&](const Point& p) {
    std::string s;
    for (int d = 0; d < dim; ++d)
      s += (d ? "," : "") + format_double(p[d]);
    return s;
  };
  for (const RatioRow& r : rows)
    csv.row({r.inverse ? "inverse" : "forward", vec(r.center), format_double(r.radius), vec(r.direction),
             format_double(r.mu_num), format_double(r.mu_den), format_double(r.ratio)});
}

} // namespace tonekit
