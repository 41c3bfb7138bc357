#include "tonekit/fields.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tonekit;

namespace {

std::vector<Point> probe_points(int dim) {
  std::vector<Point> pts;
  for (int i = 0; i < 40; ++i) {
    const double t = 0.37 * i;
    pts.emplace_back(0.8 * std::cos(t) * std::sin(1.3 * t), 0.8 * std::sin(t), dim == 3 ? 0.5 * std::cos(2.1 * t) : 0.0);
  }
  return pts;
}

} // namespace

TEST_CASE("gradients of every field kind match finite differences") {
  const std::vector<Point> p3 = probe_points(3);
  CHECK(gradient_fd_error(*analytic_field("x*y*z + sin(x)", 3), p3) < 1e-7);
  CHECK(gradient_fd_error(*bump_field(Point(0.1, 0, 0), 1.0, 3, 3), p3) < 1e-7);
  CHECK(gradient_fd_error(*smooth_indicator(Point::Zero(), 0.6, 0.3, 3), p3) < 1e-6);
  CHECK(gradient_fd_error(*annulus_bump(Point::Zero(), 0.3, 0.9, 3, 3), p3) < 1e-6);
  CHECK(gradient_fd_error(*product_field(analytic_field("x + z", 3), bump_field(Point::Zero(), 1.0, 2, 3)), p3) < 1e-7);
  CHECK(gradient_fd_error(*scaled_field(analytic_field("y^2", 3), -3.0), p3) < 1e-7);
}

TEST_CASE("field values") {
  const Field b = bump_field(Point::Zero(), 2.0, 2, 2, 3.0);
  CHECK(b->value(Point::Zero()) == doctest::Approx(3.0));
  CHECK(b->value(Point(1, 0, 0)) == doctest::Approx(3.0 * 0.75 * 0.75));
  CHECK(b->value(Point(2.5, 0, 0)) == 0.0);
  REQUIRE(b->support());
  CHECK(b->support()->radius == 2.0);

  const Field s = smooth_indicator(Point::Zero(), 1.0, 0.2, 3);
  CHECK(s->value(Point(0.85, 0, 0)) == 1.0);
  CHECK(s->value(Point(1.15, 0, 0)) == 0.0);
  CHECK(s->value(Point(1.0, 0, 0)) == doctest::Approx(0.5));

  const Field a = annulus_bump(Point::Zero(), 0.5, 1.0, 2, 3);
  CHECK(a->value(Point(std::sqrt(0.625), 0, 0)) == doctest::Approx(1.0));
  CHECK(a->value(Point(0.2, 0, 0)) == 0.0);
  CHECK(zero_field(2)->value(Point(1, 1, 0)) == 0.0);
}

TEST_CASE("nodal fields interpolate on their own mesh") {
  auto mesh = std::make_shared<const Mesh>(build_mesh(DomainSpec::square(1.0), 0.25));
  std::vector<double> v;
  for (const Point& p : mesh->nodes())
    v.push_back(2.0 * p[0] - p[1]);
  const Field f = nodal_field(mesh, v);
  // A linear field is reproduced exactly by P1 interpolation.
  CHECK(dirichlet_energy(*f, *mesh) == doctest::Approx(5.0).epsilon(1e-13));
  const ElementQuadrature q = mesh->quadrature(3);
  const Point g = f->gradient_on(*mesh, 3, q, 0);
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(-1.0));
  CHECK_THROWS_AS(f->value(Point(0.5, 0.5, 0)), Error);
  CHECK_THROWS_AS(nodal_field(mesh, {1.0, 2.0}), Error);
}

TEST_CASE("multipliers, energy and seminorm") {
  const Mesh mesh = build_mesh(DomainSpec::square(1.0), 1.0 / 16);
  const Multiplier x = make_multiplier(analytic_field("x", 2), mesh, "x");
  CHECK(x.sup_bound == doctest::Approx(1.0));
  CHECK(x.id == "x");
  CHECK(energy_density(x, Point(0.3, 0.2, 0)) == 1.0);
  CHECK(dirichlet_energy(*x.field, mesh) == doctest::Approx(1.0).epsilon(1e-12));
  // For a = x, Gamma[a] = dx and the embedding H^1 -> L^2 has norm 1,
  // attained on constants.
  CHECK(multiplier_seminorm(x, mesh) == doctest::Approx(1.0).epsilon(1e-12));

  // Scaling a by t scales the seminorm by |t|.
  const Multiplier y3 = make_multiplier(analytic_field("3*x", 2), mesh, "3x");
  CHECK(multiplier_seminorm(y3, mesh) == doctest::Approx(3.0).epsilon(1e-12));

  const Multiplier c = make_multiplier(analytic_field("2", 2), mesh, "2");
  CHECK(multiplier_seminorm(c, mesh) == 0.0);
}
