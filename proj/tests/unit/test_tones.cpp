#include "tonekit/tones.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tonekit;

namespace {

constexpr double pi = std::numbers::pi;

const BoundReport& find(const std::vector<BoundReport>& r, const std::string& name) {
  for (const BoundReport& b : r)
    if (b.name == name)
      return b;
  FAIL("missing bound " << name);
  return r.front();
}

} // namespace

TEST_CASE("bessel critical points") {
  for (int n = 2; n <= 6; ++n)
    CHECK(bessel_cn(n) == doctest::Approx(oracle::bessel_critical_point(n)).epsilon(1e-8));
  CHECK(bessel_cn(2) == doctest::Approx(1.84118).epsilon(1e-5));
  CHECK(bessel_cn(3) == doctest::Approx(2.08158).epsilon(1e-5));
  for (int n = 2; n <= 10; ++n) {
    const double c = bessel_cn(n);
    CHECK(c * c >= n - 1);
  }
  CHECK_THROWS_AS(bessel_cn(1), Error);
}

TEST_CASE("ball and sphere volumes") {
  CHECK(ball_volume(2) == doctest::Approx(pi).epsilon(1e-15));
  CHECK(ball_volume(3) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-15));
  CHECK(sphere_volume(2) == doctest::Approx(4.0 * pi).epsilon(1e-15));
  CHECK(sphere_volume(3) == doctest::Approx(2.0 * pi * pi).epsilon(1e-15));
  const double c2 = oracle::bessel_critical_point(2);
  CHECK(effective_conformal_volume(2) == doctest::Approx(pi * c2 * c2 / 2.0).epsilon(1e-8));
  // The effective volume sits below the sphere volume in low dimension.
  for (int n = 2; n <= 4; ++n)
    CHECK(effective_conformal_volume(n) < sphere_volume(n));
}

TEST_CASE("neumann tone of a linear multiplier") {
  const Mesh sq = build_mesh(DomainSpec::square(1.0), 1.0 / 32);
  const ToneResult t = fundamental_tone(sq, make_multiplier(analytic_field("x", 2), sq, "x1"), BoundaryCondition::neumann);
  CHECK(t.mu1 == doctest::Approx(pi * pi).epsilon(0.01));
  CHECK(t.residual < 1e-8);
  CHECK(t.multiplier == "x1");
  CHECK(t.dofs == sq.num_nodes());

  // Scaling a by s divides the tone by s^2.
  const ToneResult t3 = fundamental_tone(sq, make_multiplier(analytic_field("3*x", 2), sq), BoundaryCondition::neumann);
  CHECK(t3.mu1 == doctest::Approx(t.mu1 / 9.0).epsilon(1e-8));

  // Scaling law on disks.
  const Mesh d1 = build_mesh(DomainSpec::disk(1.0), 1.0 / 24);
  const Mesh d2 = build_mesh(DomainSpec::disk(2.0), 2.0 / 24);
  const double m1 = fundamental_tone(d1, make_multiplier(analytic_field("x", 2), d1), BoundaryCondition::neumann).mu1;
  const double m2 = fundamental_tone(d2, make_multiplier(analytic_field("x", 2), d2), BoundaryCondition::neumann).mu1;
  CHECK(m1 / m2 == doctest::Approx(4.0).epsilon(1e-10));
  const double c2 = oracle::bessel_critical_point(2);
  CHECK(m1 == doctest::Approx(c2 * c2).epsilon(0.02));
}

TEST_CASE("constant multipliers are rejected") {
  const Mesh sq = build_mesh(DomainSpec::square(1.0), 0.25);
  CHECK_THROWS_WITH_AS(fundamental_tone(sq, make_multiplier(analytic_field("5", 2), sq), BoundaryCondition::neumann),
                       doctest::Contains("constant"), Error);
}

TEST_CASE("bound suite on the unit square with a = x") {
  const Mesh sq = build_mesh(DomainSpec::square(1.0), 1.0 / 16);
  const std::vector<BoundReport> r = check_bounds(sq, make_multiplier(analytic_field("x", 2), sq, "x"));
  REQUIRE(r.size() == 9);
  for (const BoundReport& b : r) {
    CHECK_MESSAGE(b.pass, b.name);
    CHECK(b.slack == doctest::Approx(b.rhs - b.lhs));
    CHECK(b.multiplier == "x");
  }
  const BoundReport& p = find(r, "persistence");
  // mu1(U, a) = mu1(U) here, and eta = 1.
  CHECK(p.rhs == doctest::Approx(p.lhs * (1.0 + p.rhs)).epsilon(1e-8));
  // G = 1 and D[a] = 1 make the lower two-sided bound an equality.
  CHECK(std::abs(find(r, "potential_gap_lower").slack) < 1e-10);
  CHECK(find(r, "el_soufi_ilias").rhs == doctest::Approx(2.0 * 4.0 * pi).epsilon(1e-14));
  CHECK(find(r, "colbois_el_soufi_savo").rhs == doctest::Approx(8.0 * pi).epsilon(1e-12));
}

TEST_CASE("bound slack is relative to the right-hand side") {
  CHECK(make_report("b", 1.0 + 5e-10, 1.0, 0.1, "a").pass);
  CHECK_FALSE(make_report("b", 1.0 + 2e-9, 1.0, 0.1, "a").pass);
  CHECK(make_report("b", 100.0 + 5e-8, 100.0, 0.1, "a").pass);
}

TEST_CASE("dirichlet spectrum equivalence") {
  const Mesh ball = build_mesh(DomainSpec::ball(1.0), 0.25);
  const Multiplier a = make_multiplier(analytic_field("x", 3), ball, "x1");
  const SpectrumComparison t = dirichlet_spectrum_equivalence(ball, a, MobiusMap::translation(Point(0.5, -1, 2), 3), 3);
  CHECK(t.max_rel_gap < 1e-10);
  const SpectrumComparison d = dirichlet_spectrum_equivalence(ball, a, MobiusMap::dilation(0.3, 3), 3);
  CHECK(d.max_rel_gap < 1e-10);

  // A word with an inversion bends the mesh, so the gap is a genuine
  // discretization error and shrinks under refinement.
  const MobiusMap word = MobiusMap::inversion(3).then(MobiusMap::translation(Point(3, 0, 0), 3));
  const double coarse = dirichlet_spectrum_equivalence(ball, a, word, 3).max_rel_gap;
  const Mesh fine_ball = build_mesh(DomainSpec::ball(1.0), 0.18);
  const double fine =
      dirichlet_spectrum_equivalence(fine_ball, make_multiplier(analytic_field("x", 3), fine_ball), word, 3).max_rel_gap;
  CHECK(coarse > 1e-4);
  CHECK(fine < coarse);
  CHECK(coarse < 0.05);
}
