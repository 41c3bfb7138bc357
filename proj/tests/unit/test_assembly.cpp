#include "tonekit/assembly.hpp"
#include "tonekit/fields.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace tonekit;

namespace {

double sum_all(const SparseSymMatrix& a) {
  return std::accumulate(a.values().begin(), a.values().end(), 0.0);
}

} // namespace

TEST_CASE("neumann stiffness annihilates constants and mass integrates volume") {
  for (const DomainSpec& spec : {DomainSpec::square(1.0), DomainSpec::disk(1.0), DomainSpec::ball(1.0)}) {
    const Mesh mesh = build_mesh(spec, spec.dim() == 2 ? 0.1 : 0.3);
    const SparseSymMatrix k = assemble_stiffness(mesh, BoundaryCondition::neumann);
    const std::vector<double> ones(mesh.num_nodes(), 1.0);
    const std::vector<double> k1 = k.multiply(ones);
    double worst = 0.0;
    for (double v : k1)
      worst = std::max(worst, std::abs(v));
    CHECK(worst < 1e-12);
    CHECK(k.max_asymmetry() == 0.0);
    const SparseSymMatrix m = assemble_weighted_mass(mesh, QuadWeight{});
    CHECK(sum_all(m) == doctest::Approx(volume(mesh)).epsilon(1e-13));
  }
}

TEST_CASE("stiffness reproduces the energy of linear functions") {
  const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.1);
  const SparseSymMatrix k = assemble_stiffness(mesh, BoundaryCondition::neumann);
  std::vector<double> u;
  for (const Point& p : mesh.nodes())
    u.push_back(3.0 * p[0] + 4.0 * p[1] - 1.0);
  CHECK(k.quadratic_form(u) == doctest::Approx(25.0 * volume(mesh)).epsilon(1e-12));
}

TEST_CASE("dirichlet dof map drops boundary nodes") {
  const Mesh mesh = build_mesh(DomainSpec::square(1.0), 0.25);
  const DofMap d = make_dof_map(mesh, BoundaryCondition::dirichlet);
  const std::size_t boundary = std::count(mesh.boundary_nodes().begin(), mesh.boundary_nodes().end(), 1);
  CHECK(d.size() == mesh.num_nodes() - boundary);
  CHECK(d.size() == 9);
  for (std::size_t u = 0; u < d.size(); ++u)
    CHECK(d.dof[d.node[u]] == static_cast<int>(u));
  CHECK(assemble_stiffness(mesh, BoundaryCondition::dirichlet).size() == 9);
  CHECK(make_dof_map(mesh, BoundaryCondition::neumann).size() == mesh.num_nodes());
  CHECK(parse_bc("dirichlet") == BoundaryCondition::dirichlet);
  CHECK_THROWS_AS(parse_bc("robin"), Error);
}

TEST_CASE("energy mass of a unit-gradient multiplier equals the plain mass bit for bit") {
  const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.1);
  const SparseSymMatrix plain = assemble_weighted_mass(mesh, QuadWeight{});
  struct Dir {
    double x, y;
  };
  for (const Dir u : {Dir{1, 0}, Dir{0, 1}, Dir{0.6, 0.8}}) {
    if (u.x * u.x + u.y * u.y != 1.0)
      continue;
    const Field a = analytic_field(std::to_string(u.x) + "*x + " + std::to_string(u.y) + "*y", 2);
    const SparseSymMatrix ma = assemble_energy_mass(mesh, *a);
    REQUIRE(ma.values().size() == plain.values().size());
    CHECK(ma.values() == plain.values());
    CHECK(ma.cols() == plain.cols());
  }
}

TEST_CASE("weighted mass and energy load") {
  const Mesh mesh = build_mesh(DomainSpec::square(1.0), 0.1);
  const Field w = analytic_field("x", 2);
  const SparseSymMatrix m = assemble_weighted_mass(mesh, w.get());
  CHECK(sum_all(m) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(assemble_weighted_mass(mesh, analytic_field("x - 0.5", 2).get()), Error);
  const Field a = analytic_field("x*y", 2);
  const std::vector<double> f = assemble_energy_load(mesh, *a);
  // D[xy] over the unit square is 2/3.
  CHECK(std::accumulate(f.begin(), f.end(), 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
  const SparseSymMatrix ma = assemble_energy_mass(mesh, *a);
  CHECK(sum_all(ma) == doctest::Approx(std::accumulate(f.begin(), f.end(), 0.0)).epsilon(1e-13));
}

TEST_CASE("cg and direct potential solves agree") {
  const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.08);
  const SparseSymMatrix k = assemble_stiffness(mesh, BoundaryCondition::neumann);
  const SparseSymMatrix m = assemble_weighted_mass(mesh, QuadWeight{});
  const Field a = analytic_field("x^2 - y", 2);
  const std::vector<double> f = assemble_energy_load(mesh, *a);
  const PotentialResult direct = solve_potential(k, m, f);
  std::vector<double> x(f.size(), 0.0);
  const CgResult cg = conjugate_gradient(add(k, m), f, x, CgOptions{1e-12, 20000});
  CHECK(cg.iterations > 0);
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    diff = std::max(diff, std::abs(x[i] - direct.g[i]));
    ref = std::max(ref, std::abs(direct.g[i]));
  }
  CHECK(diff <= 1e-9 * ref);
  const double norm2 = add(k, m).quadratic_form(direct.g);
  CHECK(direct.h1_norm == doctest::Approx(std::sqrt(norm2)).epsilon(1e-12));

  // a = x on the unit square gives f = M 1, so g = 1 and ||G|| = 1.
  const Mesh sq = build_mesh(DomainSpec::square(1.0), 0.1);
  const PotentialResult one =
      solve_potential(assemble_stiffness(sq, BoundaryCondition::neumann), assemble_weighted_mass(sq, QuadWeight{}),
                      assemble_energy_load(sq, *analytic_field("x", 2)));
  CHECK(one.h1_norm == doctest::Approx(1.0).epsilon(1e-12));
}
