#include "tonekit/assembly.hpp"
#include "tonekit/eigensolver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tonekit;

namespace {

constexpr double pi = std::numbers::pi;

struct Problem {
  SparseSymMatrix k, m;
  std::size_t n;
};

Problem problem(const DomainSpec& spec, double h, BoundaryCondition bc) {
  const Mesh mesh = build_mesh(spec, h);
  Problem p{assemble_stiffness(mesh, bc), assemble_weighted_mass(mesh, QuadWeight{}, bc), 0};
  p.n = p.k.size();
  return p;
}

} // namespace

TEST_CASE("dirichlet square eigenvalues converge to the exact spectrum") {
  const Problem p = problem(DomainSpec::square(1.0), 1.0 / 32, BoundaryCondition::dirichlet);
  const EigResult r = solve_smallest(p.k, p.m, 3, std::nullopt);
  REQUIRE(r.eigenvalues.size() == 3);
  CHECK(r.eigenvalues[0] == doctest::Approx(2 * pi * pi).epsilon(0.01));
  CHECK(r.eigenvalues[1] == doctest::Approx(5 * pi * pi).epsilon(0.02));
  CHECK(r.eigenvalues[2] == doctest::Approx(5 * pi * pi).epsilon(0.02));
  for (double res : r.residuals)
    CHECK(res < 1e-8);
}

TEST_CASE("dense and iterative paths agree") {
  const Problem p = problem(DomainSpec::disk(1.0), 0.08, BoundaryCondition::neumann);
  const std::vector<double> ones(p.n, 1.0);
  EigenOptions dense_opts;
  dense_opts.dense_below = 100000;
  EigenOptions iter_opts;
  iter_opts.force_iterative = true;
  iter_opts.tol = 1e-10;
  const EigResult d = solve_smallest(p.k, p.m, 4, ones, dense_opts);
  const EigResult it = solve_smallest(p.k, p.m, 4, ones, iter_opts);
  CHECK(d.dense);
  CHECK_FALSE(it.dense);
  for (int i = 0; i < 4; ++i)
    CHECK(it.eigenvalues[i] == doctest::Approx(d.eigenvalues[i]).epsilon(1e-9));
  // Neumann disk: first nonzero eigenvalue is the square of the first zero
  // of J_1', about 3.3900.
  CHECK(d.eigenvalues[0] == doctest::Approx(3.3900).epsilon(0.01));
}

TEST_CASE("cg inner solver matches the direct one") {
  const Problem p = problem(DomainSpec::square(1.0), 1.0 / 24, BoundaryCondition::neumann);
  const std::vector<double> ones(p.n, 1.0);
  EigenOptions a;
  a.force_iterative = true;
  EigenOptions b = a;
  b.inner = InnerSolver::cg;
  const EigResult ra = solve_smallest(p.k, p.m, 2, ones, a);
  const EigResult rb = solve_smallest(p.k, p.m, 2, ones, b);
  CHECK(rb.eigenvalues[0] == doctest::Approx(ra.eigenvalues[0]).epsilon(1e-7));
  CHECK(ra.eigenvalues[0] == doctest::Approx(pi * pi).epsilon(0.01));
}

TEST_CASE("eigenvectors are M-orthonormal and deflated") {
  const Problem p = problem(DomainSpec::square(1.0), 1.0 / 24, BoundaryCondition::neumann);
  const std::vector<double> ones(p.n, 1.0);
  EigenOptions o;
  o.force_iterative = true;
  const EigResult r = solve_smallest(p.k, p.m, 3, ones, o);
  const Eigen::SparseMatrix<double> m = p.m.to_eigen();
  const Eigen::MatrixXd g = r.eigenvectors.transpose() * (m * r.eigenvectors);
  CHECK((g - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-10);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p.n));
  const Eigen::VectorXd m1 = m * one;
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(m1.dot(r.eigenvectors.col(j))) < 1e-10);
    CHECK(eigen_residual(p.k, p.m, r.eigenvalues[j], r.eigenvectors.col(j)) < 1e-7);
  }
}

TEST_CASE("runs are deterministic") {
  const Problem p = problem(DomainSpec::disk(1.0), 0.06, BoundaryCondition::dirichlet);
  EigenOptions o;
  o.force_iterative = true;
  const EigResult a = solve_smallest(p.k, p.m, 2, std::nullopt, o);
  const EigResult b = solve_smallest(p.k, p.m, 2, std::nullopt, o);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.iterations == b.iterations);
  CHECK(a.seed == o.seed);
  // Dirichlet disk: j_{0,1}^2.
  CHECK(a.eigenvalues[0] == doctest::Approx(5.7832).epsilon(0.01));
}
