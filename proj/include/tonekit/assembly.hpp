#pragma once

#include "tonekit/fields.hpp"
#include "tonekit/geometry.hpp"
#include "tonekit/sparse.hpp"

#include <functional>
#include <vector>

namespace tonekit {

enum class BoundaryCondition { neumann, dirichlet };

const char* to_string(BoundaryCondition bc);
BoundaryCondition parse_bc(const std::string& text);

// Node -> unknown index; -1 for eliminated (Dirichlet boundary) nodes.
struct DofMap {
  std::vector<int> dof;
  std::vector<int> node; // unknown -> node
  std::size_t size() const { return node.size(); }
};

DofMap make_dof_map(const Mesh& mesh, BoundaryCondition bc);

SparseSymMatrix assemble_stiffness(const Mesh& mesh, BoundaryCondition bc);

// Weight evaluated at quadrature point i of element e.
using QuadWeight = std::function<double(std::size_t e, const ElementQuadrature& q, int i)>;

// M_w with b^T M_w b = sum over quadrature points of w b^2. A null weight
// means w = 1 and goes through the same arithmetic.
SparseSymMatrix assemble_weighted_mass(const Mesh& mesh, const QuadWeight& weight,
                                       BoundaryCondition bc = BoundaryCondition::neumann);
// Weight given by the values of a field; negative values are an input error.
SparseSymMatrix assemble_weighted_mass(const Mesh& mesh, const ScalarField* weight,
                                       BoundaryCondition bc = BoundaryCondition::neumann);
// Weight |grad a|^2.
SparseSymMatrix assemble_energy_mass(const Mesh& mesh, const ScalarField& a,
                                     BoundaryCondition bc = BoundaryCondition::neumann);

// f_i = sum over quadrature points of |grad a|^2 phi_i.
std::vector<double> assemble_energy_load(const Mesh& mesh, const ScalarField& a);

struct CgOptions {
  double rel_tol = 1e-10;
  int max_iter = 20000;
};

struct CgResult {
  int iterations = 0;
  double residual = 0.0;
};

// Jacobi-preconditioned conjugate gradients for SPD A; x holds the initial
// guess on entry. Throws convergence error on failure.
CgResult conjugate_gradient(const SparseSymMatrix& a, std::span<const double> b, std::span<double> x,
                            const CgOptions& options = {});

struct PotentialResult {
  std::vector<double> g;
  double h1_norm = 0.0; // sqrt(g^T (K + M) g)
  int iterations = 0;
  double residual = 0.0;
};

// Solves (K + M) g = f.
PotentialResult solve_potential(const SparseSymMatrix& k, const SparseSymMatrix& m, const std::vector<double>& f,
                                const CgOptions& options = {});

} // namespace tonekit
