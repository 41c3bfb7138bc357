#pragma once

#include "tonekit/assembly.hpp"
#include "tonekit/eigensolver.hpp"
#include "tonekit/fields.hpp"
#include "tonekit/geometry.hpp"
#include "tonekit/mobius.hpp"

#include <string>
#include <vector>

namespace tonekit {

struct ToneResult {
  double mu1 = 0.0;
  BoundaryCondition bc = BoundaryCondition::neumann;
  double h = 0.0;
  double residual = 0.0;
  std::string multiplier;
  int iterations = 0;
  std::size_t dofs = 0;
};

// Smallest eigenvalue of K v = mu M_a v. Neumann deflates the constants.
ToneResult fundamental_tone(const Mesh& mesh, const Multiplier& a, BoundaryCondition bc,
                            const EigenOptions& options = {});

// The first `count` eigenvalues for an arbitrary quadrature weight.
EigResult weighted_spectrum(const Mesh& mesh, const QuadWeight& weight, BoundaryCondition bc, int count,
                            const EigenOptions& options = {});

// First critical point of the solution of
//   z'' + (n-1)/t z' + (1 - (n-1)/t^2) z = 0,  z(t) ~ t at 0,
// by RK4 with the given step and bisection of the bracketing step.
double bessel_cn(int n, double step = 1e-5);

double ball_volume(int n);   // V(B^n)
double sphere_volume(int n); // V(S^n)

// V(B^n) (c_n / sqrt(n))^n
double effective_conformal_volume(int n);

struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0; // rhs - lhs
  bool pass = false;
  double mesh_h = 0.0;
  std::string multiplier;
};

BoundReport make_report(std::string name, double lhs, double rhs, double mesh_h, std::string multiplier);

// Every quantity comes from the Neumann P1 space of the mesh; mu1(U) uses
// a = x_1.
struct BoundInputs {
  double mu1_domain = 0.0;
  double mu1_a = 0.0;
  double eta = 0.0;
  double energy = 0.0; // D[a], also the total energy-measure mass
  double potential_norm = 0.0;
  double volume = 0.0;
  int dim = 2;
};

BoundInputs bound_inputs(const Mesh& mesh, const Multiplier& a, const EigenOptions& options = {});
// Same, reusing mu1(U) from a previous call on this mesh.
BoundInputs bound_inputs(const Mesh& mesh, const Multiplier& a, double mu1_domain, const EigenOptions& options = {});

std::vector<BoundReport> evaluate_bounds(const BoundInputs& in, double mesh_h, const std::string& multiplier);

std::vector<BoundReport> check_bounds(const Mesh& mesh, const Multiplier& a, const EigenOptions& options = {});

struct SpectrumComparison {
  std::vector<double> reference; // on meshB with a
  std::vector<double> pulled;    // on gamma^-1(meshB) with a o gamma
  double max_rel_gap = 0.0;
};

// First k Dirichlet eigenvalues of (K, M_{Gamma[a]}) on meshB against
// (K, M_{Gamma[a o gamma]}) on map_mesh(meshB, gamma^-1).
SpectrumComparison dirichlet_spectrum_equivalence(const Mesh& mesh_b, const Multiplier& a, const MobiusMap& gamma,
                                                  int k, const EigenOptions& options = {});

} // namespace tonekit
