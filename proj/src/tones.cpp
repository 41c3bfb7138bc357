#include "tonekit/tones.hpp"

#include "tonekit/maps.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tonekit {

EigResult weighted_spectrum(const Mesh& mesh, const QuadWeight& weight, BoundaryCondition bc, int count,
                            const EigenOptions& options) {
  if (count < 1)
    throw Error(ErrorKind::input, "eigenvalue count must be at least 1");
  const SparseSymMatrix k = assemble_stiffness(mesh, bc);
  const SparseSymMatrix m = assemble_weighted_mass(mesh, weight, bc);
  if (m.is_zero())
    throw Error(ErrorKind::input, "multiplier is constant: energy measure has empty support");
  std::optional<std::vector<double>> deflate;
  if (bc == BoundaryCondition::neumann)
    deflate = std::vector<double>(k.size(), 1.0);
  return solve_smallest(k, m, count, deflate, options);
}

ToneResult fundamental_tone(const Mesh& mesh, const Multiplier& a, BoundaryCondition bc, const EigenOptions& options) {
  if (!a.field || a.field->dim() != mesh.dim())
    throw Error(ErrorKind::input, "multiplier dimension does not match the mesh");
  const ScalarField& f = *a.field;
  const QuadWeight w = [&](std::size_t e, const ElementQuadrature& q, int i) {
    const Point g = f.gradient_on(mesh, e, q, i);
    return norm2(g, mesh.dim());
  };
  const EigResult r = weighted_spectrum(mesh, w, bc, 1, options);
  ToneResult out;
  out.mu1 = r.eigenvalues[0];
  out.bc = bc;
  out.h = mesh.h();
  out.residual = r.residuals[0];
  out.multiplier = a.id;
  out.iterations = r.iterations;
  out.dofs = r.eigenvectors.rows();
  return out;
}

namespace {

// State (z, z') of the radial equation.
struct Ode {
  double n1; // n - 1

  void rhs(double t, double z, double dz, double& fz, double& fdz) const {
    fz = dz;
    fdz = -n1 / t * dz - (1.0 - n1 / (t * t)) * z;
  }

  void step(double t, double h, double& z, double& dz) const {
    double k1z, k1d, k2z, k2d, k3z, k3d, k4z, k4d;
    rhs(t, z, dz, k1z, k1d);
    rhs(t + 0.5 * h, z + 0.5 * h * k1z, dz + 0.5 * h * k1d, k2z, k2d);
    rhs(t + 0.5 * h, z + 0.5 * h * k2z, dz + 0.5 * h * k2d, k3z, k3d);
    rhs(t + h, z + h * k3z, dz + h * k3d, k4z, k4d);
    z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    dz += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
  }
};

} // namespace

double bessel_cn(int n, double step) {
  if (n < 2)
    throw Error(ErrorKind::input, "bessel_cn needs n >= 2");
  if (!(step > 0.0))
    throw Error(ErrorKind::input, "step must be positive");
  const Ode ode{static_cast<double>(n - 1)};
  const double t_end = 20.0;
  double t = 1e-6, z = t, dz = 1.0;
  while (t < t_end) {
    double z1 = z, dz1 = dz;
    ode.step(t, step, z1, dz1);
    if ((dz > 0.0) != (dz1 > 0.0)) {
      double lo = 0.0, hi = step;
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        double zm = z, dzm = dz;
        ode.step(t, mid, zm, dzm);
        if ((dzm > 0.0) == (dz > 0.0))
          lo = mid;
        else
          hi = mid;
      }
      return t + 0.5 * (lo + hi);
    }
    t += step;
    z = z1;
    dz = dz1;
  }
  throw Error(ErrorKind::convergence, "no critical point of the Bessel solution in (0, 20]");
}

double ball_volume(int n) { return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0); }

double sphere_volume(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

double effective_conformal_volume(int n) {
  return ball_volume(n) * std::pow(bessel_cn(n) / std::sqrt(static_cast<double>(n)), n);
}

BoundReport make_report(std::string name, double lhs, double rhs, double mesh_h, std::string multiplier) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.pass = r.slack >= -1e-9 * std::abs(rhs);
  r.mesh_h = mesh_h;
  r.multiplier = std::move(multiplier);
  return r;
}

BoundInputs bound_inputs(const Mesh& mesh, const Multiplier& a, const EigenOptions& options) {
  const Multiplier lin = make_multiplier(analytic_field("x", mesh.dim()), mesh, "x");
  return bound_inputs(mesh, a, fundamental_tone(mesh, lin, BoundaryCondition::neumann, options).mu1, options);
}

BoundInputs bound_inputs(const Mesh& mesh, const Multiplier& a, double mu1_domain, const EigenOptions& options) {
  BoundInputs in;
  in.dim = mesh.dim();
  in.volume = volume(mesh);
  in.mu1_domain = mu1_domain;
  in.mu1_a = fundamental_tone(mesh, a, BoundaryCondition::neumann, options).mu1;
  in.eta = multiplier_seminorm(a, mesh, options);

  const std::vector<double> f = assemble_energy_load(mesh, *a.field);
  in.energy = 0.0;
  for (double v : f)
    in.energy += v;

  // (K + M) g = f by a direct factorization; the H^1 norm is sqrt(g^T f).
  const SparseSymMatrix kpm = add(assemble_stiffness(mesh, BoundaryCondition::neumann),
                                  assemble_weighted_mass(mesh, QuadWeight{}));
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(kpm.to_eigen());
  if (ldlt.info() != Eigen::Success)
    throw Error(ErrorKind::convergence, "factorization of K + M failed");
  const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
  const Eigen::VectorXd g = ldlt.solve(fv);
  const std::vector<double> kg = kpm.multiply(std::span<const double>(g.data(), g.size()));
  double q = 0.0;
  for (std::size_t i = 0; i < kg.size(); ++i)
    q += g[static_cast<Eigen::Index>(i)] * kg[i];
  in.potential_norm = std::sqrt(std::max(q, 0.0));
  return in;
}

std::vector<BoundReport> evaluate_bounds(const BoundInputs& in, double h, const std::string& id) {
  const double n = in.dim;
  const double vc = sphere_volume(in.dim);
  const double root_d = std::sqrt(in.energy);
  std::vector<BoundReport> out;
  out.push_back(make_report("persistence", in.mu1_domain / (1.0 + in.mu1_domain) / (in.eta * in.eta), in.mu1_a, h, id));
  out.push_back(make_report("finite_volume_eta", std::sqrt(in.energy / in.volume), in.eta, h, id));
  out.push_back(make_report("potential_bound", in.potential_norm, in.eta * root_d, h, id));
  out.push_back(make_report("potential_volume_bound", in.potential_norm, in.volume * in.eta * in.eta, h, id));
  out.push_back(make_report("potential_gap_lower", in.potential_norm / root_d, in.eta, h, id));
  out.push_back(make_report("potential_gap_upper", in.eta - in.potential_norm / root_d, 1.0 / std::sqrt(in.mu1_a), h, id));
  out.push_back(make_report("el_soufi_ilias", in.mu1_domain * std::pow(in.volume, 2.0 / n), n * std::pow(vc, 2.0 / n), h, id));
  out.push_back(make_report("colbois_el_soufi_savo", in.mu1_a,
                            n * std::pow(vc / in.volume, 2.0 / n) * in.volume / in.energy, h, id));
  const double cn = bessel_cn(in.dim);
  out.push_back(make_report("szego_weinberger", in.mu1_domain * std::pow(in.volume, 2.0 / n),
                            cn * cn * std::pow(ball_volume(in.dim), 2.0 / n), h, id));
  return out;
}

std::vector<BoundReport> check_bounds(const Mesh& mesh, const Multiplier& a, const EigenOptions& options) {
  return evaluate_bounds(bound_inputs(mesh, a, options), mesh.h(), a.id);
}

SpectrumComparison dirichlet_spectrum_equivalence(const Mesh& mesh_b, const Multiplier& a, const MobiusMap& gamma,
                                                  int k, const EigenOptions& options) {
  if (gamma.dim() != mesh_b.dim() || a.field->dim() != mesh_b.dim())
    throw Error(ErrorKind::input, "map, multiplier and mesh dimensions differ");
  const int n = mesh_b.dim();
  const ScalarField& f = *a.field;
  const Mesh mesh_a = map_mesh(mesh_b, gamma.inverse_map());

  const QuadWeight wb = [&](std::size_t e, const ElementQuadrature& q, int i) {
    return norm2(f.gradient_on(mesh_b, e, q, i), n);
  };
  // |grad (a o gamma)(x)|^2 = |gamma'(x)^T grad a(gamma x)|^2
  const QuadWeight wa = [&](std::size_t, const ElementQuadrature& q, int i) {
    const Point& x = q.points[i];
    const Point g = gamma.jacobian(x).transpose() * f.gradient(gamma.apply(x));
    return norm2(g, n);
  };
  SpectrumComparison out;
  out.reference = weighted_spectrum(mesh_b, wb, BoundaryCondition::dirichlet, k, options).eigenvalues;
  out.pulled = weighted_spectrum(mesh_a, wa, BoundaryCondition::dirichlet, k, options).eigenvalues;
  for (int i = 0; i < k; ++i)
    out.max_rel_gap = std::max(out.max_rel_gap, std::abs(out.pulled[i] - out.reference[i]) / std::abs(out.reference[i]));
  return out;
}

} // namespace tonekit
