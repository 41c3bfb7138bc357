#include "tonekit/assembly.hpp"

#include "tonekit/kernels.hpp"

#include <cmath>

namespace tonekit {

const char* to_string(BoundaryCondition bc) { return bc == BoundaryCondition::neumann ? "neumann" : "dirichlet"; }

BoundaryCondition parse_bc(const std::string& text) {
  if (text == "neumann")
    return BoundaryCondition::neumann;
  if (text == "dirichlet")
    return BoundaryCondition::dirichlet;
  throw Error(ErrorKind::input, "boundary condition must be 'neumann' or 'dirichlet', got '" + text + "'");
}

DofMap make_dof_map(const Mesh& mesh, BoundaryCondition bc) {
  DofMap m;
  m.dof.assign(mesh.num_nodes(), -1);
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    if (bc == BoundaryCondition::dirichlet && mesh.is_boundary(i))
      continue;
    m.dof[i] = static_cast<int>(m.node.size());
    m.node.push_back(static_cast<int>(i));
  }
  if (m.node.empty())
    throw Error(ErrorKind::resolution, "mesh has no interior nodes");
  return m;
}

SparseSymMatrix assemble_stiffness(const Mesh& mesh, BoundaryCondition bc) {
  const DofMap map = make_dof_map(mesh, bc);
  const int nv = mesh.vertices_per_element();
  TripletBuilder b(map.size());
  b.reserve(mesh.num_elements() * nv * nv);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto g = mesh.shape_gradients(e);
    const double vol = mesh.element_volumes()[e];
    const auto& el = mesh.elements()[e];
    for (int i = 0; i < nv; ++i) {
      const int di = map.dof[el[i]];
      if (di < 0)
        continue;
      for (int j = 0; j < nv; ++j) {
        const int dj = map.dof[el[j]];
        if (dj >= 0)
          b.add(di, dj, vol * g[i].dot(g[j]));
      }
    }
  }
  return b.build();
}

SparseSymMatrix assemble_weighted_mass(const Mesh& mesh, const QuadWeight& weight, BoundaryCondition bc) {
  const DofMap map = make_dof_map(mesh, bc);
  const int nv = mesh.vertices_per_element();
  TripletBuilder b(map.size());
  b.reserve(mesh.num_elements() * nv * nv);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const ElementQuadrature q = mesh.quadrature(e);
    std::array<double, 4> w{};
    for (int k = 0; k < q.count; ++k) {
      const double wk = weight ? weight(e, q, k) : 1.0;
      if (!(wk >= 0.0))
        throw Error(ErrorKind::input, "negative or undefined mass weight in element " + std::to_string(e));
      w[k] = wk * q.weights[k];
    }
    const auto& el = mesh.elements()[e];
    for (int i = 0; i < nv; ++i) {
      const int di = map.dof[el[i]];
      if (di < 0)
        continue;
      for (int j = 0; j < nv; ++j) {
        const int dj = map.dof[el[j]];
        if (dj < 0)
          continue;
        double s = 0.0;
        for (int k = 0; k < q.count; ++k)
          s += w[k] * q.bary[k][i] * q.bary[k][j];
        b.add(di, dj, s);
      }
    }
  }
  return b.build();
}

SparseSymMatrix assemble_weighted_mass(const Mesh& mesh, const ScalarField* weight, BoundaryCondition bc) {
  if (!weight)
    return assemble_weighted_mass(mesh, QuadWeight{}, bc);
  return assemble_weighted_mass(
      mesh, [&](std::size_t e, const ElementQuadrature& q, int i) { return weight->value_on(mesh, e, q, i); }, bc);
}

SparseSymMatrix assemble_energy_mass(const Mesh& mesh, const ScalarField& a, BoundaryCondition bc) {
  const int dim = mesh.dim();
  return assemble_weighted_mass(
      mesh, [&](std::size_t e, const ElementQuadrature& q, int i) { return norm2(a.gradient_on(mesh, e, q, i), dim); },
      bc);
}

std::vector<double> assemble_energy_load(const Mesh& mesh, const ScalarField& a) {
  std::vector<double> f(mesh.num_nodes(), 0.0);
  const int nv = mesh.vertices_per_element();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const ElementQuadrature q = mesh.quadrature(e);
    const auto& el = mesh.elements()[e];
    for (int k = 0; k < q.count; ++k) {
      const double w = q.weights[k] * norm2(a.gradient_on(mesh, e, q, k), mesh.dim());
      for (int i = 0; i < nv; ++i)
        f[el[i]] += w * q.bary[k][i];
    }
  }
  return f;
}

CgResult conjugate_gradient(const SparseSymMatrix& a, std::span<const double> b, std::span<double> x,
                            const CgOptions& options) {
  const std::size_t n = a.size();
  if (b.size() != n || x.size() != n)
    throw Error(ErrorKind::input, "CG size mismatch");
  const double bnorm = std::sqrt(kernels::dot(b, b));
  CgResult res;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return res;
  }
  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0))
      throw Error(ErrorKind::input, "CG needs a positive diagonal");
    d = 1.0 / d;
  }
  std::vector<double> r(n), z(n), p(n), ap(n);
  a.multiply(x, ap);
  for (std::size_t i = 0; i < n; ++i)
    r[i] = b[i] - ap[i];
  for (std::size_t i = 0; i < n; ++i)
    z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = kernels::dot(r, z);
  for (int it = 0; it < options.max_iter; ++it) {
    res.residual = std::sqrt(kernels::dot(r, r)) / bnorm;
    res.iterations = it;
    if (res.residual <= options.rel_tol)
      return res;
    a.multiply(p, ap);
    const double alpha = rz / kernels::dot(p, ap);
    kernels::axpy(alpha, p, x);
    kernels::axpy(-alpha, ap, r);
    for (std::size_t i = 0; i < n; ++i)
      z[i] = inv_diag[i] * r[i];
    const double rz_new = kernels::dot(r, z);
    kernels::xpby(z, rz_new / rz, p);
    rz = rz_new;
  }
  res.residual = std::sqrt(kernels::dot(r, r)) / bnorm;
  res.iterations = options.max_iter;
  if (res.residual <= options.rel_tol)
    return res;
  throw Error(ErrorKind::convergence, "conjugate gradients stalled at relative residual " +
                                          std::to_string(res.residual) + " after " +
                                          std::to_string(options.max_iter) + " iterations");
}

PotentialResult solve_potential(const SparseSymMatrix& k, const SparseSymMatrix& m, const std::vector<double>& f,
                                const CgOptions& options) {
  const SparseSymMatrix a = add(k, m);
  PotentialResult out;
  out.g.assign(a.size(), 0.0);
  const CgResult cg = conjugate_gradient(a, f, out.g, options);
  out.iterations = cg.iterations;
  out.residual = cg.residual;
  out.h1_norm = std::sqrt(std::max(0.0, a.quadratic_form(out.g)));
  return out;
}

} // namespace tonekit
