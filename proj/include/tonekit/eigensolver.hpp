#pragma once

#include "tonekit/sparse.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tonekit {

enum class InnerSolver { cholesky, cg };

struct EigenOptions {
  double tol = 1e-8;
  int max_outer = 500;
  std::uint64_t seed = 20240917;
  InnerSolver inner = InnerSolver::cholesky;
  // Dense reduction below this many unknowns.
  std::size_t dense_below = 1500;
  bool force_iterative = false;
};

struct EigResult {
  std::vector<double> eigenvalues; // ascending
  Eigen::MatrixXd eigenvectors;    // M-orthonormal columns
  std::vector<double> residuals;
  int iterations = 0;
  bool dense = false;
  double shift = 0.0;
  std::uint64_t seed = 0;
};

// Relative residual |Kv - mu Mv| / |Kv|, with a floor on the denominator so
// that exact zero modes do not divide by roundoff.
double eigen_residual(const SparseSymMatrix& k, const SparseSymMatrix& m, double mu, const Eigen::VectorXd& v);

// The k smallest eigenvalues of K v = mu M v, restricted to the
// M-orthogonal complement of `deflate` when given. Shift-invert on
// (K + sigma M)^-1 M with sigma = 1e-3 tr(K)/tr(M).
EigResult solve_smallest(const SparseSymMatrix& k, const SparseSymMatrix& m, int count,
                         const std::optional<std::vector<double>>& deflate, const EigenOptions& options = {});

} // namespace tonekit
