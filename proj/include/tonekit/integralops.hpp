#pragma once

#include "tonekit/fields.hpp"
#include "tonekit/kernels.hpp"
#include "tonekit/mobius.hpp"
#include "tonekit/quadrature.hpp"

#include <vector>

namespace tonekit {

struct RieszOptions {
  int q = 6;
  int min_level = 2;
  int max_level = 4;
  double rel_tol = 1e-6;
  // Width of the near ball in far-field cells.
  double delta_cells = 2.0;
  int near_radial = 16;
  int near_polar = 16;
  int near_azimuth = 32;
};

struct PotentialValue {
  double value = 0.0;
  double previous = 0.0;
  int level = 0;
  bool converged = false;
};

// Far-field nodes of a compactly supported density at one refinement level,
// reusable for many targets.
class RieszEvaluator {
public:
  RieszEvaluator(const ScalarField& f, double lambda, int level, const RieszOptions& options = {});
  double operator()(const Point& x) const;
  double delta() const { return delta_; }

private:
  const ScalarField& f_;
  double lambda_;
  int dim_;
  SupportBall support_;
  RieszOptions opt_;
  double delta_ = 0.0;
  kernels::SourceSet far_;
  bool empty_ = false;
};

// int f(y) |x - y|^-lambda dy, 0 < lambda < n.
PotentialValue riesz_potential(const ScalarField& f, double lambda, const Point& x, const RieszOptions& options = {});

// c_n = 1 / ((n - 2) |S^{n-1}|)
double green_constant(int n);

// c_n * riesz_potential(f, n - 2, x); n >= 3.
PotentialValue green_apply(const ScalarField& f, const Point& x, const RieszOptions& options = {});

struct CovarianceResult {
  double max_rel_error = 0.0;
  std::vector<double> lhs, rhs;
  bool converged = true;
};

// G(gamma*_p f) against gamma*_r(G f), p = 2n/(n+2), r = 2n/(n-2).
CovarianceResult green_covariance_check(const MobiusMap& gamma, const Field& f, const std::vector<Point>& points,
                                        const RieszOptions& options = {});

struct HlsOptions {
  int q = 6;
  int min_level = 1;
  int max_level = 3;
  double rel_tol = 1e-4;
  // Inner potential settings when the supports overlap.
  RieszOptions inner = {};
};

// I(f, g) = double integral of f(x) g(y) |x - y|^-lambda.
QuadratureResult hls_functional(const ScalarField& f, const ScalarField& g, double lambda,
                                const HlsOptions& options = {});

// I(gamma*_p f, gamma*_p g) against I(f, g), p = 2n/(2n - lambda).
InvarianceResult hls_invariance_check(const MobiusMap& gamma, const Field& f, const Field& g, double lambda,
                                      const HlsOptions& options = {});

} // namespace tonekit
