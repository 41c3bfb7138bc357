#pragma once

#include "tonekit/fields.hpp"
#include "tonekit/maps.hpp"
#include "tonekit/quadrature.hpp"

#include <limits>
#include <string>
#include <vector>

namespace tonekit {

struct Generator {
  enum class Kind { translate, rotate, dilate, invert };
  Kind kind = Kind::translate;
  Point v = Point::Zero();            // translate
  Jacobian r = Jacobian::Identity();  // rotate
  double s = 1.0;                     // dilate
};

// A word g_1, ..., g_m acting as g_m o ... o g_1 (g_1 applied first).
class MobiusMap final : public Map {
public:
  explicit MobiusMap(int dim, std::vector<Generator> word = {});

  static MobiusMap identity(int dim) { return MobiusMap(dim); }
  static MobiusMap translation(const Point& v, int dim);
  static MobiusMap rotation(const Jacobian& r, int dim);
  static MobiusMap dilation(double s, int dim);
  static MobiusMap inversion(int dim);

  // next o this
  MobiusMap then(const MobiusMap& next) const;

  int dim() const override { return dim_; }
  const std::vector<Generator>& word() const { return word_; }

  Point apply(const Point& x) const override;
  Jacobian jacobian(const Point& x) const override;
  MapPtr inverse() const override;
  std::string describe() const override { return serialize(); }

  double jacobian_det(const Point& x) const;
  // lambda with gamma'(x) = lambda(x) * orthogonal, so |J| = lambda^n.
  double conformal_factor(const Point& x) const;
  Point grad_log_conformal_factor(const Point& x) const;

  MobiusMap inverse_map() const;

  // Image of a ball; throws singular_point if an inversion pole lies in the
  // closed ball at that stage.
  SupportBall image(const SupportBall& ball) const;

  // Points closer than this to an inversion pole are rejected.
  double pole_tolerance() const { return pole_tol_; }
  void set_pole_tolerance(double t) { pole_tol_ = t; }

  // One generator per line: `translate vx vy [vz]`, `dilate s`, `invert`,
  // `rotate <row-major entries>`.
  std::string serialize() const;
  static MobiusMap parse(const std::string& text, int dim);

private:
  int dim_;
  std::vector<Generator> word_;
  double pole_tol_ = 1e-12;
};

// gamma*_p f(y) = lambda_{gamma^-1}(y)^{n/p} f(gamma^-1 y); p = infinity
// drops the factor. Gradient by the chain rule.
Field pullback(const MobiusMap& gamma, double p, Field f);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct InvarianceResult {
  double reference = 0.0; // the untransformed quantity
  double transformed = 0.0;
  double rel_error = 0.0;
  int level = 0;
  bool converged = false;
};

// Integral of |grad f|^2 over the bounding box of f's support.
QuadratureResult dirichlet_integral(const ScalarField& f, const QuadratureOptions& options = {});

// D[gamma*_r f] against D[f], r = 2n/(n-2). n >= 3.
InvarianceResult energy_invariance_check(const MobiusMap& gamma, const Field& f,
                                         const QuadratureOptions& options = {});

// int b^2 dGamma[a o gamma] (reference) against int (gamma*_r b)^2 dGamma[a].
InvarianceResult energy_measure_flow_check(const MobiusMap& gamma, const Field& a, const Field& b,
                                           const QuadratureOptions& options = {});

} // namespace tonekit
