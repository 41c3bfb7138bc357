#include "tonekit/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace tonekit {

const char* to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::input: return "input";
  case ErrorKind::resolution: return "resolution";
  case ErrorKind::fold: return "fold";
  case ErrorKind::parse: return "parse";
  case ErrorKind::evaluation: return "evaluation";
  case ErrorKind::singular_point: return "singular point";
  case ErrorKind::convergence: return "convergence";
  case ErrorKind::not_bounded_distortion: return "not bounded-distortion";
  case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

ParseError::ParseError(const std::string& message, int line, int column)
    : Error(ErrorKind::parse, "syntax error at line " + std::to_string(line) + ", column " +
                                  std::to_string(column) + ": " + message),
      message_(message), line_(line), column_(column) {}

double determinant(const Jacobian& j, int dim) {
  if (dim == 2)
    return j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
  return j.determinant();
}

double spectral_norm(const Jacobian& j, int dim) {
  // Largest eigenvalue of the symmetric matrix J^T J.
  if (dim == 2) {
    Eigen::Matrix2d a = j.topLeftCorner<2, 2>();
    Eigen::Matrix2d g = a.transpose() * a;
    // tr^2/4 - det written without cancellation.
    const double tr = g(0, 0) + g(1, 1);
    const double half_gap = 0.5 * (g(0, 0) - g(1, 1));
    const double disc = std::sqrt(half_gap * half_gap + g(0, 1) * g(1, 0));
    return std::sqrt(0.5 * tr + disc);
  }
  Eigen::Matrix3d g = j.transpose() * j;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(2)));
}

} // namespace tonekit
