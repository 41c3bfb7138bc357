#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace tonekit {

// Points live in R^3; 2D objects carry dim == 2 and keep z == 0.
using Point = Eigen::Vector3d;
// Jacobians are stored 3x3; for dim == 2 only the leading 2x2 block is used
// and the remaining diagonal entry is 1.
using Jacobian = Eigen::Matrix3d;

enum class ErrorKind {
  input,
  resolution,
  fold,
  parse,
  evaluation,
  singular_point,
  convergence,
  not_bounded_distortion,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& message, int line, int column);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

private:
  std::string message_;
  int line_;
  int column_;
};

inline double dot(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    s += a[i] * b[i];
  return s;
}

inline double norm2(const Point& a, int dim) { return dot(a, a, dim); }

double determinant(const Jacobian& j, int dim);

// Spectral norm of the leading dim x dim block.
double spectral_norm(const Jacobian& j, int dim);

} // namespace tonekit
