#include "tonekit/kernels.hpp"

#include <cmath>

namespace tonekit::kernels {

double smooth_step(double t) {
  if (t <= 0.0)
    return 0.0;
  if (t >= 1.0)
    return 1.0;
  const double t2 = t * t;
  const double t4 = t2 * t2;
  return t4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}

namespace detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    y[i] += alpha * x[i];
}

void xpby_scalar(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    y[i] = x[i] + beta * y[i];
}

void spmv_scalar(std::size_t n, const int* row_ptr, const int* cols, const double* vals,
                 const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      s += vals[k] * x[cols[k]];
    y[i] = s;
  }
}

inline double inverse_power(double r2, double lambda) {
  if (lambda == 1.0)
    return 1.0 / std::sqrt(r2);
  if (lambda == 2.0)
    return 1.0 / r2;
  return std::pow(r2, -0.5 * lambda);
}

double riesz_scalar(const double* t, const SourceSet& s, double lambda, double cutoff) {
  const std::size_t n = s.size();
  const double inv_cut = cutoff > 0.0 ? 1.0 / cutoff : 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = t[0] - s.x[j];
    const double dy = t[1] - s.y[j];
    const double dz = t[2] - s.z[j];
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 == 0.0)
      continue;
    double term = s.w[j] * inverse_power(r2, lambda);
    if (cutoff > 0.0 && r2 < cutoff * cutoff)
      term *= smooth_step(std::sqrt(r2) * inv_cut);
    sum += term;
  }
  return sum;
}

} // namespace

const Table& scalar_table() {
  static const Table table{dot_scalar, axpy_scalar, xpby_scalar, spmv_scalar, riesz_scalar};
  return table;
}

} // namespace detail
} // namespace tonekit::kernels
