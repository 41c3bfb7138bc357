#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64 hosts with AVX2+FMA, a vectorized version. The active variant is
// chosen once at startup from CPUID and can be pinned (tests, reproducible
// runs) with force_isa() or the TONEKIT_ISA environment variable
// ("scalar" or "avx2").

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tonekit::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
void force_isa(Isa isa);

// Structure-of-arrays quadrature nodes for potential sums; z is zero in 2D.
struct SourceSet {
  std::vector<double> x, y, z, w;
  std::size_t size() const { return w.size(); }
  void reserve(std::size_t n);
  void push(double px, double py, double pz, double weight);
};

// Smooth cutoff used to split singular integrals: 0 at t = 0, 1 for t >= 1,
// C^3 in between.
double smooth_step(double t);

double dot(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// y = x + beta * y
void xpby(std::span<const double> x, double beta, std::span<double> y);

// y = A x for a CSR matrix with n rows.
void csr_spmv(std::size_t n, const int* row_ptr, const int* cols, const double* vals,
              const double* x, double* y);

// sum_j w_j * |t - s_j|^(-lambda) * smooth_step(|t - s_j| / cutoff)
// With cutoff == 0 the smooth factor is dropped; coincident points then
// contribute nothing.
double riesz_sum(const double target[3], const SourceSet& sources, double lambda, double cutoff);

namespace detail {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*xpby)(const double*, double, double*, std::size_t);
  void (*csr_spmv)(std::size_t, const int*, const int*, const double*, const double*, double*);
  double (*riesz_sum)(const double*, const SourceSet&, double, double);
};

const Table& scalar_table();
#if defined(TONEKIT_BUILD_AVX2)
const Table& avx2_table();
#endif
const Table& table_for(Isa isa);

} // namespace detail

} // namespace tonekit::kernels
