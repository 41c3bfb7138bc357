#include "tonekit/kernels.hpp"

#include "tonekit/core.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace tonekit::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(TONEKIT_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("TONEKIT_ISA")) {
    const std::string v(env);
    if (v == "scalar")
      return Isa::scalar;
    if (v == "avx2" && cpu_has_avx2())
      return Isa::avx2;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

const detail::Table& active() { return detail::table_for(current().load(std::memory_order_relaxed)); }

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorKind::input, "kernel operands have mismatched lengths");
}

} // namespace

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

Isa active_isa() { return current().load(); }

void force_isa(Isa isa) {
  if (!isa_available(isa))
    throw Error(ErrorKind::input, std::string("instruction set not available: ") + std::string(to_string(isa)));
  current().store(isa);
}

void SourceSet::reserve(std::size_t n) {
  x.reserve(n);
  y.reserve(n);
  z.reserve(n);
  w.reserve(n);
}

void SourceSet::push(double px, double py, double pz, double weight) {
  x.push_back(px);
  y.push_back(py);
  z.push_back(pz);
  w.push_back(weight);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  check_sizes(x.size(), y.size());
  active().xpby(x.data(), beta, y.data(), x.size());
}

void csr_spmv(std::size_t n, const int* row_ptr, const int* cols, const double* vals, const double* x,
              double* y) {
  active().csr_spmv(n, row_ptr, cols, vals, x, y);
}

double riesz_sum(const double target[3], const SourceSet& sources, double lambda, double cutoff) {
  return active().riesz_sum(target, sources, lambda, cutoff);
}

namespace detail {

const Table& table_for(Isa isa) {
#if defined(TONEKIT_BUILD_AVX2)
  if (isa == Isa::avx2)
    return avx2_table();
#else
  (void)isa;
#endif
  return scalar_table();
}

} // namespace detail

} // namespace tonekit::kernels
