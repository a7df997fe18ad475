#pragma once
// Grid-pointwise and reduction kernels used by the quadrature, reconstruction
// and nonlinear-term evaluation loops. Every routine has a scalar reference
// implementation; SIMD variants (AVX2+FMA on x86-64, NEON on aarch64) are
// selected at runtime and must agree with the reference to rounding.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace acns::kernels {

struct Table {
  const char* name;
  // sum a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum w[i] * a[i] * b[i]
  double (*dot3)(const double* w, const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = a[i] * b[i] + c[i] * d[i]
  void (*mul_add2)(const double* a, const double* b, const double* c, const double* d, double* out,
                   std::size_t n);
  // out[i] = 4 x^3 - (4 + shift) x, the shifted double-well derivative
  void (*double_well)(const double* x, double shift, double* out, std::size_t n);
  // sum w[i] * (x[i]^2 - 1)^2
  double (*double_well_energy)(const double* w, const double* x, std::size_t n);
};

const Table& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const Table* avx2_table();
const Table* neon_table();

// Variant used by the library. Chosen on first use: the best supported SIMD
// table, unless ACNS_KERNELS=scalar|avx2|neon is set in the environment.
const Table& active();
// Returns false (and leaves the selection unchanged) for unknown or
// unsupported names. "auto" restores the default choice.
bool select(std::string_view name);
std::vector<std::string_view> available();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double dot3(std::span<const double> w, std::span<const double> a,
                   std::span<const double> b) {
  return active().dot3(w.data(), a.data(), b.data(), w.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), y.size());
}
inline void mul_add2(std::span<const double> a, std::span<const double> b,
                     std::span<const double> c, std::span<const double> d, std::span<double> out) {
  active().mul_add2(a.data(), b.data(), c.data(), d.data(), out.data(), out.size());
}
inline void double_well(std::span<const double> x, double shift, std::span<double> out) {
  active().double_well(x.data(), shift, out.data(), out.size());
}
inline double double_well_energy(std::span<const double> w, std::span<const double> x) {
  return active().double_well_energy(w.data(), x.data(), w.size());
}

}  // namespace acns::kernels
