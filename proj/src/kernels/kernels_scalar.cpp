#include "acns/kernels.hpp"

namespace acns::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3_scalar(const double* w, const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul_add2_scalar(const double* a, const double* b, const double* c, const double* d,
                     double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i] + c[i] * d[i];
}

void double_well_scalar(const double* x, double shift, double* out, std::size_t n) {
  const double lin = 4.0 + shift;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = x[i];
    out[i] = 4.0 * r * r * r - lin * r;
  }
}

double double_well_energy_scalar(const double* w, const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = x[i] * x[i] - 1.0;
    s += w[i] * q * q;
  }
  return s;
}

}  // namespace

const Table& scalar_table() {
  static const Table table{"scalar",           dot_scalar,         dot3_scalar,
                           axpy_scalar,        mul_add2_scalar,    double_well_scalar,
                           double_well_energy_scalar};
  return table;
}

}  // namespace acns::kernels
