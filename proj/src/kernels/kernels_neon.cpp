// aarch64 only; NEON (Advanced SIMD) is mandatory there, so no runtime probe.
#include <arm_neon.h>

#include "acns/kernels.hpp"

namespace acns::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3_neon(const double* w, const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), vld1q_f64(a + i)), vld1q_f64(b + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_add2_neon(const double* a, const double* b, const double* c, const double* d, double* out,
                   std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t ab = vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    vst1q_f64(out + i, vfmaq_f64(ab, vld1q_f64(c + i), vld1q_f64(d + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i] + c[i] * d[i];
}

void double_well_neon(const double* x, double shift, double* out, std::size_t n) {
  const float64x2_t lin = vdupq_n_f64(4.0 + shift);
  const float64x2_t four = vdupq_n_f64(4.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t r = vld1q_f64(x + i);
    const float64x2_t t = vsubq_f64(vmulq_f64(four, vmulq_f64(r, r)), lin);
    vst1q_f64(out + i, vmulq_f64(r, t));
  }
  for (; i < n; ++i) {
    const double r = x[i];
    out[i] = 4.0 * r * r * r - (4.0 + shift) * r;
  }
}

double double_well_energy_neon(const double* w, const double* x, std::size_t n) {
  const float64x2_t one = vdupq_n_f64(1.0);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t r = vld1q_f64(x + i);
    const float64x2_t q = vsubq_f64(vmulq_f64(r, r), one);
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), q), q);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double q = x[i] * x[i] - 1.0;
    s += w[i] * q * q;
  }
  return s;
}

}  // namespace

const Table& neon_table_impl() {
  static const Table table{"neon",         dot_neon,         dot3_neon,
                           axpy_neon,      mul_add2_neon,    double_well_neon,
                           double_well_energy_neon};
  return table;
}

}  // namespace acns::kernels
