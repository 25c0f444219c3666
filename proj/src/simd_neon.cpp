#include "latcov/simd.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace latcov::simd::neon {

void dot_i32(const int32_t* soa, size_t stride, int d, size_t n, const int32_t* z, int64_t* out) {
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        int64x2_t acc = vdupq_n_s64(0);
        for (int j = 0; j < d; ++j) {
            int32x2_t c = vld1_s32(soa + j * stride + i);
            acc = vmlal_s32(acc, c, vdup_n_s32(z[j]));
        }
        vst1q_s64(out + i, acc);
    }
    if (i < n) scalar::dot_i32(soa + i, stride, d, n - i, z, out + i);
}

void qform_f64(const double* soa, size_t stride, int r, size_t n, const double* g, double* out) {
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t x[8];
        for (int a = 0; a < r; ++a) x[a] = vld1q_f64(soa + a * stride + i);
        float64x2_t s = vdupq_n_f64(0);
        for (int a = 0; a < r; ++a) {
            float64x2_t t = vdupq_n_f64(0);
            for (int b = 0; b < r; ++b) t = vfmaq_n_f64(t, x[b], g[a * r + b]);
            s = vfmaq_f64(s, x[a], t);
        }
        vst1q_f64(out + i, s);
    }
    if (i < n) scalar::qform_f64(soa + i, stride, r, n - i, g, out + i);
}

}  // namespace latcov::simd::neon
#endif
