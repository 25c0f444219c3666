// Compiled with -mavx2 -mfma; only entered after a runtime CPU check.
#include <immintrin.h>

#include "latcov/simd.hpp"

namespace latcov::simd::avx2 {

void dot_i32(const int32_t* soa, size_t stride, int d, size_t n, const int32_t* z, int64_t* out) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i acc = _mm256_setzero_si256();
        for (int j = 0; j < d; ++j) {
            __m128i c32 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(soa + j * stride + i));
            __m256i c64 = _mm256_cvtepi32_epi64(c32);
            __m256i zj = _mm256_set1_epi64x(z[j]);
            // mul_epi32 multiplies the sign-extended low halves: exact 64-bit products
            acc = _mm256_add_epi64(acc, _mm256_mul_epi32(c64, zj));
        }
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), acc);
    }
    for (; i < n; ++i) {
        int64_t s = 0;
        for (int j = 0; j < d; ++j) s += static_cast<int64_t>(soa[j * stride + i]) * z[j];
        out[i] = s;
    }
}

void qform_f64(const double* soa, size_t stride, int r, size_t n, const double* g, double* out) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x[8];
        for (int a = 0; a < r; ++a) x[a] = _mm256_loadu_pd(soa + a * stride + i);
        __m256d s = _mm256_setzero_pd();
        for (int a = 0; a < r; ++a) {
            __m256d t = _mm256_setzero_pd();
            for (int b = 0; b < r; ++b) t = _mm256_fmadd_pd(_mm256_set1_pd(g[a * r + b]), x[b], t);
            s = _mm256_fmadd_pd(x[a], t, s);
        }
        _mm256_storeu_pd(out + i, s);
    }
    if (i < n) scalar::qform_f64(soa + i, stride, r, n - i, g, out + i);
}

}  // namespace latcov::simd::avx2
