#pragma once

// Data-parallel kernels for the enumeration and incidence hot loops.
// Each kernel has a scalar reference and vector variants selected at
// runtime; all variants are bit-identical on their documented domain.

#include <cstddef>
#include <cstdint>

namespace latcov::simd {

enum class Isa { Scalar, Avx2, Neon };

Isa active_isa();
const char* isa_name(Isa isa);
bool isa_supported(Isa isa);
// Pins the dispatch target (tests and benchmarks).  Returns false if the
// requested ISA is unavailable on this machine/build.
bool force_isa(Isa isa);
void reset_isa();

// Points are stored column-major ("SoA"): coordinate j of point i is
// soa[j * stride + i].

// out[i] = sum_j soa[j][i] * z[j].  Exact for |coords|, |z| < 2^28, d <= 8.
void dot_i32(const int32_t* soa, size_t stride, int d, size_t n, const int32_t* z, int64_t* out);

// out[i] = x_i^T G x_i with G row-major r x r.  Inputs are integers stored
// in doubles; exact when every partial sum stays below 2^53 in magnitude,
// which callers establish with qform_exact_bound().
void qform_f64(const double* soa, size_t stride, int r, size_t n, const double* g, double* out);

// True when r^2 * max|g| * max|x|^2 < 2^53, so qform_f64 is exact.
bool qform_exact_bound(int r, double max_abs_g, double max_abs_x);

namespace scalar {
void dot_i32(const int32_t* soa, size_t stride, int d, size_t n, const int32_t* z, int64_t* out);
void qform_f64(const double* soa, size_t stride, int r, size_t n, const double* g, double* out);
}  // namespace scalar

#if defined(__x86_64__) || defined(__i386__)
namespace avx2 {
void dot_i32(const int32_t* soa, size_t stride, int d, size_t n, const int32_t* z, int64_t* out);
void qform_f64(const double* soa, size_t stride, int r, size_t n, const double* g, double* out);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void dot_i32(const int32_t* soa, size_t stride, int d, size_t n, const int32_t* z, int64_t* out);
void qform_f64(const double* soa, size_t stride, int r, size_t n, const double* g, double* out);
}  // namespace neon
#endif

}  // namespace latcov::simd
