#include <atomic>

#include "latcov/simd.hpp"

namespace latcov::simd {

namespace scalar {

void dot_i32(const int32_t* soa, size_t stride, int d, size_t n, const int32_t* z, int64_t* out) {
    for (size_t i = 0; i < n; ++i) {
        int64_t s = 0;
        for (int j = 0; j < d; ++j) s += static_cast<int64_t>(soa[j * stride + i]) * z[j];
        out[i] = s;
    }
}

void qform_f64(const double* soa, size_t stride, int r, size_t n, const double* g, double* out) {
    for (size_t i = 0; i < n; ++i) {
        double s = 0;
        for (int a = 0; a < r; ++a) {
            double t = 0;
            for (int b = 0; b < r; ++b) t += g[a * r + b] * soa[b * stride + i];
            s += soa[a * stride + i] * t;
        }
        out[i] = s;
    }
}

}  // namespace scalar

namespace {

using DotFn = void (*)(const int32_t*, size_t, int, size_t, const int32_t*, int64_t*);
using QfFn = void (*)(const double*, size_t, int, size_t, const double*, double*);

std::atomic<int> g_forced{-1};

Isa detect() {
#if defined(LATCOV_HAVE_AVX2)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::Avx2;
#endif
#if defined(LATCOV_HAVE_NEON)
    return Isa::Neon;
#endif
    return Isa::Scalar;
}

}  // namespace

bool isa_supported(Isa isa) {
    if (isa == Isa::Scalar) return true;
    Isa best = detect();
    return best == isa;
}

Isa active_isa() {
    int f = g_forced.load();
    if (f >= 0) return static_cast<Isa>(f);
    static const Isa best = detect();
    return best;
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "?";
}

bool force_isa(Isa isa) {
    if (!isa_supported(isa)) return false;
    g_forced = static_cast<int>(isa);
    return true;
}

void reset_isa() { g_forced = -1; }

bool qform_exact_bound(int r, double max_abs_g, double max_abs_x) {
    double b = static_cast<double>(r) * r * max_abs_g * max_abs_x * max_abs_x;
    return b < 9007199254740992.0 / 2;
}

void dot_i32(const int32_t* soa, size_t stride, int d, size_t n, const int32_t* z, int64_t* out) {
    switch (active_isa()) {
#if defined(LATCOV_HAVE_AVX2)
        case Isa::Avx2: return avx2::dot_i32(soa, stride, d, n, z, out);
#endif
#if defined(LATCOV_HAVE_NEON)
        case Isa::Neon: return neon::dot_i32(soa, stride, d, n, z, out);
#endif
        default: return scalar::dot_i32(soa, stride, d, n, z, out);
    }
}

void qform_f64(const double* soa, size_t stride, int r, size_t n, const double* g, double* out) {
    switch (active_isa()) {
#if defined(LATCOV_HAVE_AVX2)
        case Isa::Avx2: return avx2::qform_f64(soa, stride, r, n, g, out);
#endif
#if defined(LATCOV_HAVE_NEON)
        case Isa::Neon: return neon::qform_f64(soa, stride, r, n, g, out);
#endif
        default: return scalar::qform_f64(soa, stride, r, n, g, out);
    }
}

}  // namespace latcov::simd
