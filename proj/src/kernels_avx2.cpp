#include "frag/kernels.hpp"

#include <cmath>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define FRAG_AVX2 __attribute__((target("avx2")))
#endif

namespace frag::kernels::avx2 {

#ifdef FRAG_AVX2

// Separate mul and add (no FMA) so rounding matches the scalar path.

FRAG_AVX2 double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, p);
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    double r = (s[0] + s[1]) + (s[2] + s[3]);
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

FRAG_AVX2 double abs_dot(const double* w, const double* f, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d af = _mm256_andnot_pd(sign, _mm256_loadu_pd(f + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), af));
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    double r = (s[0] + s[1]) + (s[2] + s[3]);
    for (; i < n; ++i) r += w[i] * std::fabs(f[i]);
    return r;
}

FRAG_AVX2 void axpy(double s, const double* x, double* y, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += s * x[i];
}

#else

double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
double abs_dot(const double* w, const double* f, std::size_t n) { return scalar::abs_dot(w, f, n); }
void axpy(double s, const double* x, double* y, std::size_t n) { scalar::axpy(s, x, y, n); }

#endif

}  // namespace frag::kernels::avx2
