#include "frag/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace frag::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s[0] += a[i] * b[i];
        s[1] += a[i + 1] * b[i + 1];
        s[2] += a[i + 2] * b[i + 2];
        s[3] += a[i + 3] * b[i + 3];
    }
    double r = (s[0] + s[1]) + (s[2] + s[3]);
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

double abs_dot(const double* w, const double* f, std::size_t n) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s[0] += w[i] * std::fabs(f[i]);
        s[1] += w[i + 1] * std::fabs(f[i + 1]);
        s[2] += w[i + 2] * std::fabs(f[i + 2]);
        s[3] += w[i + 3] * std::fabs(f[i + 3]);
    }
    double r = (s[0] + s[1]) + (s[2] + s[3]);
    for (; i < n; ++i) r += w[i] * std::fabs(f[i]);
    return r;
}

void axpy(double s, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += s * x[i];
}

}  // namespace scalar

namespace {

Isa detect() {
    if (const char* env = std::getenv("FRAGSOLVE_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    }
    return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa set_isa(Isa isa) {
    if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
    return current().exchange(isa);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

double dot(const double* a, const double* b, std::size_t n) {
    return active_isa() == Isa::avx2 ? avx2::dot(a, b, n) : scalar::dot(a, b, n);
}

double abs_dot(const double* w, const double* f, std::size_t n) {
    return active_isa() == Isa::avx2 ? avx2::abs_dot(w, f, n) : scalar::abs_dot(w, f, n);
}

void axpy(double s, const double* x, double* y, std::size_t n) {
    if (active_isa() == Isa::avx2)
        avx2::axpy(s, x, y, n);
    else
        scalar::axpy(s, x, y, n);
}

}  // namespace frag::kernels
