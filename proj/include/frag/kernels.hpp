#pragma once

#include <cstddef>

// Data-parallel reductions behind every quadrature sum. The AVX2 variants
// keep four partial sums in the same lane order as the scalar reference, so
// both paths return bit-identical results.

namespace frag::kernels {

enum class Isa { scalar, avx2 };

/// ISA picked at startup (FRAGSOLVE_SIMD=scalar forces the fallback).
Isa active_isa();
/// Override dispatch; used by equivalence tests. Returns the previous value.
Isa set_isa(Isa isa);
bool avx2_available();
const char* isa_name(Isa isa);

/// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);
/// sum_i w[i] * |f[i]|
double abs_dot(const double* w, const double* f, std::size_t n);
/// y[i] += s * x[i]
void axpy(double s, const double* x, double* y, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double abs_dot(const double* w, const double* f, std::size_t n);
void axpy(double s, const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double abs_dot(const double* w, const double* f, std::size_t n);
void axpy(double s, const double* x, double* y, std::size_t n);
}  // namespace avx2

}  // namespace frag::kernels
