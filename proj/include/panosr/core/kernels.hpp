#pragma once

#include <cstddef>

// Data-parallel inner-loop kernels. Every kernel has a scalar reference
// implementation and an AVX2 variant; the top-level entry points dispatch
// once at startup based on CPU capability. Elementwise kernels are
// bit-identical across variants (no FMA contraction, same per-element
// operation order). Reductions differ only in accumulation order.

namespace panosr::kern {

enum class Isa { scalar, avx2 };

Isa active_isa();
const char* isa_name(Isa isa);

// Overrides runtime dispatch. Intended for equivalence tests.
void force_isa(Isa isa);
void reset_isa();

// y[i] += a * x[i]
void axpy(double* y, const double* x, double a, std::size_t n);
// y[i] = a * x[i] + b * y[i]
void axpby(double* y, const double* x, double a, double b, std::size_t n);
// out[i] = w0*r0[i] + w1*r1[i] + w2*r2[i] + w3*r3[i]
void wsum4(double* out, const double* r0, const double* r1, const double* r2,
           const double* r3, double w0, double w1, double w2, double w3,
           std::size_t n);
void add(double* out, const double* a, const double* b, std::size_t n);
void sub(double* out, const double* a, const double* b, std::size_t n);
void mul(double* out, const double* a, const double* b, std::size_t n);
void scale(double* x, double a, std::size_t n);
void clamp01(double* x, std::size_t n);

double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
// sum of (a[i] - b[i])^2
double sqdiff_sum(const double* a, const double* b, std::size_t n);

namespace scalar {
void axpy(double* y, const double* x, double a, std::size_t n);
void axpby(double* y, const double* x, double a, double b, std::size_t n);
void wsum4(double* out, const double* r0, const double* r1, const double* r2,
           const double* r3, double w0, double w1, double w2, double w3,
           std::size_t n);
void add(double* out, const double* a, const double* b, std::size_t n);
void sub(double* out, const double* a, const double* b, std::size_t n);
void mul(double* out, const double* a, const double* b, std::size_t n);
void scale(double* x, double a, std::size_t n);
void clamp01(double* x, std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sqdiff_sum(const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool supported();
void axpy(double* y, const double* x, double a, std::size_t n);
void axpby(double* y, const double* x, double a, double b, std::size_t n);
void wsum4(double* out, const double* r0, const double* r1, const double* r2,
           const double* r3, double w0, double w1, double w2, double w3,
           std::size_t n);
void add(double* out, const double* a, const double* b, std::size_t n);
void sub(double* out, const double* a, const double* b, std::size_t n);
void mul(double* out, const double* a, const double* b, std::size_t n);
void scale(double* x, double a, std::size_t n);
void clamp01(double* x, std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sqdiff_sum(const double* a, const double* b, std::size_t n);
}  // namespace avx2

}  // namespace panosr::kern
