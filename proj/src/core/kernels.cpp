#include "panosr/core/kernels.hpp"

#include <atomic>

namespace panosr::kern {

namespace {

Isa detect() { return avx2::supported() ? Isa::avx2 : Isa::scalar; }

std::atomic<Isa> g_isa{detect()};

}  // namespace

Isa active_isa() { return g_isa.load(std::memory_order_relaxed); }

const char* isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

void force_isa(Isa isa) { g_isa.store(isa, std::memory_order_relaxed); }

void reset_isa() { g_isa.store(detect(), std::memory_order_relaxed); }

#define PANOSR_DISPATCH(fn, ...)                         \
  do {                                                   \
    if (active_isa() == Isa::avx2)                       \
      return avx2::fn(__VA_ARGS__);                      \
    return scalar::fn(__VA_ARGS__);                      \
  } while (0)

void axpy(double* y, const double* x, double a, std::size_t n) {
  PANOSR_DISPATCH(axpy, y, x, a, n);
}
void axpby(double* y, const double* x, double a, double b, std::size_t n) {
  PANOSR_DISPATCH(axpby, y, x, a, b, n);
}
void wsum4(double* out, const double* r0, const double* r1, const double* r2,
           const double* r3, double w0, double w1, double w2, double w3,
           std::size_t n) {
  PANOSR_DISPATCH(wsum4, out, r0, r1, r2, r3, w0, w1, w2, w3, n);
}
void add(double* out, const double* a, const double* b, std::size_t n) {
  PANOSR_DISPATCH(add, out, a, b, n);
}
void sub(double* out, const double* a, const double* b, std::size_t n) {
  PANOSR_DISPATCH(sub, out, a, b, n);
}
void mul(double* out, const double* a, const double* b, std::size_t n) {
  PANOSR_DISPATCH(mul, out, a, b, n);
}
void scale(double* x, double a, std::size_t n) {
  PANOSR_DISPATCH(scale, x, a, n);
}
void clamp01(double* x, std::size_t n) { PANOSR_DISPATCH(clamp01, x, n); }
double sum(const double* x, std::size_t n) { PANOSR_DISPATCH(sum, x, n); }
double dot(const double* a, const double* b, std::size_t n) {
  PANOSR_DISPATCH(dot, a, b, n);
}
double sqdiff_sum(const double* a, const double* b, std::size_t n) {
  PANOSR_DISPATCH(sqdiff_sum, a, b, n);
}

#undef PANOSR_DISPATCH

}  // namespace panosr::kern
