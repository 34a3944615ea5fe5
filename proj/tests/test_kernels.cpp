#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "panosr/core/kernels.hpp"
#include "panosr/core/rng.hpp"

using namespace panosr;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

}  // namespace

TEST_CASE("scalar and avx2 elementwise kernels are bit-identical") {
  if (!kern::avx2::supported()) {
    MESSAGE("avx2 not available; skipping equivalence checks");
    return;
  }
  Rng rng(42);
  for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 1023u}) {
    auto x = random_vec(n, rng);
    auto y0 = random_vec(n, rng);
    auto y1 = y0;
    kern::scalar::axpy(y0.data(), x.data(), 0.37, n);
    kern::avx2::axpy(y1.data(), x.data(), 0.37, n);
    CHECK(y0 == y1);

    auto z0 = y0;
    auto z1 = y0;
    kern::scalar::axpby(z0.data(), x.data(), -1.9, 0.4, n);
    kern::avx2::axpby(z1.data(), x.data(), -1.9, 0.4, n);
    CHECK(z0 == z1);

    auto a = random_vec(n, rng);
    auto b = random_vec(n, rng);
    std::vector<double> o0(n), o1(n);
    kern::scalar::add(o0.data(), a.data(), b.data(), n);
    kern::avx2::add(o1.data(), a.data(), b.data(), n);
    CHECK(o0 == o1);
    kern::scalar::sub(o0.data(), a.data(), b.data(), n);
    kern::avx2::sub(o1.data(), a.data(), b.data(), n);
    CHECK(o0 == o1);
    kern::scalar::mul(o0.data(), a.data(), b.data(), n);
    kern::avx2::mul(o1.data(), a.data(), b.data(), n);
    CHECK(o0 == o1);

    auto r0 = random_vec(n, rng);
    auto r1 = random_vec(n, rng);
    auto r2 = random_vec(n, rng);
    auto r3 = random_vec(n, rng);
    kern::scalar::wsum4(o0.data(), r0.data(), r1.data(), r2.data(), r3.data(),
                        0.1, -0.2, 0.7, 0.4, n);
    kern::avx2::wsum4(o1.data(), r0.data(), r1.data(), r2.data(), r3.data(),
                      0.1, -0.2, 0.7, 0.4, n);
    CHECK(o0 == o1);

    auto c0 = a;
    auto c1 = a;
    kern::scalar::scale(c0.data(), -1.25, n);
    kern::avx2::scale(c1.data(), -1.25, n);
    CHECK(c0 == c1);
    kern::scalar::clamp01(c0.data(), n);
    kern::avx2::clamp01(c1.data(), n);
    CHECK(c0 == c1);
  }
}

TEST_CASE("avx2 reductions agree with scalar to tight tolerance") {
  if (!kern::avx2::supported()) return;
  Rng rng(9);
  for (std::size_t n : {1u, 5u, 8u, 257u, 4096u}) {
    auto a = random_vec(n, rng);
    auto b = random_vec(n, rng);
    CHECK(kern::scalar::sum(a.data(), n) ==
          doctest::Approx(kern::avx2::sum(a.data(), n)).epsilon(1e-12));
    CHECK(kern::scalar::dot(a.data(), b.data(), n) ==
          doctest::Approx(kern::avx2::dot(a.data(), b.data(), n))
              .epsilon(1e-12));
    CHECK(kern::scalar::sqdiff_sum(a.data(), b.data(), n) ==
          doctest::Approx(kern::avx2::sqdiff_sum(a.data(), b.data(), n))
              .epsilon(1e-12));
  }
}

TEST_CASE("dispatch honors forced isa") {
  const auto original = kern::active_isa();
  kern::force_isa(kern::Isa::scalar);
  CHECK(kern::active_isa() == kern::Isa::scalar);
  double y[4] = {0, 0, 0, 0};
  const double x[4] = {1, 2, 3, 4};
  kern::axpy(y, x, 2.0, 4);
  CHECK(y[3] == 8.0);
  kern::reset_isa();
  CHECK(kern::active_isa() == original);
}
