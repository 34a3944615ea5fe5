#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "panosr/metrics/metrics.hpp"
#include "testutil.hpp"

using namespace panosr;
using namespace panosr::metrics;

TEST_CASE("ws_weights closed form") {
  const auto w2 = ws_weights(2);
  CHECK(w2[0] == doctest::Approx(std::cos(M_PI / 4)).epsilon(1e-12));
  CHECK(w2[1] == doctest::Approx(std::cos(M_PI / 4)).epsilon(1e-12));

  const auto w = ws_weights(64);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(w[i] > 0.0);
    CHECK(w[i] == doctest::Approx(w[w.size() - 1 - i]).epsilon(1e-12));
    const double want = std::cos((i + 0.5 - 32.0) * M_PI / 64.0);
    CHECK(std::abs(w[i] - want) < 1e-12);
  }
  // middle rows approach weight 1
  CHECK(w[31] == doctest::Approx(std::cos(M_PI / 128.0)).epsilon(1e-12));
}

TEST_CASE("ws_psnr: identity cap and exact uniform offset") {
  const ErpImage x = testutil::synthetic_erp(3, 32);
  CHECK(ws_psnr(x, x) == kPsnrCap);

  ErpImage y = x;
  for (std::int64_t i = 0; i < y.pixels.numel(); ++i) y.pixels[i] += 0.1;
  CHECK(std::abs(ws_psnr(x, y) - 20.0) < 1e-6);
  CHECK(std::abs(psnr(x.pixels, y.pixels) - 20.0) < 1e-6);
}

TEST_CASE("polar error scores higher ws_psnr than the same equatorial error") {
  ErpImage base(1, 32);
  for (std::int64_t i = 0; i < base.pixels.numel(); ++i) base.pixels[i] = 0.5;
  ErpImage polar = base;
  ErpImage equator = base;
  for (std::int64_t x = 0; x < 64; ++x) {
    polar.pixels.at(0, 0, x) += 0.2;
    equator.pixels.at(0, 16, x) += 0.2;
  }
  CHECK(ws_psnr(base, polar) > ws_psnr(base, equator));
  // Planar PSNR cannot tell them apart.
  CHECK(psnr(base.pixels, polar.pixels) ==
        doctest::Approx(psnr(base.pixels, equator.pixels)).epsilon(1e-12));
}

TEST_CASE("ws_psnr invariant to joint longitude rotation") {
  const ErpImage a = testutil::synthetic_erp(3, 32, 3);
  const ErpImage b = testutil::synthetic_erp(3, 32, 4);
  const double base = ws_psnr(a, b);
  for (std::int64_t shift : {1, 17, 40}) {
    ErpImage ra(3, 32), rb(3, 32);
    for (std::int64_t c = 0; c < 3; ++c)
      for (std::int64_t y = 0; y < 32; ++y)
        for (std::int64_t x = 0; x < 64; ++x) {
          ra.pixels.at(c, y, (x + shift) % 64) = a.pixels.at(c, y, x);
          rb.pixels.at(c, y, (x + shift) % 64) = b.pixels.at(c, y, x);
        }
    CHECK(std::abs(ws_psnr(ra, rb) - base) < 1e-9);
  }
}

TEST_CASE("ssim family: self similarity, ordering, degenerate weighting") {
  const ErpImage x = testutil::synthetic_erp(3, 32, 5);
  CHECK(std::abs(ws_ssim(x, x) - 1.0) < 1e-9);
  CHECK(std::abs(ssim(x.pixels, x.pixels) - 1.0) < 1e-9);

  // Inverted image scores far below a lightly perturbed one.
  ErpImage inverted = x;
  ErpImage noisy = x;
  Rng rng(6);
  for (std::int64_t i = 0; i < x.pixels.numel(); ++i) {
    inverted.pixels[i] = 1.0 - x.pixels[i];
    noisy.pixels[i] = std::clamp(x.pixels[i] + rng.normal(0, 0.01), 0.0, 1.0);
  }
  CHECK(ws_ssim(x, inverted) < ws_ssim(x, noisy));

  // With a single row the cosine weight is cos(0) = 1, so planar SSIM and
  // WS-SSIM coincide exactly.
  ErpImage row_a(1, 1), row_b(1, 1);
  row_a.pixels.vec() = {0.3, 0.5};
  row_b.pixels.vec() = {0.35, 0.45};
  CHECK(ws_ssim(row_a, row_b) ==
        doctest::Approx(ssim(row_a.pixels, row_b.pixels)).epsilon(1e-12));
}

TEST_CASE("metric report csv layout") {
  MetricReport report;
  report.rows.push_back({"img0", 30.0, 0.9, 31.0, 0.92});
  report.rows.push_back({"img1", 32.0, 0.8, 33.0, 0.82});
  const auto mean = report.mean();
  CHECK(mean.ws_psnr == doctest::Approx(31.0));
  CHECK(mean.ssim == doctest::Approx(0.87));
  const auto csv = report.to_csv();
  CHECK(csv.find("name,ws_psnr,ws_ssim,psnr,ssim,lpips") == 0);
  CHECK(csv.find("unavailable") != std::string::npos);
  CHECK(csv.find("mean,") != std::string::npos);
}

TEST_CASE("shape mismatch raises") {
  const ErpImage a = testutil::synthetic_erp(1, 16);
  const ErpImage b = testutil::synthetic_erp(1, 32);
  CHECK_THROWS(ws_psnr(a, b));
  CHECK_THROWS(ws_ssim(a, b));
}
