#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "panosr/core/rng.hpp"
#include "panosr/metrics/metrics.hpp"
#include "panosr/sphere/fisheye.hpp"
#include "panosr/sphere/gnomonic.hpp"
#include "panosr/sphere/resample.hpp"
#include "panosr/sphere/tangent.hpp"
#include "testutil.hpp"

using namespace panosr;
using namespace panosr::sphere;

TEST_CASE("gnomonic forward: closed-form cases") {
  const auto p0 = gnomonic_forward({0, 0}, {0, 0});
  CHECK(p0.u == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p0.v == doctest::Approx(0.0).epsilon(1e-15));

  // 45 deg east of the tangent point: u = tan(pi/4) = 1.
  const auto p1 = gnomonic_forward({0, M_PI / 4}, {0, 0});
  CHECK(p1.u == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p1.v == doctest::Approx(0.0).epsilon(1e-12));

  // Same by symmetry, 45 deg north: v = 1.
  const auto p2 = gnomonic_forward({M_PI / 4, 0}, {0, 0});
  CHECK(p2.u == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p2.v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gnomonic forward rejects the horizon") {
  CHECK_THROWS_AS(gnomonic_forward({0, M_PI / 2}, {0, 0}),
                  OutOfHemisphereError);
  CHECK_THROWS_AS(gnomonic_forward({0, 3}, {0, 0}), OutOfHemisphereError);
}

TEST_CASE("gnomonic inverse: tangent point and forward example") {
  const auto c = gnomonic_inverse({0, 0}, {0.3, 1.1});
  CHECK(c.lat == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(c.lon == doctest::Approx(1.1).epsilon(1e-15));

  const auto p = gnomonic_inverse({1.0, 0.0}, {0, 0});
  CHECK(p.lat == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.lon == doctest::Approx(M_PI / 4).epsilon(1e-12));
}

TEST_CASE("gnomonic inverse-of-forward identity on random hemisphere points") {
  Rng rng(123);
  for (int trial = 0; trial < 10; ++trial) {
    const SphPoint center{rng.uniform(-1.4, 1.4), rng.uniform(-M_PI, M_PI)};
    int accepted = 0;
    while (accepted < 1000) {
      const SphPoint p{std::asin(rng.uniform(-1.0, 1.0)),
                       rng.uniform(-M_PI, M_PI)};
      if (angular_cos(p, center) < 0.05) continue;  // keep well inside
      ++accepted;
      const auto plane = gnomonic_forward(p, center);
      const auto back = gnomonic_inverse(plane, center);
      CHECK(std::abs(back.lat - p.lat) < 1e-9);
      const double dlon = std::abs(wrap_longitude(back.lon - p.lon));
      CHECK(dlon * std::cos(p.lat) < 1e-9);
    }
  }
}

TEST_CASE("sample_bicubic node interpolation, constants, linear ramps") {
  Tensor img({1, 6, 7});
  Rng rng(5);
  for (std::int64_t i = 0; i < img.numel(); ++i) img[i] = rng.uniform(0, 1);
  CHECK(sample_bicubic(img, 0, 3.0, 2.0) == doctest::Approx(img.at(0, 2, 3)));

  Tensor flat({1, 6, 7}, 0.5);
  CHECK(sample_bicubic(flat, 0, 2.37, 3.91) ==
        doctest::Approx(0.5).epsilon(1e-12));

  Tensor ramp({1, 6, 7});
  for (std::int64_t y = 0; y < 6; ++y)
    for (std::int64_t x = 0; x < 7; ++x) ramp.at(0, y, x) = 0.1 * x;
  CHECK(sample_bicubic(ramp, 0, 2.5, 2.0) ==
        doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("resize: identity, constants, band-limited round trip") {
  const Tensor img = testutil::synthetic_image(1, 32, 48);
  CHECK(resize(img, 32, 48).vec() == img.vec());

  Tensor flat({3, 16, 16}, 0.25);
  for (auto mode :
       {ResizeMode::bicubic, ResizeMode::bilinear, ResizeMode::area}) {
    const Tensor up = resize(flat, 33, 40, mode);
    for (std::int64_t i = 0; i < up.numel(); ++i)
      CHECK(up[i] == doctest::Approx(0.25).epsilon(1e-12));
  }

  // down x2 then up x2 on low-frequency content; recorded floor 35 dB.
  const Tensor big = testutil::synthetic_image(1, 64, 64, 11);
  const Tensor down = resize(big, 32, 32);
  const Tensor back = resize(down, 64, 64);
  CHECK(metrics::psnr(big, back) >= 35.0);
}

TEST_CASE("default grid covers the sphere with 18 views") {
  const TangentGrid grid = default_grid(128);
  CHECK(grid.view_count() == 18);
  CHECK(grid.covers_sphere(96));
}

TEST_CASE("grid config round trip") {
  const TangentGrid grid = default_grid(64);
  const TangentGrid parsed = parse_grid(format_grid(grid));
  REQUIRE(parsed.view_count() == grid.view_count());
  CHECK(parsed.patch_size == 64);
  CHECK(parsed.fov == doctest::Approx(grid.fov).epsilon(1e-9));
  for (std::size_t i = 0; i < grid.centers.size(); ++i) {
    CHECK(parsed.centers[i].lat ==
          doctest::Approx(grid.centers[i].lat).epsilon(1e-9));
  }
  CHECK_THROWS(parse_grid("fov 80\npatch 32\nwhat 1 2\n"));
}

TEST_CASE("erp_to_tangent constant image and shape contract") {
  ErpImage erp(3, 32);
  for (std::int64_t i = 0; i < erp.pixels.numel(); ++i) erp.pixels[i] = 0.5;
  const TangentGrid grid = default_grid(128);
  const auto views = erp_to_tangent(erp, grid, 2);
  REQUIRE(views.views.size() == 18);
  for (const auto& v : views.views) {
    REQUIRE(v.shape() == std::vector<std::int64_t>{3, 128, 128});
    for (std::int64_t i = 0; i < v.numel(); ++i)
      CHECK(v[i] == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("tangent_to_erp fuses constants exactly") {
  const TangentGrid grid = default_grid(32);
  TangentViewSet set;
  set.grid = grid;
  for (std::size_t m = 0; m < grid.view_count(); ++m) {
    set.views.emplace_back(std::vector<std::int64_t>{1, 32, 32}, 0.5);
    set.valid_mask.emplace_back(std::vector<std::int64_t>{1, 32, 32}, 1.0);
  }
  const ErpImage erp = tangent_to_erp(set, 24, 1);
  for (std::int64_t i = 0; i < erp.pixels.numel(); ++i)
    CHECK(erp.pixels[i] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("projection round trip quality floors") {
  // Latitude gradient, pre-upsample 2: recorded regression floor 40 dB.
  {
    ErpImage grad(1, 64);
    for (std::int64_t y = 0; y < 64; ++y)
      for (std::int64_t x = 0; x < 128; ++x)
        grad.pixels.at(0, y, x) = 0.2 + 0.6 * (y + 0.5) / 64.0;
    const TangentGrid grid = default_grid(64);
    const auto views = erp_to_tangent(grad, grid, 2);
    const ErpImage back = tangent_to_erp(views, 64, 2);
    CHECK(metrics::ws_psnr(grad, back) >= 40.0);
  }
  // Natural 256x512 image: recorded regression floor 30 dB.
  {
    const ErpImage erp = testutil::synthetic_erp(3, 256, 21);
    const TangentGrid grid = default_grid(128);
    const auto views = erp_to_tangent(erp, grid, 2);
    const ErpImage back = tangent_to_erp(views, 256, 2);
    CHECK(metrics::ws_psnr(erp, back) >= 30.0);
  }
}

TEST_CASE("tangent fusion weights sum to one by construction") {
  // Fusing views that are identically 1 must give exactly 1 after
  // normalization at every pixel.
  const TangentGrid grid = default_grid(16);
  TangentViewSet set;
  set.grid = grid;
  for (std::size_t m = 0; m < grid.view_count(); ++m) {
    set.views.emplace_back(std::vector<std::int64_t>{1, 16, 16}, 1.0);
    set.valid_mask.emplace_back(std::vector<std::int64_t>{1, 16, 16}, 1.0);
  }
  const ErpImage fused = tangent_to_erp(set, 16, 1);
  for (std::int64_t i = 0; i < fused.pixels.numel(); ++i)
    CHECK(fused.pixels[i] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("projection determinism") {
  const ErpImage erp = testutil::synthetic_erp(1, 32, 3);
  const TangentGrid grid = default_grid(32);
  const auto a = erp_to_tangent(erp, grid, 2);
  const auto b = erp_to_tangent(erp, grid, 2);
  for (std::size_t m = 0; m < a.views.size(); ++m)
    CHECK(a.views[m].vec() == b.views[m].vec());
  const auto ea = tangent_to_erp(a, 32, 2);
  const auto eb = tangent_to_erp(b, 32, 2);
  CHECK(ea.pixels.vec() == eb.pixels.vec());
}

TEST_CASE("fisheye: pole of hemisphere maps to disc center") {
  const ErpImage erp = testutil::synthetic_erp(1, 64, 13);
  const auto pair = erp_to_fisheye(erp, 64);
  // The front disc center looks along (0,0); compare against direct sampling.
  const double x = (0.0 + M_PI) / (2.0 * M_PI) * 128 - 0.5;
  const double y = (M_PI / 2.0) / M_PI * 64 - 0.5;
  const double want = sample_bicubic(erp.pixels, 0, x, y, EdgeX::wrap);
  // theta=0 => r=0: the disc center pixel block straddles the axis; sample
  // the continuous center via bicubic.
  const double got = sample_bicubic(pair.front, 0, 31.5, 31.5, EdgeX::clamp);
  CHECK(got == doctest::Approx(want).epsilon(5e-3));
}

TEST_CASE("fisheye constant round trip is exact") {
  ErpImage flat(3, 48);
  for (std::int64_t i = 0; i < flat.pixels.numel(); ++i)
    flat.pixels[i] = 0.625;
  const auto pair = erp_to_fisheye(flat, 48);
  const ErpImage back = fisheye_to_erp(pair, 48);
  for (std::int64_t i = 0; i < back.pixels.numel(); ++i)
    CHECK(back.pixels[i] == doctest::Approx(0.625).epsilon(1e-6));
}

TEST_CASE("fisheye natural round trip floor") {
  const ErpImage erp = testutil::synthetic_erp(3, 128, 17);
  const auto pair = erp_to_fisheye(erp, 128);
  const ErpImage back = fisheye_to_erp(pair, 128);
  CHECK(metrics::ws_psnr(erp, back) >= 28.0);
}
