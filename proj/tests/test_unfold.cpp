#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "panosr/core/kernels.hpp"
#include "panosr/unfold/steps.hpp"
#include "testutil.hpp"

using namespace panosr;
using namespace panosr::unfold;

namespace {

double residual_norm2(const Tensor& x, const InverseProblem& p) {
  const Tensor ax = p.op->forward(x);
  return kern::sqdiff_sum(ax.data(), p.y.data(),
                          static_cast<std::size_t>(ax.numel()));
}

}  // namespace

TEST_CASE("grad_step: identity operator with alpha=0.5 lands on y") {
  Rng rng(1);
  const Tensor x = testutil::random_tensor({1, 8, 8}, rng);
  const Tensor y = testutil::random_tensor({1, 8, 8}, rng);
  const auto op = identity_operator({1, 8, 8});
  InverseProblem problem{y, &op};
  const Tensor out = grad_step(x, problem, 0.5);
  for (std::int64_t i = 0; i < out.numel(); ++i)
    CHECK(out[i] == doctest::Approx(y[i]).epsilon(1e-12));
}

TEST_CASE("grad_step: consistent point is a fixed point") {
  Rng rng(2);
  const auto op = bicubic_operator(4, {1, 32, 32});
  const Tensor x = testutil::random_tensor({1, 32, 32}, rng, 0.0, 1.0);
  InverseProblem problem{op.forward(x), &op};
  const Tensor out = grad_step(x, problem, 0.3);
  for (std::int64_t i = 0; i < out.numel(); ++i)
    CHECK(out[i] == doctest::Approx(x[i]).epsilon(1e-9));
}

TEST_CASE("grad_step decreases the data-fidelity residual") {
  // single derived case at alpha=0.1, x4 on 64x64
  {
    Rng rng(3);
    const auto op = bicubic_operator(4, {1, 64, 64});
    const Tensor x = testutil::random_tensor({1, 64, 64}, rng, 0.0, 1.0);
    const Tensor y = testutil::random_tensor({1, 16, 16}, rng, 0.0, 1.0);
    InverseProblem problem{y, &op};
    const Tensor stepped = grad_step(x, problem, 0.1);
    CHECK(residual_norm2(stepped, problem) < residual_norm2(x, problem));
  }
  // quantified invariant: alpha=1e-2, 50 random trials, zero failures
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng(100 + trial);
    const auto op = bicubic_operator(2, {1, 16, 16});
    const Tensor x = testutil::random_tensor({1, 16, 16}, rng, 0.0, 1.0);
    const Tensor y = testutil::random_tensor({1, 8, 8}, rng, 0.0, 1.0);
    InverseProblem problem{y, &op};
    const Tensor stepped = grad_step(x, problem, 1e-2);
    if (residual_norm2(stepped, problem) >= residual_norm2(x, problem))
      ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("ddnm_step: exact range replacement at alpha=1 for surjective A") {
  Rng rng(4);
  for (const auto& op : {identity_operator({1, 12, 12}),
                         row_selection_operator({1, 12, 12}, 2)}) {
    const Tensor x = testutil::random_tensor({1, 12, 12}, rng);
    Tensor y(op.output_shape);
    for (std::int64_t i = 0; i < y.numel(); ++i) y[i] = rng.uniform(0, 1);
    InverseProblem problem{y, &op};
    const Tensor stepped = ddnm_step(x, problem, 1.0);
    const Tensor ax = op.forward(stepped);
    for (std::int64_t i = 0; i < ax.numel(); ++i)
      CHECK(ax[i] == doctest::Approx(y[i]).epsilon(1e-12));
  }
}

TEST_CASE("ddnm_step: fixed point and alpha=0 identity") {
  Rng rng(5);
  const auto op = bicubic_operator(2, {1, 16, 16});
  const Tensor x = testutil::random_tensor({1, 16, 16}, rng, 0.0, 1.0);
  InverseProblem consistent{op.forward(x), &op};
  const Tensor fixed = ddnm_step(x, consistent, 1.0);
  for (std::int64_t i = 0; i < fixed.numel(); ++i)
    CHECK(fixed[i] == doctest::Approx(x[i]).epsilon(1e-9));

  InverseProblem other{testutil::random_tensor({1, 8, 8}, rng), &op};
  const Tensor same = ddnm_step(x, other, 0.0);
  CHECK(same.vec() == x.vec());
}

TEST_CASE("dps_estimate_x0: closed forms and linearity") {
  Rng rng(6);
  const Tensor x = testutil::random_tensor({1, 6, 6}, rng);
  const Tensor eps = testutil::random_tensor({1, 6, 6}, rng);

  const Tensor same = dps_estimate_x0(x, eps, 1.0);
  CHECK(same.vec() == x.vec());

  Tensor zero({1, 6, 6});
  const Tensor doubled = dps_estimate_x0(x, zero, 0.25);
  for (std::int64_t i = 0; i < x.numel(); ++i)
    CHECK(doubled[i] == doctest::Approx(2.0 * x[i]).epsilon(1e-12));

  CHECK_THROWS(dps_estimate_x0(x, eps, 0.0));
  CHECK_THROWS(dps_estimate_x0(x, eps, -0.1));

  // superposition: estimate is linear in (x_t, eps)
  const Tensor x2 = testutil::random_tensor({1, 6, 6}, rng);
  const Tensor e2 = testutil::random_tensor({1, 6, 6}, rng);
  Tensor xmix({1, 6, 6}), emix({1, 6, 6});
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    xmix[i] = 0.3 * x[i] + 0.7 * x2[i];
    emix[i] = 0.3 * eps[i] + 0.7 * e2[i];
  }
  const Tensor lhs = dps_estimate_x0(xmix, emix, 0.4);
  const Tensor r1 = dps_estimate_x0(x, eps, 0.4);
  const Tensor r2 = dps_estimate_x0(x2, e2, 0.4);
  for (std::int64_t i = 0; i < lhs.numel(); ++i)
    CHECK(lhs[i] ==
          doctest::Approx(0.3 * r1[i] + 0.7 * r2[i]).epsilon(1e-12));

  // conventional form differs only in the eps coefficient
  const Tensor conv = dps_estimate_x0(x, eps, 0.25,
                                      X0EstimateForm::conventional);
  for (std::int64_t i = 0; i < x.numel(); ++i)
    CHECK(conv[i] == doctest::Approx((x[i] + std::sqrt(0.75) * eps[i]) / 0.5)
                         .epsilon(1e-12));
}

TEST_CASE("dps_guided_step: zeta=0 collapses to the x0 estimate") {
  Rng rng(7);
  const auto op = bicubic_operator(2, {1, 8, 8});
  const Tensor x = testutil::random_tensor({1, 8, 8}, rng);
  const Tensor eps = testutil::random_tensor({1, 8, 8}, rng);
  InverseProblem problem{testutil::random_tensor({1, 4, 4}, rng), &op};
  GuidanceConfig cfg;
  cfg.zeta = 0.0;
  cfg.alpha_bar = 0.25;
  const Tensor got = dps_guided_step(x, eps, problem, cfg);
  const Tensor want = dps_estimate_x0(x, eps, 0.25);
  CHECK(got.vec() == want.vec());
}

TEST_CASE("bicubic operator: constants, pseudo-inverse probe, linearity") {
  const auto op = bicubic_operator(4, {1, 64, 64});
  Tensor flat({1, 64, 64}, 0.42);
  const Tensor down = op.forward(flat);
  for (std::int64_t i = 0; i < down.numel(); ++i)
    CHECK(down[i] == doctest::Approx(0.42).epsilon(1e-12));
  const Tensor up = op.pinv(down);
  for (std::int64_t i = 0; i < up.numel(); ++i)
    CHECK(up[i] == doctest::Approx(0.42).epsilon(1e-12));

  const auto report = probe_operator(op, 100, 77);
  MESSAGE("bicubic x4 probe: linearity=", report.linearity_max_abs,
          " pinv=", report.pinv_max_abs);
  CHECK(report.linearity_max_abs <= 1e-9);
  CHECK(report.pinv_max_abs <= 0.05);

  CHECK_THROWS(bicubic_operator(4, {1, 30, 30}));
  CHECK_THROWS(bicubic_operator(1, {1, 32, 32}));
}

TEST_CASE("shape validation raises everywhere") {
  Rng rng(8);
  const auto op = bicubic_operator(2, {1, 8, 8});
  InverseProblem bad{testutil::random_tensor({1, 3, 3}, rng), &op};
  CHECK_THROWS(bad.validate());
  InverseProblem good{testutil::random_tensor({1, 4, 4}, rng), &op};
  CHECK_THROWS(grad_step(testutil::random_tensor({1, 6, 6}, rng), good, 0.1));
  CHECK_THROWS(ddnm_step(testutil::random_tensor({1, 6, 6}, rng), good, 0.1));
}
