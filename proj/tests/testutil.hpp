#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "panosr/core/image.hpp"
#include "panosr/core/rng.hpp"
#include "panosr/core/tensor.hpp"

namespace panosr::testutil {

// Smooth multi-frequency raster standing in for natural content. Band-limited
// by construction so resampling round trips are meaningful.
inline Tensor synthetic_image(std::int64_t channels, std::int64_t h,
                              std::int64_t w, std::uint64_t seed = 7) {
  Rng rng(seed);
  Tensor img({channels, h, w});
  struct Wave {
    double fy, fx, phase, amp;
  };
  for (std::int64_t c = 0; c < channels; ++c) {
    std::vector<Wave> waves;
    for (int k = 0; k < 8; ++k) {
      waves.push_back({rng.uniform(0.5, 6.0), rng.uniform(0.5, 6.0),
                       rng.uniform(0.0, 2.0 * M_PI), rng.uniform(0.05, 0.2)});
    }
    for (std::int64_t y = 0; y < h; ++y) {
      for (std::int64_t x = 0; x < w; ++x) {
        double v = 0.5;
        for (const auto& wv : waves) {
          v += wv.amp * std::sin(2.0 * M_PI * (wv.fy * y / h + wv.fx * x / w) +
                                 wv.phase);
        }
        img.at(c, y, x) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return img;
}

inline ErpImage synthetic_erp(std::int64_t channels, std::int64_t h,
                              std::uint64_t seed = 7) {
  // Periodic in longitude so the wrap seam stays smooth: integer fx only.
  Rng rng(seed);
  Tensor img({channels, h, 2 * h});
  for (std::int64_t c = 0; c < channels; ++c) {
    struct Wave {
      int fx;
      double fy, phase, amp;
    };
    std::vector<Wave> waves;
    for (int k = 0; k < 8; ++k) {
      waves.push_back({rng.uniform_int(1, 5), rng.uniform(0.5, 5.0),
                       rng.uniform(0.0, 2.0 * M_PI), rng.uniform(0.05, 0.18)});
    }
    for (std::int64_t y = 0; y < h; ++y) {
      for (std::int64_t x = 0; x < 2 * h; ++x) {
        double v = 0.5;
        for (const auto& wv : waves) {
          v += wv.amp * std::sin(2.0 * M_PI * (wv.fy * y / h +
                                               wv.fx * x / (2.0 * h)) +
                                 wv.phase);
        }
        img.at(c, y, x) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return ErpImage(std::move(img));
}

// ERP with hard edges on top of the smooth base: random filled boxes.
// Piecewise-constant regions make blur levels observable, which the
// degradation-predictor tests need.
inline ErpImage textured_erp(std::int64_t h, std::uint64_t seed = 7) {
  ErpImage erp = synthetic_erp(3, h, seed);
  Rng rng(seed ^ 0xabcd1234u);
  const std::int64_t w = 2 * h;
  for (int box = 0; box < 24; ++box) {
    const std::int64_t bw = rng.uniform_int(3, static_cast<int>(w / 4));
    const std::int64_t bh = rng.uniform_int(3, static_cast<int>(h / 4));
    const std::int64_t x0 = rng.uniform_int(0, static_cast<int>(w - 1));
    const std::int64_t y0 = rng.uniform_int(0, static_cast<int>(h - bh - 1));
    double color[3] = {rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)};
    for (std::int64_t c = 0; c < 3; ++c)
      for (std::int64_t y = y0; y < y0 + bh; ++y)
        for (std::int64_t x = x0; x < x0 + bw; ++x)
          erp.pixels.at(c, y, x % w) = color[c];
  }
  return erp;
}

inline Tensor random_tensor(std::vector<std::int64_t> shape, Rng& rng,
                            double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

// Central finite difference of a scalar-valued function at x, one coordinate.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double step) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

inline double rel_err(double got, double want) {
  const double denom = std::max({std::abs(got), std::abs(want), 1e-12});
  return std::abs(got - want) / denom;
}

}  // namespace panosr::testutil

#ifdef PANOSR_TESTUTIL_AUTOGRAD
#include "panosr/autograd/variable.hpp"

namespace panosr::testutil {

// Independent finite-difference oracle for reverse-mode gradients. The graph
// is rebuilt by `build_loss` for every probe; `params` are the leaves under
// test. Samples up to `samples_per_param` coordinates of each parameter and
// returns the worst relative error observed.
inline double grad_check(const std::function<ag::Var()>& build_loss,
                         const std::vector<ag::Var>& params, Rng& rng,
                         int samples_per_param = 12, double step = 1e-4) {
  for (const auto& p : params) p->zero_grad();
  ag::backward(build_loss());
  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (const auto& p : params) {
    if (p->grad.empty())
      throw std::logic_error("grad_check: parameter received no gradient");
    grads.push_back(p->grad);
  }

  auto eval = [&]() { return build_loss()->value[0]; };

  double worst = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto& value = params[pi]->value;
    const std::int64_t n = value.numel();
    const int probes =
        static_cast<int>(std::min<std::int64_t>(n, samples_per_param));
    for (int s = 0; s < probes; ++s) {
      const std::int64_t idx =
          n == 1 ? 0 : rng.uniform_int(0, static_cast<int>(n - 1));
      const double saved = value[idx];
      value[idx] = saved + step;
      const double plus = eval();
      value[idx] = saved - step;
      const double minus = eval();
      value[idx] = saved;
      const double fd = (plus - minus) / (2.0 * step);
      const double got = grads[pi][idx];
      const double err =
          std::abs(fd - got) / std::max(std::abs(fd) + std::abs(got), 1e-6);
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace panosr::testutil
#endif
