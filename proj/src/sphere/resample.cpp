#include "panosr/sphere/resample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "panosr/core/image.hpp"
#include "panosr/core/kernels.hpp"

namespace panosr::sphere {

double cubic_kernel(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return (((t - 5.0) * t + 8.0) * t - 4.0) * a;
  return 0.0;
}

namespace {

inline std::int64_t reflect_index(std::int64_t i, std::int64_t n, EdgeX policy) {
  if (policy == EdgeX::wrap) {
    i %= n;
    return i < 0 ? i + n : i;
  }
  return std::clamp<std::int64_t>(i, 0, n - 1);
}

inline double linear_kernel(double t) {
  t = std::abs(t);
  return t < 1.0 ? 1.0 - t : 0.0;
}

// Per-output-index tap list for one resize axis.
struct TapPlan {
  std::int64_t taps = 0;
  std::vector<std::int64_t> start;  // first input index per output index
  std::vector<double> weights;      // taps contiguous weights per output index
};

TapPlan plan_axis(std::int64_t in, std::int64_t out, ResizeMode mode,
                  bool antialias) {
  TapPlan plan;
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  double support;
  double (*kernel)(double) = nullptr;
  switch (mode) {
    case ResizeMode::bicubic:
      kernel = cubic_kernel;
      support = 2.0;
      break;
    case ResizeMode::bilinear:
      kernel = linear_kernel;
      support = 1.0;
      break;
    case ResizeMode::area:
      support = 0.5;
      break;
  }
  const double scale =
      antialias ? std::max(1.0, ratio) : 1.0;  // kernel widening if minifying
  const double radius = support * scale;
  plan.taps = static_cast<std::int64_t>(std::ceil(radius * 2.0)) + 1;
  plan.start.resize(out);
  plan.weights.assign(static_cast<std::size_t>(out * plan.taps), 0.0);

  for (std::int64_t o = 0; o < out; ++o) {
    const double center = (o + 0.5) * ratio - 0.5;
    const std::int64_t lo =
        static_cast<std::int64_t>(std::floor(center - radius + 0.5));
    plan.start[o] = lo;
    double* w = plan.weights.data() + o * plan.taps;
    double total = 0.0;
    for (std::int64_t k = 0; k < plan.taps; ++k) {
      const std::int64_t j = lo + k;
      double wk;
      if (mode == ResizeMode::area) {
        // overlap of input cell [j, j+1) with the output footprint
        const double f0 = (o + 0.0) * ratio;
        const double f1 = (o + 1.0) * ratio;
        const double cell0 = static_cast<double>(j);
        const double cell1 = cell0 + 1.0;
        wk = std::max(0.0, std::min(f1, cell1) - std::max(f0, cell0));
      } else {
        wk = kernel((j - center) / scale);
      }
      w[k] = wk;
      total += wk;
    }
    if (total <= 0.0) throw std::logic_error("resize: degenerate kernel");
    for (std::int64_t k = 0; k < plan.taps; ++k) w[k] /= total;
  }
  return plan;
}

}  // namespace

double sample_bicubic(const Tensor& chw, std::int64_t c, double x, double y,
                      EdgeX edge_x) {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw std::invalid_argument("sample_bicubic: non-finite coordinates");
  const std::int64_t h = chw.dim(1);
  const std::int64_t w = chw.dim(2);
  const std::int64_t x0 = static_cast<std::int64_t>(std::floor(x));
  const std::int64_t y0 = static_cast<std::int64_t>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;

  double wx[4], wy[4];
  for (int k = 0; k < 4; ++k) {
    wx[k] = cubic_kernel(fx - (k - 1));
    wy[k] = cubic_kernel(fy - (k - 1));
  }

  double acc = 0.0;
  for (int ky = 0; ky < 4; ++ky) {
    const std::int64_t yy = std::clamp<std::int64_t>(y0 + ky - 1, 0, h - 1);
    double row = 0.0;
    for (int kx = 0; kx < 4; ++kx) {
      const std::int64_t xx = reflect_index(x0 + kx - 1, w, edge_x);
      row += wx[kx] * chw.at(c, yy, xx);
    }
    acc += wy[ky] * row;
  }
  return acc;
}

Tensor resize(const Tensor& chw, std::int64_t out_h, std::int64_t out_w,
              ResizeMode mode, EdgeX edge_x, bool antialias) {
  require_chw(chw, "resize");
  if (out_h < 1 || out_w < 1)
    throw std::invalid_argument("resize: output dims must be >= 1");
  const std::int64_t channels = chw.dim(0);
  const std::int64_t in_h = chw.dim(1);
  const std::int64_t in_w = chw.dim(2);
  if (in_h == out_h && in_w == out_w) return chw;

  const TapPlan px = plan_axis(in_w, out_w, mode, antialias);
  const TapPlan py = plan_axis(in_h, out_h, mode, antialias);

  // Horizontal pass, then vertical; both accumulate rows through axpy.
  Tensor mid({channels, in_h, out_w});
  for (std::int64_t c = 0; c < channels; ++c) {
    for (std::int64_t y = 0; y < in_h; ++y) {
      const double* src = chw.data() + (c * in_h + y) * in_w;
      double* dst = mid.data() + (c * in_h + y) * out_w;
      for (std::int64_t o = 0; o < out_w; ++o) {
        const double* w = px.weights.data() + o * px.taps;
        double acc = 0.0;
        for (std::int64_t k = 0; k < px.taps; ++k) {
          acc += w[k] * src[reflect_index(px.start[o] + k, in_w, edge_x)];
        }
        dst[o] = acc;
      }
    }
  }

  Tensor out({channels, out_h, out_w});
  for (std::int64_t c = 0; c < channels; ++c) {
    for (std::int64_t o = 0; o < out_h; ++o) {
      double* dst = out.data() + (c * out_h + o) * out_w;
      const double* w = py.weights.data() + o * py.taps;
      for (std::int64_t k = 0; k < py.taps; ++k) {
        const std::int64_t yy =
            std::clamp<std::int64_t>(py.start[o] + k, 0, in_h - 1);
        const double* row = mid.data() + (c * in_h + yy) * out_w;
        kern::axpy(dst, row, w[k], static_cast<std::size_t>(out_w));
      }
    }
  }
  return out;
}

Tensor resize_by(const Tensor& chw, double factor, ResizeMode mode,
                 EdgeX edge_x) {
  const auto out_h =
      static_cast<std::int64_t>(std::llround(chw.dim(1) * factor));
  const auto out_w =
      static_cast<std::int64_t>(std::llround(chw.dim(2) * factor));
  return resize(chw, out_h, out_w, mode, edge_x);
}

}  // namespace panosr::sphere
