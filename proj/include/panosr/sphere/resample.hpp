#pragma once

#include "panosr/core/tensor.hpp"

namespace panosr::sphere {

// Horizontal edge policy. Rows are always clamped; columns wrap for
// equirectangular rasters (longitude is periodic) and clamp for planar ones.
enum class EdgeX { clamp, wrap };

enum class ResizeMode { bicubic, bilinear, area };

// Catmull-Rom cubic convolution kernel (a = -0.5), support [-2, 2].
double cubic_kernel(double t);

// Separable cubic-convolution point sample at fractional pixel-center
// coordinates (x, y). Exact at integer coordinates; reproduces linear ramps.
double sample_bicubic(const Tensor& chw, std::int64_t c, double x, double y,
                      EdgeX edge_x = EdgeX::clamp);

// Grid resampler, pixel-center alignment: input coordinate of output index o
// is (o + 0.5) * in/out - 0.5. With antialias on, bicubic and bilinear
// kernels are widened by the scale ratio when minifying; with it off the
// kernel keeps its unit support (point-sampled decimation). Area mode
// integrates exact box overlap. Linear in the input for all modes.
Tensor resize(const Tensor& chw, std::int64_t out_h, std::int64_t out_w,
              ResizeMode mode = ResizeMode::bicubic,
              EdgeX edge_x = EdgeX::clamp, bool antialias = true);

// Convenience: scale both dimensions by an integer factor.
Tensor resize_by(const Tensor& chw, double factor,
                 ResizeMode mode = ResizeMode::bicubic,
                 EdgeX edge_x = EdgeX::clamp);

}  // namespace panosr::sphere
