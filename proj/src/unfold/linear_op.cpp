#include "panosr/unfold/linear_op.hpp"

#include <cmath>

#include "panosr/core/rng.hpp"
#include "panosr/sphere/resample.hpp"

namespace panosr::unfold {

Tensor LinearOperator::forward(const Tensor& x) const {
  if (x.shape() != input_shape)
    throw std::invalid_argument("operator " + name + ": input shape " +
                                x.shape_str() + " does not match");
  return apply(x);
}

Tensor LinearOperator::pinv(const Tensor& y) const {
  if (y.shape() != output_shape)
    throw std::invalid_argument("operator " + name + ": output shape " +
                                y.shape_str() + " does not match");
  return pinv_apply(y);
}

LinearOperator identity_operator(std::vector<std::int64_t> shape) {
  LinearOperator op;
  op.name = "identity";
  op.input_shape = shape;
  op.output_shape = shape;
  op.apply = [](const Tensor& x) { return x; };
  op.pinv_apply = [](const Tensor& y) { return y; };
  op.exact_pinv = true;
  return op;
}

LinearOperator row_selection_operator(std::vector<std::int64_t> shape,
                                      int stride) {
  if (shape.size() != 3)
    throw std::invalid_argument("row_selection_operator: expects CHW shape");
  if (stride < 1 || shape[1] % stride != 0 || shape[2] % stride != 0)
    throw std::invalid_argument(
        "row_selection_operator: dims must divide by stride");
  const std::int64_t c = shape[0], h = shape[1], w = shape[2];
  const std::int64_t oh = h / stride, ow = w / stride;

  LinearOperator op;
  op.name = "row_selection_x" + std::to_string(stride);
  op.input_shape = shape;
  op.output_shape = {c, oh, ow};
  op.apply = [=](const Tensor& x) {
    Tensor y({c, oh, ow});
    for (std::int64_t ch = 0; ch < c; ++ch)
      for (std::int64_t i = 0; i < oh; ++i)
        for (std::int64_t j = 0; j < ow; ++j)
          y.at(ch, i, j) = x.at(ch, i * stride, j * stride);
    return y;
  };
  op.pinv_apply = [=](const Tensor& y) {
    Tensor x({c, h, w});
    for (std::int64_t ch = 0; ch < c; ++ch)
      for (std::int64_t i = 0; i < oh; ++i)
        for (std::int64_t j = 0; j < ow; ++j)
          x.at(ch, i * stride, j * stride) = y.at(ch, i, j);
    return x;
  };
  op.exact_pinv = true;
  return op;
}

LinearOperator bicubic_operator(int scale, std::vector<std::int64_t> shape) {
  if (shape.size() != 3)
    throw std::invalid_argument("bicubic_operator: expects CHW shape");
  if (scale < 2)
    throw std::invalid_argument("bicubic_operator: scale must be >= 2");
  if (shape[1] % scale != 0 || shape[2] % scale != 0)
    throw std::invalid_argument(
        "bicubic_operator: shape must be divisible by scale");
  const std::int64_t c = shape[0], h = shape[1], w = shape[2];

  LinearOperator op;
  op.name = "bicubic_x" + std::to_string(scale);
  op.input_shape = shape;
  op.output_shape = {c, h / scale, w / scale};
  // Point-sampled (non-antialiased) bicubic on both sides; this pairing
  // keeps A A-dagger A close to A, which the antialiased kernel does not.
  op.apply = [=](const Tensor& x) {
    return sphere::resize(x, h / scale, w / scale, sphere::ResizeMode::bicubic,
                          sphere::EdgeX::clamp, /*antialias=*/false);
  };
  op.pinv_apply = [=](const Tensor& y) {
    return sphere::resize(y, h, w, sphere::ResizeMode::bicubic,
                          sphere::EdgeX::clamp, /*antialias=*/false);
  };
  op.exact_pinv = false;
  return op;
}

ProbeReport probe_operator(const LinearOperator& op, int trials,
                           std::uint64_t seed) {
  Rng rng(seed);
  ProbeReport report;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    Tensor x(op.input_shape), z(op.input_shape);
    for (std::int64_t i = 0; i < x.numel(); ++i) {
      x[i] = rng.uniform(0.0, 1.0);
      z[i] = rng.uniform(0.0, 1.0);
    }
    const double a = rng.uniform(-1.5, 1.5);
    const double b = rng.uniform(-1.5, 1.5);

    Tensor mix(op.input_shape);
    for (std::int64_t i = 0; i < mix.numel(); ++i)
      mix[i] = a * x[i] + b * z[i];
    const Tensor lhs = op.forward(mix);
    const Tensor ax = op.forward(x);
    const Tensor az = op.forward(z);
    for (std::int64_t i = 0; i < lhs.numel(); ++i) {
      const double want = a * ax[i] + b * az[i];
      report.linearity_max_abs =
          std::max(report.linearity_max_abs, std::abs(lhs[i] - want));
    }

    const Tensor again = op.forward(op.pinv(ax));
    for (std::int64_t i = 0; i < again.numel(); ++i)
      report.pinv_max_abs =
          std::max(report.pinv_max_abs, std::abs(again[i] - ax[i]));
  }
  return report;
}

}  // namespace panosr::unfold
