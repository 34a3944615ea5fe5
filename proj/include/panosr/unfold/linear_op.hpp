#pragma once

#include <functional>
#include <string>
#include <vector>

#include "panosr/core/tensor.hpp"

namespace panosr::unfold {

// Degradation operator A with pseudo-inverse A-dagger. apply must be linear;
// probe_linearity / probe_pseudo_inverse verify this numerically.
struct LinearOperator {
  std::string name;
  std::vector<std::int64_t> input_shape;
  std::vector<std::int64_t> output_shape;
  std::function<Tensor(const Tensor&)> apply;       // x -> A x
  std::function<Tensor(const Tensor&)> pinv_apply;  // y -> A† y
  // True when A A† = I holds exactly (identity, row selection); the alpha=1
  // range-space replacement is then exact.
  bool exact_pinv = false;

  Tensor forward(const Tensor& x) const;
  Tensor pinv(const Tensor& y) const;
};

LinearOperator identity_operator(std::vector<std::int64_t> shape);

// Keeps every `stride`-th pixel per axis; A† zero-fills. A A† = I exactly.
LinearOperator row_selection_operator(std::vector<std::int64_t> shape,
                                      int stride);

// apply = antialiased bicubic downsample by `scale`; pinv_apply = bicubic
// upsample. A A† A only approximates A; see probe_pseudo_inverse.
LinearOperator bicubic_operator(int scale, std::vector<std::int64_t> shape);

struct ProbeReport {
  double linearity_max_abs = 0.0;   // |A(ax+bz) - aAx - bAz|
  double pinv_max_abs = 0.0;        // |A A† A x - A x|
  int trials = 0;
};

ProbeReport probe_operator(const LinearOperator& op, int trials,
                           std::uint64_t seed);

}  // namespace panosr::unfold
