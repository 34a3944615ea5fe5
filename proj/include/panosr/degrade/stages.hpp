#pragma once

#include "panosr/core/rng.hpp"
#include "panosr/core/tensor.hpp"
#include "panosr/degrade/config.hpp"

namespace panosr::degrade {

struct BlurKernelSpec {
  bool anisotropic = false;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double theta = 0.0;  // rotation of the principal axis, radians
  int size = 0;        // odd; 0 picks 2*ceil(3*sigma)+1 clamped to [3,21]
};

// Sampled (an)isotropic Gaussian, normalized to sum 1.
Tensor make_gaussian_kernel(const BlurKernelSpec& spec);

// 2-D convolution with reflect padding. The kernel must sum to 1.
Tensor apply_blur(const Tensor& chw, const Tensor& kernel);

enum class NoiseKind { gaussian, poisson };

// Additive Gaussian (stddev = level) or signal-dependent Poisson shot noise
// calibrated so its stddev at mid-gray equals `level`. Output clipped to
// [0,1]; bit-identical under the same rng state.
Tensor add_noise(const Tensor& chw, NoiseKind kind, double level, Rng& rng);
Tensor add_noise(const Tensor& chw, NoiseKind kind, double level,
                 std::uint64_t seed);

// Baseline JPEG encode/decode at the given quality (values quantized to
// 8 bits on the way in).
Tensor jpeg_roundtrip(const Tensor& chw, int quality);

}  // namespace panosr::degrade
