#include "panosr/degrade/stages.hpp"

#include <algorithm>
#include <cmath>

#include "panosr/core/image.hpp"
#include "panosr/core/image_io.hpp"
#include "panosr/core/kernels.hpp"

namespace panosr::degrade {

Tensor make_gaussian_kernel(const BlurKernelSpec& spec) {
  const double sx = spec.sigma_x;
  const double sy = spec.anisotropic ? spec.sigma_y : spec.sigma_x;
  if (sx <= 0.0 || sy <= 0.0)
    throw std::invalid_argument("gaussian kernel: sigma must be positive");
  int size = spec.size;
  if (size == 0) {
    const double reach = 3.0 * std::max(sx, sy);
    size = 2 * static_cast<int>(std::ceil(reach)) + 1;
    size = std::clamp(size, 3, 21);
  }
  if (size < 3 || size % 2 == 0)
    throw std::invalid_argument("gaussian kernel: size must be odd and >= 3");

  const double ct = std::cos(spec.theta);
  const double st = std::sin(spec.theta);
  const int half = size / 2;
  Tensor k({1, size, size});
  double total = 0.0;
  for (int y = -half; y <= half; ++y) {
    for (int x = -half; x <= half; ++x) {
      // rotate into the kernel's principal frame
      const double rx = ct * x + st * y;
      const double ry = -st * x + ct * y;
      const double v =
          std::exp(-(rx * rx / (2.0 * sx * sx) + ry * ry / (2.0 * sy * sy)));
      k.at(0, y + half, x + half) = v;
      total += v;
    }
  }
  kern::scale(k.data(), 1.0 / total, static_cast<std::size_t>(k.numel()));
  return k;
}

namespace {

inline std::int64_t reflect101(std::int64_t i, std::int64_t n) {
  // ... 2 1 | 0 1 2 ... n-1 | n-2 n-3 ...
  if (n == 1) return 0;
  const std::int64_t period = 2 * (n - 1);
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

}  // namespace

Tensor apply_blur(const Tensor& chw, const Tensor& kernel) {
  require_chw(chw, "apply_blur");
  require_chw(kernel, "apply_blur kernel");
  const double ksum =
      kern::sum(kernel.data(), static_cast<std::size_t>(kernel.numel()));
  if (std::abs(ksum - 1.0) > 1e-6)
    throw std::invalid_argument("apply_blur: kernel must be normalized to 1");
  const std::int64_t kh = kernel.dim(1);
  const std::int64_t kw = kernel.dim(2);
  if (kh % 2 == 0 || kw % 2 == 0)
    throw std::invalid_argument("apply_blur: kernel dims must be odd");

  const std::int64_t channels = chw.dim(0);
  const std::int64_t h = chw.dim(1);
  const std::int64_t w = chw.dim(2);
  const std::int64_t ry = kh / 2;
  const std::int64_t rx = kw / 2;

  // Reflect-pad once, then accumulate full rows per kernel tap.
  const std::int64_t ph = h + 2 * ry;
  const std::int64_t pw = w + 2 * rx;
  Tensor out({channels, h, w});
  std::vector<double> padded(static_cast<std::size_t>(ph * pw));
  for (std::int64_t c = 0; c < channels; ++c) {
    for (std::int64_t y = 0; y < ph; ++y) {
      const std::int64_t sy = reflect101(y - ry, h);
      for (std::int64_t x = 0; x < pw; ++x) {
        padded[static_cast<std::size_t>(y * pw + x)] =
            chw.at(c, sy, reflect101(x - rx, w));
      }
    }
    for (std::int64_t ky = 0; ky < kh; ++ky) {
      for (std::int64_t kx = 0; kx < kw; ++kx) {
        const double kv = kernel.at(0, ky, kx);
        if (kv == 0.0) continue;
        for (std::int64_t y = 0; y < h; ++y) {
          const double* src = padded.data() + (y + ky) * pw + kx;
          double* dst = out.data() + (c * h + y) * w;
          kern::axpy(dst, src, kv, static_cast<std::size_t>(w));
        }
      }
    }
  }
  return out;
}

Tensor add_noise(const Tensor& chw, NoiseKind kind, double level, Rng& rng) {
  require_chw(chw, "add_noise");
  if (level < 0.0) throw std::invalid_argument("add_noise: level must be >= 0");
  if (level == 0.0) return chw;

  Tensor out = chw;
  const std::int64_t n = out.numel();
  if (kind == NoiseKind::gaussian) {
    for (std::int64_t i = 0; i < n; ++i) out[i] += rng.normal(0.0, level);
  } else {
    // Shot noise: counts chosen so stddev at mid-gray (0.5) equals `level`.
    const double counts = 0.5 / (level * level);
    for (std::int64_t i = 0; i < n; ++i) {
      const double lam = std::max(0.0, out[i]) * counts;
      out[i] = static_cast<double>(rng.poisson(lam)) / counts;
    }
  }
  kern::clamp01(out.data(), static_cast<std::size_t>(n));
  return out;
}

Tensor add_noise(const Tensor& chw, NoiseKind kind, double level,
                 std::uint64_t seed) {
  Rng rng(seed);
  return add_noise(chw, kind, level, rng);
}

Tensor jpeg_roundtrip(const Tensor& chw, int quality) {
  return jpeg_roundtrip_raster(chw, quality);
}

}  // namespace panosr::degrade
