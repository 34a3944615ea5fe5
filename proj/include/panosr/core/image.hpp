#pragma once

#include <cmath>
#include <stdexcept>

#include "panosr/core/tensor.hpp"

namespace panosr {

// Planar raster helpers. Images are CHW tensors with values in [0,1].
inline void require_chw(const Tensor& t, const char* what) {
  if (t.rank() != 3)
    throw std::invalid_argument(std::string(what) + ": expected CHW tensor, got " +
                                t.shape_str());
}

inline bool all_finite(const Tensor& t) {
  for (std::int64_t i = 0; i < t.numel(); ++i)
    if (!std::isfinite(t[i])) return false;
  return true;
}

// Equirectangular raster: full 360x180 coverage, so W == 2H.
// Column j maps to longitude (j + 0.5)/W * 2*pi - pi, row i to latitude
// pi/2 - (i + 0.5)/H * pi.
struct ErpImage {
  Tensor pixels;  // C x H x W

  ErpImage() = default;
  explicit ErpImage(Tensor px) : pixels(std::move(px)) { validate(); }
  ErpImage(std::int64_t channels, std::int64_t h)
      : pixels({channels, h, 2 * h}) {}

  std::int64_t channels() const { return pixels.dim(0); }
  std::int64_t height() const { return pixels.dim(1); }
  std::int64_t width() const { return pixels.dim(2); }

  void validate() const {
    require_chw(pixels, "erp");
    if (pixels.dim(2) != 2 * pixels.dim(1))
      throw std::invalid_argument("erp: width must be 2x height, got " +
                                  pixels.shape_str());
  }
};

inline double longitude_of_col(double j, std::int64_t w) {
  return (j + 0.5) / static_cast<double>(w) * 2.0 * M_PI - M_PI;
}
inline double latitude_of_row(double i, std::int64_t h) {
  return M_PI / 2.0 - (i + 0.5) / static_cast<double>(h) * M_PI;
}

}  // namespace panosr
