#pragma once

#include "panosr/core/image.hpp"

namespace panosr::sphere {

// Dual circular fisheye in the equidistant model r = f * theta. The front
// lens looks along (lat 0, lon 0), the back lens along (lat 0, lon pi); each
// covers its hemisphere plus a ~10% overlap ring so interpolation near the
// hemisphere seam never leaves the image circle. Pixels outside the circle
// (radius side/2) are flagged by fisheye_circle_mask; they hold equidistant
// extension content that only serves as interpolation support.
struct FisheyePair {
  Tensor front;  // C x S x S
  Tensor back;   // C x S x S

  std::int64_t side() const { return front.dim(1); }
  std::int64_t channels() const { return front.dim(0); }
};

// Max lens angle held by the image circle; hemisphere edge sits at
// (pi/2)/kFisheyeThetaMax of the circle radius.
inline constexpr double kFisheyeThetaMax = 1.10 * M_PI / 2.0;

// Mask of pixels inside the image circle (1 inside, 0 outside).
Tensor fisheye_circle_mask(std::int64_t side);

FisheyePair erp_to_fisheye(const ErpImage& erp, std::int64_t side);
ErpImage fisheye_to_erp(const FisheyePair& pair, std::int64_t erp_h);

}  // namespace panosr::sphere
