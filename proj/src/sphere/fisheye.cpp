#include "panosr/sphere/fisheye.hpp"

#include <algorithm>
#include <cmath>

#include "panosr/core/parallel.hpp"
#include "panosr/sphere/resample.hpp"

namespace panosr::sphere {

namespace {

struct Vec3 {
  double x, y, z;
};

// World frame: x = cos(lat)cos(lon), y = cos(lat)sin(lon), z = sin(lat).
inline Vec3 direction_of(double lat, double lon) {
  const double cl = std::cos(lat);
  return {cl * std::cos(lon), cl * std::sin(lon), std::sin(lat)};
}

struct LensFrame {
  Vec3 forward, right, up;
};

// The back lens is rotated half a turn about the vertical axis, mirroring
// `right` so both images keep the same handedness.
inline LensFrame lens_frame(bool front) {
  if (front) return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  return {{-1, 0, 0}, {0, -1, 0}, {0, 0, 1}};
}

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

}  // namespace

Tensor fisheye_circle_mask(std::int64_t side) {
  Tensor mask({1, side, side});
  const double radius = side / 2.0;
  for (std::int64_t b = 0; b < side; ++b)
    for (std::int64_t a = 0; a < side; ++a) {
      const double dx = a + 0.5 - radius;
      const double dy = b + 0.5 - radius;
      mask.at(0, b, a) = std::hypot(dx, dy) <= radius ? 1.0 : 0.0;
    }
  return mask;
}

FisheyePair erp_to_fisheye(const ErpImage& erp, std::int64_t side) {
  erp.validate();
  if (side < 4) throw std::invalid_argument("erp_to_fisheye: side too small");
  const std::int64_t channels = erp.channels();
  const std::int64_t sh = erp.height();
  const std::int64_t sw = erp.width();
  const double focal = (side / 2.0) / kFisheyeThetaMax;

  FisheyePair pair;
  for (int half = 0; half < 2; ++half) {
    const LensFrame frame = lens_frame(half == 0);
    Tensor img({channels, side, side});
    parallel_for(side, [&](std::int64_t b) {
      for (std::int64_t a = 0; a < side; ++a) {
        const double dx = a + 0.5 - side / 2.0;
        const double dy = b + 0.5 - side / 2.0;
        const double r = std::hypot(dx, dy);
        // Corners beyond the image circle still get equidistant-model
        // content (theta < pi there); fisheye_circle_mask flags them, and
        // keeping them filled gives the inverse full interpolation support
        // near the circle edge.
        const double theta = r / focal;
        const double psi = std::atan2(-dy, dx);  // image y points down
        const double st = std::sin(theta);
        const Vec3 dir{
            std::cos(theta) * frame.forward.x +
                st * (std::cos(psi) * frame.right.x + std::sin(psi) * frame.up.x),
            std::cos(theta) * frame.forward.y +
                st * (std::cos(psi) * frame.right.y + std::sin(psi) * frame.up.y),
            std::cos(theta) * frame.forward.z +
                st * (std::cos(psi) * frame.right.z + std::sin(psi) * frame.up.z)};
        const double lat = std::asin(std::clamp(dir.z, -1.0, 1.0));
        const double lon = std::atan2(dir.y, dir.x);
        const double x = (lon + M_PI) / (2.0 * M_PI) * sw - 0.5;
        const double y = (M_PI / 2.0 - lat) / M_PI * sh - 0.5;
        for (std::int64_t c = 0; c < channels; ++c)
          img.at(c, b, a) = sample_bicubic(erp.pixels, c, x, y, EdgeX::wrap);
      }
    });
    (half == 0 ? pair.front : pair.back) = std::move(img);
  }
  return pair;
}

ErpImage fisheye_to_erp(const FisheyePair& pair, std::int64_t erp_h) {
  if (erp_h < 1) throw std::invalid_argument("fisheye_to_erp: erp_h >= 1");
  require_chw(pair.front, "fisheye_to_erp");
  require_chw(pair.back, "fisheye_to_erp");
  if (!pair.front.same_shape(pair.back))
    throw std::invalid_argument("fisheye_to_erp: hemisphere shape mismatch");

  const std::int64_t channels = pair.channels();
  const std::int64_t side = pair.side();
  const double focal = (side / 2.0) / kFisheyeThetaMax;
  const std::int64_t w = 2 * erp_h;

  ErpImage out(channels, erp_h);
  parallel_for(erp_h, [&](std::int64_t i) {
    const double lat = latitude_of_row(static_cast<double>(i), erp_h);
    for (std::int64_t j = 0; j < w; ++j) {
      const double lon = longitude_of_col(static_cast<double>(j), w);
      const Vec3 dir = direction_of(lat, lon);
      const bool front = dir.x >= 0.0;  // hemispheres tile the sphere
      const LensFrame frame = lens_frame(front);
      const Tensor& img = front ? pair.front : pair.back;

      const double cos_theta = std::clamp(dot(dir, frame.forward), -1.0, 1.0);
      const double theta = std::acos(cos_theta);
      const Vec3 tangential{dir.x - cos_theta * frame.forward.x,
                            dir.y - cos_theta * frame.forward.y,
                            dir.z - cos_theta * frame.forward.z};
      const double psi =
          std::atan2(dot(tangential, frame.up), dot(tangential, frame.right));
      const double r = focal * theta;
      const double x = r * std::cos(psi) + side / 2.0 - 0.5;
      const double y = -r * std::sin(psi) + side / 2.0 - 0.5;
      for (std::int64_t c = 0; c < channels; ++c)
        out.pixels.at(c, i, j) = sample_bicubic(img, c, x, y, EdgeX::clamp);
    }
  });
  return out;
}

}  // namespace panosr::sphere
