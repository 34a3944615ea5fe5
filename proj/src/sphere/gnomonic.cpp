#include "panosr/sphere/gnomonic.hpp"

#include <cmath>

namespace panosr::sphere {

double wrap_longitude(double lon) {
  lon = std::fmod(lon + M_PI, 2.0 * M_PI);
  if (lon < 0.0) lon += 2.0 * M_PI;
  return lon - M_PI;
}

double angular_cos(const SphPoint& a, const SphPoint& b) {
  return std::sin(a.lat) * std::sin(b.lat) +
         std::cos(a.lat) * std::cos(b.lat) * std::cos(a.lon - b.lon);
}

PlanePoint gnomonic_forward(const SphPoint& point, const SphPoint& center) {
  const double sin_lat = std::sin(point.lat);
  const double cos_lat = std::cos(point.lat);
  const double sin_lat0 = std::sin(center.lat);
  const double cos_lat0 = std::cos(center.lat);
  const double dlon = point.lon - center.lon;
  const double cos_dlon = std::cos(dlon);

  const double cos_c = sin_lat0 * sin_lat + cos_lat0 * cos_lat * cos_dlon;
  // The analytic condition is cos c <= 0; the epsilon absorbs rounding of
  // points sitting exactly on the horizon (cos(pi/2) evaluates to ~6e-17).
  if (cos_c <= 1e-12) throw OutOfHemisphereError();

  PlanePoint p;
  p.u = cos_lat * std::sin(dlon) / cos_c;
  p.v = (cos_lat0 * sin_lat - sin_lat0 * cos_lat * cos_dlon) / cos_c;
  return p;
}

SphPoint gnomonic_inverse(const PlanePoint& p, const SphPoint& center) {
  if (!std::isfinite(p.u) || !std::isfinite(p.v))
    throw std::invalid_argument("gnomonic_inverse: non-finite input");
  const double sin_lat0 = std::sin(center.lat);
  const double cos_lat0 = std::cos(center.lat);

  // With c = atan(rho): cos c = 1/sqrt(1+rho^2), sin c = rho * cos c, which
  // collapses the textbook formulas to a division-free-in-rho form that is
  // exact in the rho -> 0 limit.
  const double inv_norm = 1.0 / std::sqrt(1.0 + p.u * p.u + p.v * p.v);
  SphPoint out;
  out.lat = std::asin((sin_lat0 + p.v * cos_lat0) * inv_norm);
  out.lon = wrap_longitude(center.lon +
                           std::atan2(p.u, cos_lat0 - p.v * sin_lat0));
  return out;
}

}  // namespace panosr::sphere
