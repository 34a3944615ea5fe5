#pragma once

#include <stdexcept>

namespace panosr::sphere {

// Spherical angles in radians: lat in [-pi/2, pi/2], lon in [-pi, pi).
struct SphPoint {
  double lat = 0.0;
  double lon = 0.0;
};

// Tangent-plane coordinates of the gnomonic projection centered at a point.
struct PlanePoint {
  double u = 0.0;
  double v = 0.0;
};

struct OutOfHemisphereError : std::domain_error {
  OutOfHemisphereError()
      : std::domain_error(
            "gnomonic_forward: point on or beyond the horizon of the "
            "projection center") {}
};

// cos of the angular distance between two points on the unit sphere.
double angular_cos(const SphPoint& a, const SphPoint& b);

// Projects a point onto the plane tangent at `center`. Throws
// OutOfHemisphereError when the point is not strictly inside the open
// hemisphere around the center (cos c <= 0).
PlanePoint gnomonic_forward(const SphPoint& point, const SphPoint& center);

// Exact analytic inverse; total on finite (u, v).
SphPoint gnomonic_inverse(const PlanePoint& p, const SphPoint& center);

double wrap_longitude(double lon);

}  // namespace panosr::sphere
