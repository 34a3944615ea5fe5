#pragma once

#include <string>
#include <vector>

#include "panosr/core/image.hpp"
#include "panosr/sphere/gnomonic.hpp"
#include "panosr/sphere/resample.hpp"

namespace panosr::sphere {

struct CoverageError : std::runtime_error {
  explicit CoverageError(const std::string& what) : std::runtime_error(what) {}
};

// Layout of gnomonic tangent views on the sphere. A view spans tangent
// coordinates [-tan(fov/2), tan(fov/2)]^2 sampled on a patch_size^2 grid.
struct TangentGrid {
  std::vector<SphPoint> centers;
  double fov = 0.0;          // full angular field of view, radians
  std::int64_t patch_size = 0;

  std::size_t view_count() const { return centers.size(); }
  double half_extent() const;  // tan(fov/2)

  void validate() const;
  // Every ERP pixel at the probe resolution must fall inside >= 1 view.
  bool covers_sphere(std::int64_t probe_h = 64) const;
};

// Default layout: 18 views — two polar caps plus two rows of eight views at
// +/-30 deg latitude (the second row offset by 22.5 deg), fov 80 deg.
TangentGrid default_grid(std::int64_t patch_size = 128);

// Plain-text grid config: `fov <deg>`, `patch <n>`, `center <lat_deg> <lon_deg>`
// one per line; '#' starts a comment.
TangentGrid parse_grid(const std::string& text);
std::string format_grid(const TangentGrid& grid);
TangentGrid load_grid(const std::string& path);

struct TangentViewSet {
  std::vector<Tensor> views;        // M rasters, C x N x N
  std::vector<Tensor> valid_mask;   // M rasters, 1 x N x N, 0/1
  TangentGrid grid;
};

// Projects an ERP image onto every view of the grid. The source is bicubic
// pre-upsampled by `pre_upsample` before sampling to cut interpolation loss.
TangentViewSet erp_to_tangent(const ErpImage& erp, const TangentGrid& grid,
                              int pre_upsample = 2);

// Fuses tangent views back into an ERP raster of height erp_h. Views are
// pre-upsampled, then every ERP pixel gathers from all covering views with
// normalized cosine-falloff weights (fixed view order, thread-safe).
ErpImage tangent_to_erp(const TangentViewSet& views, std::int64_t erp_h,
                        int pre_upsample = 2);

}  // namespace panosr::sphere
