#include "panosr/sphere/tangent.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "panosr/core/parallel.hpp"

namespace panosr::sphere {

double TangentGrid::half_extent() const { return std::tan(fov / 2.0); }

void TangentGrid::validate() const {
  if (centers.empty())
    throw std::invalid_argument("tangent grid: needs at least one view");
  if (!(fov > 0.0 && fov < M_PI))
    throw std::invalid_argument("tangent grid: fov must be in (0, pi)");
  if (patch_size < 2)
    throw std::invalid_argument("tangent grid: patch size must be >= 2");
}

namespace {

// Inside test used by both the coverage check and the fusion gather.
inline bool project_into_view(const SphPoint& p, const SphPoint& center,
                              double half_extent, PlanePoint* out) {
  const double cos_c = angular_cos(p, center);
  if (cos_c <= 1e-9) return false;
  const PlanePoint q = gnomonic_forward(p, center);
  if (std::abs(q.u) > half_extent || std::abs(q.v) > half_extent) return false;
  *out = q;
  return true;
}

}  // namespace

bool TangentGrid::covers_sphere(std::int64_t probe_h) const {
  const double t = half_extent();
  for (std::int64_t i = 0; i < probe_h; ++i) {
    for (std::int64_t j = 0; j < 2 * probe_h; ++j) {
      const SphPoint p{latitude_of_row(static_cast<double>(i), probe_h),
                       longitude_of_col(static_cast<double>(j), 2 * probe_h)};
      PlanePoint q;
      bool hit = false;
      for (const auto& c : centers) {
        if (project_into_view(p, c, t, &q)) {
          hit = true;
          break;
        }
      }
      if (!hit) return false;
    }
  }
  return true;
}

TangentGrid default_grid(std::int64_t patch_size) {
  TangentGrid g;
  g.fov = 80.0 * M_PI / 180.0;
  g.patch_size = patch_size;
  g.centers.push_back({M_PI / 2.0, 0.0});
  g.centers.push_back({-M_PI / 2.0, 0.0});
  const double row_lat = 30.0 * M_PI / 180.0;
  for (int k = 0; k < 8; ++k) {
    const double lon = wrap_longitude(k * M_PI / 4.0);
    g.centers.push_back({row_lat, lon});
  }
  for (int k = 0; k < 8; ++k) {
    const double lon = wrap_longitude(k * M_PI / 4.0 + M_PI / 8.0);
    g.centers.push_back({-row_lat, lon});
  }
  return g;
}

TangentGrid parse_grid(const std::string& text) {
  TangentGrid g;
  g.fov = 80.0 * M_PI / 180.0;
  g.patch_size = 128;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "fov") {
      double deg;
      if (!(ls >> deg)) throw std::invalid_argument("grid: bad fov line");
      g.fov = deg * M_PI / 180.0;
    } else if (key == "patch") {
      if (!(ls >> g.patch_size))
        throw std::invalid_argument("grid: bad patch line");
    } else if (key == "center") {
      double lat_deg, lon_deg;
      if (!(ls >> lat_deg >> lon_deg))
        throw std::invalid_argument("grid: bad center line");
      g.centers.push_back({lat_deg * M_PI / 180.0,
                           wrap_longitude(lon_deg * M_PI / 180.0)});
    } else {
      throw std::invalid_argument("grid: unknown key '" + key + "' at line " +
                                  std::to_string(lineno));
    }
  }
  g.validate();
  return g;
}

std::string format_grid(const TangentGrid& grid) {
  std::ostringstream out;
  out << "# tangent view layout: centers in degrees\n";
  out << "fov " << grid.fov * 180.0 / M_PI << "\n";
  out << "patch " << grid.patch_size << "\n";
  for (const auto& c : grid.centers)
    out << "center " << c.lat * 180.0 / M_PI << " " << c.lon * 180.0 / M_PI
        << "\n";
  return out.str();
}

TangentGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("grid: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_grid(ss.str());
}

TangentViewSet erp_to_tangent(const ErpImage& erp, const TangentGrid& grid,
                              int pre_upsample) {
  erp.validate();
  grid.validate();
  if (pre_upsample < 1)
    throw std::invalid_argument("erp_to_tangent: pre_upsample must be >= 1");
  if (!grid.covers_sphere())
    throw CoverageError("erp_to_tangent: grid does not cover the sphere");

  const Tensor src =
      pre_upsample == 1
          ? erp.pixels
          : resize_by(erp.pixels, pre_upsample, ResizeMode::bicubic,
                      EdgeX::wrap);
  const std::int64_t channels = src.dim(0);
  const std::int64_t sh = src.dim(1);
  const std::int64_t sw = src.dim(2);
  const std::int64_t n = grid.patch_size;
  const double t = grid.half_extent();

  TangentViewSet set;
  set.grid = grid;
  set.views.resize(grid.view_count());
  set.valid_mask.resize(grid.view_count());

  parallel_for(static_cast<std::int64_t>(grid.view_count()),
               [&](std::int64_t m) {
    Tensor view({channels, n, n});
    Tensor mask({1, n, n}, 1.0);
    const SphPoint center = grid.centers[static_cast<std::size_t>(m)];
    for (std::int64_t b = 0; b < n; ++b) {
      for (std::int64_t a = 0; a < n; ++a) {
        const double u = ((a + 0.5) / n * 2.0 - 1.0) * t;
        const double v = (1.0 - (b + 0.5) / n * 2.0) * t;
        const SphPoint p = gnomonic_inverse({u, v}, center);
        const double x = (p.lon + M_PI) / (2.0 * M_PI) * sw - 0.5;
        const double y = (M_PI / 2.0 - p.lat) / M_PI * sh - 0.5;
        for (std::int64_t c = 0; c < channels; ++c)
          view.at(c, b, a) = sample_bicubic(src, c, x, y, EdgeX::wrap);
      }
    }
    set.views[static_cast<std::size_t>(m)] = std::move(view);
    set.valid_mask[static_cast<std::size_t>(m)] = std::move(mask);
  });
  return set;
}

ErpImage tangent_to_erp(const TangentViewSet& views, std::int64_t erp_h,
                        int pre_upsample) {
  if (erp_h < 1) throw std::invalid_argument("tangent_to_erp: erp_h >= 1");
  if (pre_upsample < 1)
    throw std::invalid_argument("tangent_to_erp: pre_upsample must be >= 1");
  const auto& grid = views.grid;
  grid.validate();
  if (views.views.size() != grid.view_count())
    throw std::invalid_argument("tangent_to_erp: view count mismatch");

  const std::int64_t m_count = static_cast<std::int64_t>(views.views.size());
  const std::int64_t channels = views.views[0].dim(0);
  if (channels > 8)
    throw std::invalid_argument("tangent_to_erp: at most 8 channels");
  const double t = grid.half_extent();
  const double diag = std::sqrt(2.0) * t;

  std::vector<Tensor> up(static_cast<std::size_t>(m_count));
  parallel_for(m_count, [&](std::int64_t m) {
    const auto& v = views.views[static_cast<std::size_t>(m)];
    up[static_cast<std::size_t>(m)] =
        pre_upsample == 1 ? v : resize_by(v, pre_upsample);
  });
  const std::int64_t un = up[0].dim(1);

  const std::int64_t w = erp_h * 2;
  ErpImage out(channels, erp_h);
  std::vector<std::uint8_t> uncovered(static_cast<std::size_t>(erp_h), 0);

  parallel_for(erp_h, [&](std::int64_t i) {
    const double lat = latitude_of_row(static_cast<double>(i), erp_h);
    for (std::int64_t j = 0; j < w; ++j) {
      const SphPoint p{lat, longitude_of_col(static_cast<double>(j), w)};
      double weight_sum = 0.0;
      double acc[8] = {0};  // channels <= 8 in practice
      for (std::int64_t m = 0; m < m_count; ++m) {
        PlanePoint q;
        if (!project_into_view(p, grid.centers[static_cast<std::size_t>(m)], t,
                               &q))
          continue;
        const double rho = std::hypot(q.u, q.v);
        // Cosine falloff in tangent radius; the epsilon keeps single-view
        // corner pixels strictly positive.
        const double wgt =
            1e-6 + std::cos(M_PI / 2.0 * std::min(1.0, rho / diag));
        const double x = ((q.u / t) + 1.0) / 2.0 * un - 0.5;
        const double y = (1.0 - (q.v / t)) / 2.0 * un - 0.5;
        for (std::int64_t c = 0; c < channels; ++c)
          acc[c] += wgt * sample_bicubic(up[static_cast<std::size_t>(m)], c, x,
                                         y, EdgeX::clamp);
        weight_sum += wgt;
      }
      if (weight_sum <= 0.0) {
        uncovered[static_cast<std::size_t>(i)] = 1;
        continue;
      }
      for (std::int64_t c = 0; c < channels; ++c)
        out.pixels.at(c, i, j) = acc[c] / weight_sum;
    }
  });

  for (std::int64_t i = 0; i < erp_h; ++i) {
    if (uncovered[static_cast<std::size_t>(i)])
      throw CoverageError("tangent_to_erp: ERP row " + std::to_string(i) +
                          " has pixels covered by zero views");
  }
  return out;
}

}  // namespace panosr::sphere
