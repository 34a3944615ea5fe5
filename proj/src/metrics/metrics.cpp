#include "panosr/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "panosr/core/kernels.hpp"

namespace panosr::metrics {

std::vector<double> ws_weights(std::int64_t h) {
  if (h < 1) throw std::invalid_argument("ws_weights: h must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(h));
  for (std::int64_t i = 0; i < h; ++i)
    w[static_cast<std::size_t>(i)] =
        std::cos((i + 0.5 - h / 2.0) * M_PI / static_cast<double>(h));
  return w;
}

namespace {

double weighted_mse(const Tensor& ref, const Tensor& test,
                    const std::vector<double>* row_weights) {
  require_same_shape(ref, test, "metrics");
  const std::int64_t channels = ref.dim(0);
  const std::int64_t h = ref.dim(1);
  const std::int64_t w = ref.dim(2);
  double num = 0.0;
  double den = 0.0;
  for (std::int64_t c = 0; c < channels; ++c) {
    for (std::int64_t y = 0; y < h; ++y) {
      const double wy =
          row_weights ? (*row_weights)[static_cast<std::size_t>(y)] : 1.0;
      const double* a = ref.data() + (c * h + y) * w;
      const double* b = test.data() + (c * h + y) * w;
      num += wy * kern::sqdiff_sum(a, b, static_cast<std::size_t>(w));
      den += wy * static_cast<double>(w);
    }
  }
  return num / den;
}

double mse_to_db(double mse) {
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

}  // namespace

double psnr(const Tensor& ref, const Tensor& test) {
  require_chw(ref, "psnr");
  return mse_to_db(weighted_mse(ref, test, nullptr));
}

double ws_psnr(const ErpImage& ref, const ErpImage& test) {
  ref.validate();
  test.validate();
  const auto w = ws_weights(ref.height());
  return mse_to_db(weighted_mse(ref.pixels, test.pixels, &w));
}

namespace {

// 11-tap Gaussian, sigma 1.5, normalized.
std::vector<double> ssim_window() {
  std::vector<double> k(11);
  double total = 0.0;
  for (int i = 0; i < 11; ++i) {
    const double d = i - 5;
    k[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    total += k[static_cast<std::size_t>(i)];
  }
  for (auto& v : k) v /= total;
  return k;
}

// Separable Gaussian filter with clamped edges, single channel plane.
void gauss_filter(const double* src, double* dst, std::int64_t h,
                  std::int64_t w, const std::vector<double>& k) {
  const int radius = static_cast<int>(k.size() / 2);
  std::vector<double> mid(static_cast<std::size_t>(h * w));
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const std::int64_t xx = std::clamp<std::int64_t>(x + i, 0, w - 1);
        acc += k[static_cast<std::size_t>(i + radius)] * src[y * w + xx];
      }
      mid[static_cast<std::size_t>(y * w + x)] = acc;
    }
  }
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const std::int64_t yy = std::clamp<std::int64_t>(y + i, 0, h - 1);
        acc += k[static_cast<std::size_t>(i + radius)] *
               mid[static_cast<std::size_t>(yy * w + x)];
      }
      dst[y * w + x] = acc;
    }
  }
}

// SSIM map for one channel plane.
std::vector<double> ssim_map(const double* a, const double* b, std::int64_t h,
                             std::int64_t w) {
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  const auto k = ssim_window();
  const std::size_t n = static_cast<std::size_t>(h * w);

  std::vector<double> mu_a(n), mu_b(n), aa(n), bb(n), ab(n);
  gauss_filter(a, mu_a.data(), h, w, k);
  gauss_filter(b, mu_b.data(), h, w, k);
  std::vector<double> tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = a[i] * a[i];
  gauss_filter(tmp.data(), aa.data(), h, w, k);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = b[i] * b[i];
  gauss_filter(tmp.data(), bb.data(), h, w, k);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = a[i] * b[i];
  gauss_filter(tmp.data(), ab.data(), h, w, k);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double var_a = aa[i] - mu_a[i] * mu_a[i];
    const double var_b = bb[i] - mu_b[i] * mu_b[i];
    const double cov = ab[i] - mu_a[i] * mu_b[i];
    out[i] = ((2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2)) /
             ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) *
              (var_a + var_b + c2));
  }
  return out;
}

double ssim_aggregate(const Tensor& ref, const Tensor& test,
                      const std::vector<double>* row_weights) {
  require_same_shape(ref, test, "ssim");
  const std::int64_t channels = ref.dim(0);
  const std::int64_t h = ref.dim(1);
  const std::int64_t w = ref.dim(2);
  double num = 0.0;
  double den = 0.0;
  for (std::int64_t c = 0; c < channels; ++c) {
    const auto map = ssim_map(ref.data() + c * h * w, test.data() + c * h * w,
                              h, w);
    for (std::int64_t y = 0; y < h; ++y) {
      const double wy =
          row_weights ? (*row_weights)[static_cast<std::size_t>(y)] : 1.0;
      num += wy * kern::sum(map.data() + y * w, static_cast<std::size_t>(w));
      den += wy * static_cast<double>(w);
    }
  }
  return num / den;
}

}  // namespace

double ssim(const Tensor& ref, const Tensor& test) {
  require_chw(ref, "ssim");
  return ssim_aggregate(ref, test, nullptr);
}

double ws_ssim(const ErpImage& ref, const ErpImage& test) {
  ref.validate();
  test.validate();
  const auto w = ws_weights(ref.height());
  return ssim_aggregate(ref.pixels, test.pixels, &w);
}

MetricRow MetricReport::mean() const {
  MetricRow m;
  m.name = "mean";
  if (rows.empty()) return m;
  for (const auto& r : rows) {
    m.ws_psnr += r.ws_psnr;
    m.ws_ssim += r.ws_ssim;
    m.psnr += r.psnr;
    m.ssim += r.ssim;
  }
  const double n = static_cast<double>(rows.size());
  m.ws_psnr /= n;
  m.ws_ssim /= n;
  m.psnr /= n;
  m.ssim /= n;
  return m;
}

std::string MetricReport::to_csv() const {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "name,ws_psnr,ws_ssim,psnr,ssim,lpips\n";
  auto emit = [&](const MetricRow& r) {
    out << r.name << "," << r.ws_psnr << "," << r.ws_ssim << "," << r.psnr
        << "," << r.ssim << ",unavailable\n";
  };
  for (const auto& r : rows) emit(r);
  emit(mean());
  return out.str();
}

MetricRow compute_metrics(const std::string& name, const ErpImage& ref,
                          const ErpImage& test) {
  MetricRow row;
  row.name = name;
  row.ws_psnr = ws_psnr(ref, test);
  row.ws_ssim = ws_ssim(ref, test);
  row.psnr = psnr(ref.pixels, test.pixels);
  row.ssim = ssim(ref.pixels, test.pixels);
  return row;
}

}  // namespace panosr::metrics
