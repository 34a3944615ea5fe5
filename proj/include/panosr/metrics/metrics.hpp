#pragma once

#include <string>
#include <vector>

#include "panosr/core/image.hpp"

namespace panosr::metrics {

// Sentinel reported when the images are identical (MSE == 0).
inline constexpr double kPsnrCap = 99.0;

// Cosine-of-latitude row weights for spherically weighted metrics:
// w(i) = cos((i + 0.5 - h/2) * pi / h), all strictly positive.
std::vector<double> ws_weights(std::int64_t h);

double psnr(const Tensor& ref, const Tensor& test);
double ws_psnr(const ErpImage& ref, const ErpImage& test);

// SSIM with an 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2, C2 = 0.03^2
// on [0,1] data; channel maps are averaged. ws_ssim aggregates the SSIM map
// with ws_weights instead of a uniform mean.
double ssim(const Tensor& ref, const Tensor& test);
double ws_ssim(const ErpImage& ref, const ErpImage& test);

struct MetricRow {
  std::string name;
  double ws_psnr = 0.0;
  double ws_ssim = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> rows;
  MetricRow mean() const;
  // CSV with fixed columns: name, ws_psnr, ws_ssim, psnr, ssim, lpips.
  // The lpips column is a placeholder and always reads "unavailable".
  std::string to_csv() const;
};

MetricRow compute_metrics(const std::string& name, const ErpImage& ref,
                          const ErpImage& test);

}  // namespace panosr::metrics
