#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panosr/core/image.hpp"
#include "panosr/sphere/resample.hpp"

namespace panosr::degrade {

// d = [d_n, d_b]: noise and blur levels, both min-max normalized to [0,1]
// over the config ranges.
struct DegradationParams {
  double noise = 0.0;
  double blur = 0.0;

  void validate() const {
    if (noise < 0.0 || noise > 1.0 || blur < 0.0 || blur > 1.0)
      throw std::invalid_argument("degradation params must lie in [0,1]^2");
  }
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return hi < lo; }
};

struct IntRange {
  int lo = 0;
  int hi = 0;
};

// Blur -> resize -> noise -> JPEG, optionally repeated once with the
// second-order ranges, then the final downscale to 1/scale.
struct DegradationConfig {
  bool blur_enabled = true;
  double aniso_prob = 0.3;
  Range blur_sigma{0.2, 3.0};
  Range blur_sigma2{0.2, 1.5};

  bool resize_enabled = true;
  Range resize_scale{0.5, 1.2};
  Range resize_scale2{0.8, 1.2};

  bool noise_enabled = true;
  double poisson_prob = 0.3;
  Range noise_sigma{0.0, 0.1};
  Range noise_sigma2{0.0, 0.05};

  bool jpeg_enabled = true;
  IntRange jpeg_quality{30, 95};
  IntRange jpeg_quality2{30, 95};

  double second_order_prob = 0.5;

  int scale = 4;
  sphere::ResizeMode final_mode = sphere::ResizeMode::bicubic;

  void validate() const;

  // Max achievable accumulated variance given this config; the min-max
  // denominators for d.
  double max_blur_sigma() const;
  double max_noise_sigma() const;

  static DegradationConfig default_preset();
  static DegradationConfig severe_preset();  // raised JPEG compression + noise
  static DegradationConfig preset(const std::string& name);
  // Skeleton config: every stochastic stage off, only the final downscale.
  static DegradationConfig clean_preset();
};

// One applied stage with its sampled parameters, serialized to the dataset
// metadata. The ordered log fully determines lr given hr.
struct StageRecord {
  std::string op;
  std::vector<std::pair<std::string, double>> params;
};

struct PairRecord {
  ErpImage hr;
  ErpImage lr;
  DegradationParams params;
  std::uint64_t seed = 0;
  std::vector<StageRecord> log;
};

}  // namespace panosr::degrade
