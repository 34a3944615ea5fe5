#pragma once

#include <string>

#include "panosr/degrade/config.hpp"
#include "panosr/degrade/stages.hpp"

namespace panosr::degrade {

// Runs the full degradation pipeline on one HR ERP image:
// ERP -> dual fisheye -> [blur, resize, noise, JPEG] -> optional second
// order -> final downscale -> LR ERP at hr_height/scale. Deterministic in
// (hr, cfg, seed); the stage log records every sampled parameter.
PairRecord synthesize_pair(const ErpImage& hr, const DegradationConfig& cfg,
                           std::uint64_t seed);

// d from the accumulated blur / noise variances, min-max normalized by the
// config's achievable maxima (0 when a family is disabled).
DegradationParams params_from_log(const std::vector<StageRecord>& log,
                                  const DegradationConfig& cfg);

std::string stage_log_json(const PairRecord& rec, const std::string& name);

struct DatasetSynthesisResult {
  int items = 0;
  std::string meta_path;
};

// Reads <in_dir>/*.png (HR ERP), writes <out_dir>/{hr,lr}/*.png and
// <out_dir>/meta/items.jsonl. Item i uses seed base_seed + i.
DatasetSynthesisResult synthesize_dataset(const std::string& in_dir,
                                          const std::string& out_dir,
                                          const DegradationConfig& cfg,
                                          std::uint64_t base_seed,
                                          int jobs = 0);

}  // namespace panosr::degrade
