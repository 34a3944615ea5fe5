#include "panosr/degrade/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "panosr/core/image_io.hpp"
#include "panosr/core/kernels.hpp"
#include "panosr/core/log.hpp"
#include "panosr/core/parallel.hpp"
#include "panosr/sphere/fisheye.hpp"

namespace fs = std::filesystem;

namespace panosr::degrade {

void DegradationConfig::validate() const {
  auto check_range = [](const Range& r, const char* what, double lo,
                        double hi) {
    if (r.empty() || r.lo < lo || r.hi > hi)
      throw std::invalid_argument(std::string("degradation config: bad ") +
                                  what + " range");
  };
  if (blur_enabled) {
    check_range(blur_sigma, "blur sigma", 0.05, 10.0);
    check_range(blur_sigma2, "second blur sigma", 0.05, 10.0);
  }
  if (resize_enabled) {
    check_range(resize_scale, "resize scale", 0.1, 4.0);
    check_range(resize_scale2, "second resize scale", 0.1, 4.0);
  }
  if (noise_enabled) {
    check_range(noise_sigma, "noise sigma", 0.0, 0.5);
    check_range(noise_sigma2, "second noise sigma", 0.0, 0.5);
  }
  if (jpeg_enabled) {
    if (jpeg_quality.lo < 1 || jpeg_quality.hi > 100 ||
        jpeg_quality.hi < jpeg_quality.lo || jpeg_quality2.lo < 1 ||
        jpeg_quality2.hi > 100 || jpeg_quality2.hi < jpeg_quality2.lo)
      throw std::invalid_argument("degradation config: bad jpeg range");
  }
  if (second_order_prob < 0.0 || second_order_prob > 1.0)
    throw std::invalid_argument("degradation config: bad second order prob");
  if (scale < 1)
    throw std::invalid_argument("degradation config: scale must be >= 1");
  if (aniso_prob < 0.0 || aniso_prob > 1.0 || poisson_prob < 0.0 ||
      poisson_prob > 1.0)
    throw std::invalid_argument("degradation config: bad probability");
}

double DegradationConfig::max_blur_sigma() const {
  if (!blur_enabled) return 0.0;
  double var = blur_sigma.hi * blur_sigma.hi;
  if (second_order_prob > 0.0) var += blur_sigma2.hi * blur_sigma2.hi;
  return std::sqrt(var);
}

double DegradationConfig::max_noise_sigma() const {
  if (!noise_enabled) return 0.0;
  double var = noise_sigma.hi * noise_sigma.hi;
  if (second_order_prob > 0.0) var += noise_sigma2.hi * noise_sigma2.hi;
  return std::sqrt(var);
}

DegradationConfig DegradationConfig::default_preset() {
  return DegradationConfig{};
}

DegradationConfig DegradationConfig::severe_preset() {
  DegradationConfig cfg;
  cfg.noise_sigma = {0.0, 0.2};
  cfg.noise_sigma2 = {0.0, 0.1};
  cfg.poisson_prob = 0.5;
  cfg.jpeg_quality = {10, 60};
  cfg.jpeg_quality2 = {10, 60};
  return cfg;
}

DegradationConfig DegradationConfig::clean_preset() {
  DegradationConfig cfg;
  cfg.blur_enabled = false;
  cfg.resize_enabled = false;
  cfg.noise_enabled = false;
  cfg.jpeg_enabled = false;
  cfg.second_order_prob = 0.0;
  return cfg;
}

DegradationConfig DegradationConfig::preset(const std::string& name) {
  if (name == "default") return default_preset();
  if (name == "severe") return severe_preset();
  if (name == "clean") return clean_preset();
  throw std::invalid_argument("unknown degradation preset '" + name + "'");
}

namespace {

struct OrderRanges {
  Range blur;
  Range resize;
  Range noise;
  IntRange jpeg;
};

// One blur->resize->noise->jpeg pass over both hemispheres. Every sampled
// parameter lands in the log; the accumulated variances feed d.
void apply_order(Tensor& front, Tensor& back, const DegradationConfig& cfg,
                 const OrderRanges& ranges, Rng& rng, int order_index,
                 std::vector<StageRecord>& log, double& blur_var,
                 double& noise_var) {
  const auto tag = std::to_string(order_index);
  if (cfg.blur_enabled) {
    BlurKernelSpec spec;
    spec.anisotropic = rng.bernoulli(cfg.aniso_prob);
    spec.sigma_x = rng.uniform(ranges.blur.lo, ranges.blur.hi);
    spec.sigma_y = spec.anisotropic
                       ? rng.uniform(ranges.blur.lo, ranges.blur.hi)
                       : spec.sigma_x;
    spec.theta = spec.anisotropic ? rng.uniform(0.0, M_PI) : 0.0;
    const Tensor kernel = make_gaussian_kernel(spec);
    front = apply_blur(front, kernel);
    back = apply_blur(back, kernel);
    // RMS of the per-axis sigmas; variances of chained blurs add.
    const double sigma_eff = std::sqrt(
        (spec.sigma_x * spec.sigma_x + spec.sigma_y * spec.sigma_y) / 2.0);
    blur_var += sigma_eff * sigma_eff;
    log.push_back({"blur" + tag,
                   {{"sigma_x", spec.sigma_x},
                    {"sigma_y", spec.sigma_y},
                    {"theta", spec.theta},
                    {"aniso", spec.anisotropic ? 1.0 : 0.0},
                    {"size", static_cast<double>(kernel.dim(1))}}});
  }
  if (cfg.resize_enabled) {
    const double factor = rng.uniform(ranges.resize.lo, ranges.resize.hi);
    const int mode_pick = rng.uniform_int(0, 2);
    const auto mode = mode_pick == 0 ? sphere::ResizeMode::bicubic
                      : mode_pick == 1 ? sphere::ResizeMode::bilinear
                                       : sphere::ResizeMode::area;
    const std::int64_t side =
        std::max<std::int64_t>(16, std::llround(front.dim(1) * factor));
    // bicubic/bilinear minification is deliberately not antialiased, the
    // same as the reference real-world recipe's resize backends
    front = sphere::resize(front, side, side, mode, sphere::EdgeX::clamp,
                           /*antialias=*/false);
    back = sphere::resize(back, side, side, mode, sphere::EdgeX::clamp,
                          /*antialias=*/false);
    log.push_back({"resize" + tag,
                   {{"factor", factor},
                    {"mode", static_cast<double>(mode_pick)},
                    {"side", static_cast<double>(side)}}});
  }
  if (cfg.noise_enabled) {
    const bool poisson = rng.bernoulli(cfg.poisson_prob);
    const double level = rng.uniform(ranges.noise.lo, ranges.noise.hi);
    const auto kind = poisson ? NoiseKind::poisson : NoiseKind::gaussian;
    front = add_noise(front, kind, level, rng);
    back = add_noise(back, kind, level, rng);
    noise_var += level * level;
    log.push_back({"noise" + tag,
                   {{"level", level}, {"poisson", poisson ? 1.0 : 0.0}}});
  }
  if (cfg.jpeg_enabled) {
    const int quality = rng.uniform_int(ranges.jpeg.lo, ranges.jpeg.hi);
    front = jpeg_roundtrip(front, quality);
    back = jpeg_roundtrip(back, quality);
    log.push_back({"jpeg" + tag, {{"quality", static_cast<double>(quality)}}});
  }
}

double normalized(double value, double max_value) {
  if (max_value <= 0.0) return 0.0;
  return std::clamp(value / max_value, 0.0, 1.0);
}

}  // namespace

DegradationParams params_from_log(const std::vector<StageRecord>& log,
                                  const DegradationConfig& cfg) {
  double blur_var = 0.0;
  double noise_var = 0.0;
  for (const auto& rec : log) {
    if (rec.op.rfind("blur", 0) == 0) {
      double sx = 0.0, sy = 0.0;
      for (const auto& [k, v] : rec.params) {
        if (k == "sigma_x") sx = v;
        if (k == "sigma_y") sy = v;
      }
      blur_var += (sx * sx + sy * sy) / 2.0;
    } else if (rec.op.rfind("noise", 0) == 0) {
      for (const auto& [k, v] : rec.params)
        if (k == "level") noise_var += v * v;
    }
  }
  DegradationParams d;
  d.noise = normalized(std::sqrt(noise_var), cfg.max_noise_sigma());
  d.blur = normalized(std::sqrt(blur_var), cfg.max_blur_sigma());
  return d;
}

PairRecord synthesize_pair(const ErpImage& hr, const DegradationConfig& cfg,
                           std::uint64_t seed) {
  hr.validate();
  cfg.validate();
  if (hr.height() % cfg.scale != 0)
    throw std::invalid_argument(
        "synthesize_pair: HR height must be divisible by scale");

  Rng rng(seed);
  PairRecord rec;
  rec.hr = hr;
  rec.seed = seed;

  auto pair = sphere::erp_to_fisheye(hr, hr.height());
  Tensor front = std::move(pair.front);
  Tensor back = std::move(pair.back);

  double blur_var = 0.0;
  double noise_var = 0.0;
  apply_order(front, back, cfg,
              {cfg.blur_sigma, cfg.resize_scale, cfg.noise_sigma,
               cfg.jpeg_quality},
              rng, 1, rec.log, blur_var, noise_var);
  if (cfg.second_order_prob > 0.0 && rng.bernoulli(cfg.second_order_prob)) {
    apply_order(front, back, cfg,
                {cfg.blur_sigma2, cfg.resize_scale2, cfg.noise_sigma2,
                 cfg.jpeg_quality2},
                rng, 2, rec.log, blur_var, noise_var);
  }

  // Final downscale to the target LR fisheye side, then back to ERP.
  const std::int64_t lr_side = hr.height() / cfg.scale;
  front = sphere::resize(front, lr_side, lr_side, cfg.final_mode,
                         sphere::EdgeX::clamp, /*antialias=*/false);
  back = sphere::resize(back, lr_side, lr_side, cfg.final_mode,
                        sphere::EdgeX::clamp, /*antialias=*/false);
  rec.log.push_back(
      {"final_resize", {{"side", static_cast<double>(lr_side)}}});

  sphere::FisheyePair lr_pair;
  lr_pair.front = std::move(front);
  lr_pair.back = std::move(back);
  rec.lr = sphere::fisheye_to_erp(lr_pair, hr.height() / cfg.scale);
  kern::clamp01(rec.lr.pixels.data(),
                static_cast<std::size_t>(rec.lr.pixels.numel()));

  rec.params = params_from_log(rec.log, cfg);
  rec.params.validate();
  return rec;
}

std::string stage_log_json(const PairRecord& rec, const std::string& name) {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["seed"] = rec.seed;
  j["d"] = {rec.params.noise, rec.params.blur};
  auto stages = nlohmann::ordered_json::array();
  for (const auto& s : rec.log) {
    nlohmann::ordered_json stage;
    stage["op"] = s.op;
    for (const auto& [k, v] : s.params) stage[k] = v;
    stages.push_back(stage);
  }
  j["stages"] = stages;
  return j.dump();
}

DatasetSynthesisResult synthesize_dataset(const std::string& in_dir,
                                          const std::string& out_dir,
                                          const DegradationConfig& cfg,
                                          std::uint64_t base_seed, int jobs) {
  cfg.validate();
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(in_dir)) {
    if (entry.path().extension() == ".png") inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty())
    throw std::invalid_argument("synthesize_dataset: no .png inputs in " +
                                in_dir);

  fs::create_directories(fs::path(out_dir) / "hr");
  fs::create_directories(fs::path(out_dir) / "lr");
  fs::create_directories(fs::path(out_dir) / "meta");

  std::vector<std::string> meta_lines(inputs.size());
  parallel_for(static_cast<std::int64_t>(inputs.size()),
               jobs > 0 ? jobs : default_jobs(), [&](std::int64_t i) {
    const auto& path = inputs[static_cast<std::size_t>(i)];
    const ErpImage hr(read_png(path.string()));
    const auto rec = synthesize_pair(hr, cfg, base_seed + i);
    const std::string stem = path.stem().string();
    write_png((fs::path(out_dir) / "hr" / (stem + ".png")).string(),
              rec.hr.pixels);
    write_png((fs::path(out_dir) / "lr" / (stem + ".png")).string(),
              rec.lr.pixels);
    meta_lines[static_cast<std::size_t>(i)] = stage_log_json(rec, stem);
  });

  const std::string meta_path =
      (fs::path(out_dir) / "meta" / "items.jsonl").string();
  std::ofstream meta(meta_path);
  if (!meta) throw std::runtime_error("synthesize_dataset: cannot write meta");
  for (const auto& line : meta_lines) meta << line << "\n";

  DatasetSynthesisResult result;
  result.items = static_cast<int>(inputs.size());
  result.meta_path = meta_path;
  return result;
}

}  // namespace panosr::degrade
