#include "panosr/degrade/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "panosr/autograd/optim.hpp"

namespace panosr::degrade {

using ag::Var;

namespace {

// 6-channel featurization: the raw patch plus per-channel |laplacian|.
// The highpass magnitudes carry the noise/sharpness statistics directly,
// which keeps the regressor from keying on scene content.
Tensor augment_patch(const Tensor& patch) {
  require_chw(patch, "predictor");
  if (patch.dim(0) != 3)
    throw std::invalid_argument("predictor: expects a 3-channel patch");
  const std::int64_t h = patch.dim(1);
  const std::int64_t w = patch.dim(2);
  Tensor out({6, h, w});
  std::copy_n(patch.data(), patch.numel(), out.data());
  for (std::int64_t c = 0; c < 3; ++c)
    for (std::int64_t y = 0; y < h; ++y)
      for (std::int64_t x = 0; x < w; ++x) {
        const auto cl = [&](std::int64_t yy, std::int64_t xx) {
          yy = std::clamp<std::int64_t>(yy, 0, h - 1);
          xx = std::clamp<std::int64_t>(xx, 0, w - 1);
          return patch.at(c, yy, xx);
        };
        out.at(3 + c, y, x) =
            std::abs(4.0 * cl(y, x) - cl(y - 1, x) - cl(y + 1, x) -
                     cl(y, x - 1) - cl(y, x + 1));
      }
  return out;
}

}  // namespace

DegradationPredictor::DegradationPredictor(std::uint64_t init_seed) {
  Rng rng(init_seed);
  conv1_ = ag::Conv2dLayer(store_, "predictor.conv1", 6, 16, 3, rng, 2);
  conv2_ = ag::Conv2dLayer(store_, "predictor.conv2", 16, 32, 3, rng, 2);
  fc1_ = ag::LinearLayer(store_, "predictor.fc1", 64, 32, rng);
  fc2_ = ag::LinearLayer(store_, "predictor.fc2", 32, 2, rng);
}

Var DegradationPredictor::forward(const Var& x) const {
  Var h = ag::leaky_relu(conv1_.forward(x));
  h = ag::leaky_relu(conv2_.forward(h));
  const Var stats =
      ag::concat_vec(ag::channel_mean(h), ag::channel_mean(ag::mul(h, h)));
  const Var hidden = ag::leaky_relu(fc1_.forward(stats));
  return ag::sigmoid(fc2_.forward(hidden));
}

DegradationParams DegradationPredictor::estimate(const Tensor& lr_view) const {
  const Var out = forward(ag::constant(augment_patch(lr_view)));
  DegradationParams d;
  d.noise = out->value[0];
  d.blur = out->value[1];
  return d;
}

DegradationPredictor::FitStats DegradationPredictor::fit(
    const std::vector<std::pair<Tensor, DegradationParams>>& data, int steps,
    double lr, std::uint64_t seed, std::size_t holdout_count) {
  if (data.size() <= holdout_count)
    throw std::invalid_argument("predictor fit: not enough data");
  const std::size_t train_count = data.size() - holdout_count;

  Rng rng(seed);
  ag::Adam opt(store_, lr, 0.9, 0.999, 1e-8, 3e-3);
  constexpr int kBatch = 16;
  for (int step = 0; step < steps; ++step) {
    opt.zero_grad();
    Var loss;
    for (int b = 0; b < kBatch; ++b) {
      const auto& [patch, d] =
          data[static_cast<std::size_t>(rng.uniform_int(
              0, static_cast<int>(train_count) - 1))];
      Tensor sample = patch;
      if (rng.bernoulli(0.5)) {  // horizontal flip augmentation
        for (std::int64_t c = 0; c < sample.dim(0); ++c)
          for (std::int64_t y = 0; y < sample.dim(1); ++y)
            for (std::int64_t x = 0; x < sample.dim(2) / 2; ++x)
              std::swap(sample.at(c, y, x),
                        sample.at(c, y, sample.dim(2) - 1 - x));
      }
      const Var pred = forward(ag::constant(augment_patch(sample)));
      const Var target = ag::constant(Tensor({2}, {d.noise, d.blur}));
      // L1-style loss: the minimizer is the conditional median, which is
      // what the reported MAE rewards.
      const Var l = ag::charbonnier(pred, target, 1e-3);
      loss = loss ? ag::add(loss, l) : l;
    }
    loss = ag::scale(loss, 1.0 / kBatch);
    ag::backward(loss);
    opt.step();
  }

  FitStats stats;
  for (std::size_t i = train_count; i < data.size(); ++i) {
    const auto d = estimate(data[i].first);
    stats.mae_noise += std::abs(d.noise - data[i].second.noise);
    stats.mae_blur += std::abs(d.blur - data[i].second.blur);
  }
  stats.mae_noise /= static_cast<double>(holdout_count);
  stats.mae_blur /= static_cast<double>(holdout_count);
  return stats;
}

DegradationParams estimate_degradation(const Tensor& lr_view,
                                       PredictorMode mode,
                                       const PairRecord* record,
                                       const DegradationPredictor* predictor) {
  if (mode == PredictorMode::oracle) {
    if (!record)
      throw std::invalid_argument(
          "estimate_degradation: oracle mode requires a pair record");
    return record->params;
  }
  if (!predictor)
    throw std::invalid_argument(
        "estimate_degradation: learned mode requires a predictor");
  return predictor->estimate(lr_view);
}

}  // namespace panosr::degrade
