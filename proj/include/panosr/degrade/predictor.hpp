#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "panosr/autograd/nn.hpp"
#include "panosr/degrade/config.hpp"

namespace panosr::degrade {

enum class PredictorMode { oracle, learned };

// Small CNN regressor mapping an LR view to d = [d_n, d_b]; outputs are
// sigmoid-squashed so they always land in [0,1]^2. Pooled first and second
// moments of the conv features feed the head (the variance statistics carry
// most of the noise-level signal). The oracle path bypasses it entirely.
class DegradationPredictor {
 public:
  explicit DegradationPredictor(std::uint64_t init_seed = 1234);

  DegradationParams estimate(const Tensor& lr_view) const;

  struct FitStats {
    double mae_noise = 0.0;  // held-out mean absolute error per component
    double mae_blur = 0.0;
  };
  // Trains on (patch, d) pairs; the last holdout_count items are kept out of
  // the updates and used for the reported MAE.
  FitStats fit(const std::vector<std::pair<Tensor, DegradationParams>>& data,
               int steps, double lr, std::uint64_t seed,
               std::size_t holdout_count);

  ag::ParamStore& params() { return store_; }
  const ag::ParamStore& params() const { return store_; }

 private:
  ag::Var forward(const ag::Var& x) const;

  ag::ParamStore store_;
  ag::Conv2dLayer conv1_, conv2_;
  ag::LinearLayer fc1_, fc2_;
};

// Oracle mode returns record->params (record required); learned mode runs
// the provided predictor.
DegradationParams estimate_degradation(const Tensor& lr_view,
                                       PredictorMode mode,
                                       const PairRecord* record = nullptr,
                                       const DegradationPredictor* predictor =
                                           nullptr);

}  // namespace panosr::degrade
