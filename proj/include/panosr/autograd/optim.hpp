#pragma once

#include "panosr/autograd/nn.hpp"

namespace panosr::ag {

// Adam over the trainable subset of a ParamStore. State is keyed by
// parameter order, which is fixed at construction.
class Adam {
 public:
  explicit Adam(ParamStore& store, double lr = 1e-5, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8,
                double weight_decay = 0.0);  // decoupled

  void step();
  void zero_grad();

  double lr() const { return lr_; }
  std::int64_t steps_taken() const { return t_; }

 private:
  ParamStore& store_;
  double lr_, beta1_, beta2_, eps_, weight_decay_;
  std::int64_t t_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace panosr::ag
