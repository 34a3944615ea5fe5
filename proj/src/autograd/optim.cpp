#include "panosr/autograd/optim.hpp"

#include <cmath>

namespace panosr::ag {

Adam::Adam(ParamStore& store, double lr, double beta1, double beta2,
           double eps, double weight_decay)
    : store_(store),
      lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      weight_decay_(weight_decay) {
  for (const auto& p : store_.all()) {
    m_.emplace_back(p.trainable ? Tensor(p.var->value.shape()) : Tensor());
    v_.emplace_back(p.trainable ? Tensor(p.var->value.shape()) : Tensor());
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto& params = store_.all();
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    if (!p.trainable || p.var->grad.empty()) continue;
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    Tensor& w = p.var->value;
    const Tensor& g = p.var->grad;
    for (std::int64_t j = 0; j < w.numel(); ++j) {
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      w[j] -= lr_ * (mhat / (std::sqrt(vhat) + eps_) + weight_decay_ * w[j]);
    }
  }
}

void Adam::zero_grad() { store_.zero_grads(); }

}  // namespace panosr::ag
