#pragma once

#include <map>
#include <string>
#include <vector>

#include "panosr/autograd/ops.hpp"
#include "panosr/core/rng.hpp"

namespace panosr::ag {

struct Param {
  std::string name;
  Var var;
  bool trainable = true;
};

// Flat registry of named parameters; module paths become dotted names
// ("unet.block3.conv1.weight"). The checkpoint archive is keyed by these.
class ParamStore {
 public:
  Var add(const std::string& name, Tensor init, bool trainable = true);
  Var find(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::vector<Param>& all() { return params_; }
  const std::vector<Param>& all() const { return params_; }

  std::vector<Param> with_prefix(const std::string& prefix) const;

  std::int64_t count_scalars(bool trainable_only = false) const;
  void zero_grads();

  // FNV-1a over the values of every parameter whose name starts with prefix.
  std::uint64_t value_hash(const std::string& prefix = "") const;

 private:
  std::vector<Param> params_;
  std::map<std::string, std::size_t> index_;
};

// He-style normal init for conv/linear weights feeding leaky ReLUs.
Tensor he_normal(std::vector<std::int64_t> shape, std::int64_t fan_in,
                 Rng& rng, double gain = 1.0);

struct Conv2dLayer {
  Var weight;
  Var bias;
  int stride = 1;
  int pad = 1;
  int groups = 1;

  Conv2dLayer() = default;
  Conv2dLayer(ParamStore& store, const std::string& path, std::int64_t cin,
              std::int64_t cout, int ksize, Rng& rng, int stride = 1,
              int pad = -1, int groups = 1, bool trainable = true);

  Var forward(const Var& x) const { return conv2d(x, weight, bias, stride, pad, groups); }
};

struct LinearLayer {
  Var weight;
  Var bias;

  LinearLayer() = default;
  LinearLayer(ParamStore& store, const std::string& path, std::int64_t in,
              std::int64_t out, Rng& rng, bool trainable = true);

  Var forward(const Var& x) const { return linear(x, weight, bias); }
};

// Conv layer with a frozen base and a degradation-conditioned low-rank
// adapter: W(d) = W0 + B diag(s(d)) A, s(d) = We d + be. The up factor B is
// zero-initialized, so a fresh adapter leaves the base map unchanged for
// every d.
struct LoraConv2d {
  Var base_weight;  // frozen
  Var bias;         // frozen
  Var down;         // [rank, cin*k*k]
  Var up;           // [cout, rank], zero init
  Var embed_w;      // [rank, 2]
  Var embed_b;      // [rank]
  int stride = 1;
  int pad = 1;
  std::vector<std::int64_t> weight_shape;

  LoraConv2d() = default;
  LoraConv2d(ParamStore& store, const std::string& path, std::int64_t cin,
             std::int64_t cout, int ksize, int rank, Rng& rng, int stride = 1,
             int pad = -1);

  // Per-rank scales for a degradation vector d (the lora_modulate map).
  Var scales(const Var& d) const;
  Var adapted_weight(const Var& d) const;
  Var forward(const Var& x, const Var& d) const;
};

inline Var degradation_var(double d_noise, double d_blur) {
  if (d_noise < 0.0 || d_noise > 1.0 || d_blur < 0.0 || d_blur > 1.0)
    throw std::invalid_argument("degradation vector must lie in [0,1]^2");
  return constant(Tensor({2}, {d_noise, d_blur}));
}

}  // namespace panosr::ag
