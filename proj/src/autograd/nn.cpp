#include "panosr/autograd/nn.hpp"

#include <cmath>

#include "panosr/core/hash.hpp"

namespace panosr::ag {

Var ParamStore::add(const std::string& name, Tensor init, bool trainable) {
  if (index_.count(name))
    throw std::invalid_argument("param store: duplicate name " + name);
  Param p;
  p.name = name;
  p.var = leaf(std::move(init), trainable);
  p.trainable = trainable;
  index_[name] = params_.size();
  params_.push_back(p);
  return params_.back().var;
}

Var ParamStore::find(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end())
    throw std::invalid_argument("param store: unknown name " + name);
  return params_[it->second].var;
}

bool ParamStore::contains(const std::string& name) const {
  return index_.count(name) != 0;
}

std::vector<Param> ParamStore::with_prefix(const std::string& prefix) const {
  std::vector<Param> out;
  for (const auto& p : params_)
    if (p.name.rfind(prefix, 0) == 0) out.push_back(p);
  return out;
}

std::int64_t ParamStore::count_scalars(bool trainable_only) const {
  std::int64_t n = 0;
  for (const auto& p : params_)
    if (!trainable_only || p.trainable) n += p.var->value.numel();
  return n;
}

void ParamStore::zero_grads() {
  for (auto& p : params_) p.var->zero_grad();
}

std::uint64_t ParamStore::value_hash(const std::string& prefix) const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& p : params_) {
    if (!prefix.empty() && p.name.rfind(prefix, 0) != 0) continue;
    h = fnv1a(p.name.data(), p.name.size(), h);
    h = fnv1a(p.var->value.data(),
              sizeof(double) * static_cast<std::size_t>(p.var->value.numel()),
              h);
  }
  return h;
}

Tensor he_normal(std::vector<std::int64_t> shape, std::int64_t fan_in,
                 Rng& rng, double gain) {
  Tensor t(std::move(shape));
  const double stddev = gain * std::sqrt(2.0 / static_cast<double>(fan_in));
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = rng.normal(0.0, stddev);
  return t;
}

Conv2dLayer::Conv2dLayer(ParamStore& store, const std::string& path,
                         std::int64_t cin, std::int64_t cout, int ksize,
                         Rng& rng, int stride_, int pad_, int groups_,
                         bool trainable) {
  stride = stride_;
  pad = pad_ < 0 ? ksize / 2 : pad_;
  groups = groups_;
  const std::int64_t cin_g = cin / groups;
  weight = store.add(
      path + ".weight",
      he_normal({cout, cin_g, ksize, ksize}, cin_g * ksize * ksize, rng),
      trainable);
  bias = store.add(path + ".bias", Tensor({cout}), trainable);
}

LinearLayer::LinearLayer(ParamStore& store, const std::string& path,
                         std::int64_t in, std::int64_t out, Rng& rng,
                         bool trainable) {
  weight = store.add(path + ".weight", he_normal({out, in}, in, rng),
                     trainable);
  bias = store.add(path + ".bias", Tensor({out}), trainable);
}

LoraConv2d::LoraConv2d(ParamStore& store, const std::string& path,
                       std::int64_t cin, std::int64_t cout, int ksize,
                       int rank, Rng& rng, int stride_, int pad_) {
  stride = stride_;
  pad = pad_ < 0 ? ksize / 2 : pad_;
  weight_shape = {cout, cin, ksize, ksize};
  const std::int64_t cols = cin * ksize * ksize;
  base_weight = store.add(path + ".weight",
                          he_normal(weight_shape, cols, rng), false);
  bias = store.add(path + ".bias", Tensor({cout}), false);
  down = store.add(path + ".lora_down", he_normal({rank, cols}, cols, rng),
                   true);
  up = store.add(path + ".lora_up", Tensor({cout, rank}), true);  // zero
  embed_w = store.add(path + ".lora_embed_w",
                      he_normal({rank, 2}, 2, rng), true);
  embed_b = store.add(path + ".lora_embed_b", Tensor({rank}, 1.0), true);
}

Var LoraConv2d::scales(const Var& d) const {
  return linear(d, embed_w, embed_b);
}

Var LoraConv2d::adapted_weight(const Var& d) const {
  const Var delta = matmul(up, scale_rows(down, scales(d)));
  return add(base_weight, reshape(delta, weight_shape));
}

Var LoraConv2d::forward(const Var& x, const Var& d) const {
  return conv2d(x, adapted_weight(d), bias, stride, pad, 1);
}

}  // namespace panosr::ag
