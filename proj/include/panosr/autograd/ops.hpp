#pragma once

#include "panosr/autograd/variable.hpp"

namespace panosr::ag {

// Elementwise (same shape unless stated).
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double c);
Var neg(const Var& a);

Var relu(const Var& a);
Var leaky_relu(const Var& a, double slope = 0.2);
Var sigmoid(const Var& a);

// x: CHW, bias: [C].
Var add_channel_bias(const Var& x, const Var& bias);

// x: CHW. w: [Cout, Cin/groups, kh, kw]. bias: [Cout] or nullptr.
Var conv2d(const Var& x, const Var& w, const Var& bias, int stride = 1,
           int pad = 1, int groups = 1);

// x: [n] or [1,n]; w: [m,n]; bias: [m] or nullptr.
Var linear(const Var& x, const Var& w, const Var& bias);

Var matmul(const Var& a, const Var& b);          // [m,k] x [k,n]
Var scale_rows(const Var& a, const Var& s);      // diag(s) * a, s: [m]
Var mix_rows(const Var& bank, const Var& w);     // sum_k w[k] * bank[k,:]

Var softmax(const Var& x);  // rank-1

Var reshape(const Var& x, std::vector<std::int64_t> shape);
Var concat_channels(const Var& a, const Var& b);
Var concat_vec(const Var& a, const Var& b);  // rank-1 concatenation

// Depth-to-space / space-to-depth / grouped channel permutation (CHW).
Var pixel_shuffle(const Var& x, int r);
Var pixel_unshuffle(const Var& x, int r);
Var channel_shuffle(const Var& x, int groups);

Var avg_pool2(const Var& x);  // 2x2, stride 2

Var sum_all(const Var& x);   // -> [1]
Var mean_all(const Var& x);  // -> [1]
Var channel_mean(const Var& x);  // CHW -> [C] (global average pool)

// mean(sqrt((a-b)^2 + eps^2)); smooth everywhere.
Var charbonnier(const Var& a, const Var& b, double eps = 1e-3);

// Raw-tensor helpers shared with non-autograd callers.
Tensor pixel_shuffle_tensor(const Tensor& x, int r);
Tensor pixel_unshuffle_tensor(const Tensor& x, int r);
Tensor channel_shuffle_tensor(const Tensor& x, int groups);

}  // namespace panosr::ag
