#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "panosr/core/tensor.hpp"

namespace panosr::ag {

// Reverse-mode autodiff over dense double tensors. Nodes form a DAG built
// eagerly by the op functions in ops.hpp; backward() walks it once in
// reverse topological order.
class Node;
using Var = std::shared_ptr<Node>;

class Node {
 public:
  Tensor value;
  Tensor grad;  // allocated on first accumulation
  bool requires_grad = false;
  std::vector<Var> parents;
  // Pulls this node's grad into the parents' grads.
  std::function<void(Node&)> backprop;

  void accumulate(const Tensor& g) {
    if (grad.empty()) grad = Tensor(value.shape());
    if (!grad.same_shape(g))
      throw std::logic_error("autograd: gradient shape mismatch");
    for (std::int64_t i = 0; i < g.numel(); ++i) grad[i] += g[i];
  }

  void zero_grad() { grad = Tensor(); }
};

// Trainable leaf (or frozen input when requires_grad = false).
Var leaf(Tensor value, bool requires_grad = false);
inline Var constant(Tensor value) { return leaf(std::move(value), false); }

// Creates an interior node; requires_grad is inherited from the parents.
Var make_node(Tensor value, std::vector<Var> parents,
              std::function<void(Node&)> backprop);

// Seeds d(root)/d(root) = 1 and accumulates grads into every reachable
// requires_grad leaf. root must be scalar (numel == 1).
void backward(const Var& root);

// Detached copy of the value (gradient barrier).
Var detach(const Var& v);

}  // namespace panosr::ag
