#include "panosr/unfold/steps.hpp"

#include <cmath>
#include <mutex>
#include <set>

#include "panosr/core/kernels.hpp"
#include "panosr/core/log.hpp"

namespace panosr::unfold {

namespace {

void log_adjoint_surrogate(const LinearOperator& op) {
  static std::mutex mu;
  static std::set<std::string> logged;
  std::lock_guard<std::mutex> lock(mu);
  if (logged.insert(op.name).second)
    log_info("grad_step: using A-dagger as adjoint surrogate for operator '" +
             op.name + "'");
}

}  // namespace

Tensor grad_step(const Tensor& x, const InverseProblem& problem,
                 double alpha) {
  problem.validate();
  const LinearOperator& op = *problem.op;
  if (x.shape() != op.input_shape)
    throw std::invalid_argument("grad_step: x shape mismatch");
  log_adjoint_surrogate(op);

  Tensor residual = op.forward(x);
  kern::axpy(residual.data(), problem.y.data(), -1.0,
             static_cast<std::size_t>(residual.numel()));  // A x - y
  const Tensor pulled = op.pinv(residual);                 // A†(A x - y)
  Tensor out = x;
  // Gradient of ||y - A x||^2 is 2 A^T (A x - y); the 2 stays explicit.
  kern::axpy(out.data(), pulled.data(), -2.0 * alpha,
             static_cast<std::size_t>(out.numel()));
  return out;
}

Tensor ddnm_step(const Tensor& x0t, const InverseProblem& problem,
                 double alpha) {
  problem.validate();
  const LinearOperator& op = *problem.op;
  if (x0t.shape() != op.input_shape)
    throw std::invalid_argument("ddnm_step: x shape mismatch");

  const Tensor range_part = op.pinv(op.forward(x0t));  // A† A x
  const Tensor data_part = op.pinv(problem.y);         // A† y
  Tensor out = x0t;
  kern::axpy(out.data(), range_part.data(), -alpha,
             static_cast<std::size_t>(out.numel()));
  kern::axpy(out.data(), data_part.data(), alpha,
             static_cast<std::size_t>(out.numel()));
  return out;
}

Tensor dps_estimate_x0(const Tensor& x_t, const Tensor& eps, double alpha_bar,
                       X0EstimateForm form) {
  require_same_shape(x_t, eps, "dps_estimate_x0");
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0))
    throw std::invalid_argument("dps_estimate_x0: alpha_bar must be in (0,1]");
  const double coeff = form == X0EstimateForm::printed
                           ? (1.0 - alpha_bar)
                           : std::sqrt(1.0 - alpha_bar);
  Tensor out = x_t;
  kern::axpy(out.data(), eps.data(), coeff,
             static_cast<std::size_t>(out.numel()));
  kern::scale(out.data(), 1.0 / std::sqrt(alpha_bar),
              static_cast<std::size_t>(out.numel()));
  return out;
}

Tensor dps_guided_step(const Tensor& x_t, const Tensor& eps,
                       const InverseProblem& problem,
                       const GuidanceConfig& cfg) {
  cfg.validate();
  const Tensor x0 = dps_estimate_x0(x_t, eps, cfg.alpha_bar, cfg.form);
  if (cfg.zeta == 0.0) return x0;
  // x0 - zeta * grad||y - A x0||^2 via the same adjoint surrogate.
  return grad_step(x0, problem, cfg.zeta);
}

}  // namespace panosr::unfold
