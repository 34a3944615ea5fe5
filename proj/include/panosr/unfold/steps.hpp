#pragma once

#include "panosr/unfold/linear_op.hpp"

namespace panosr::unfold {

// y = A x + n with an implicit prior: the denoiser plays the role of the
// regularizer, so lambda and the noise model are carried as metadata only.
struct InverseProblem {
  Tensor y;
  const LinearOperator* op = nullptr;
  double lambda = 0.0;
  std::string noise_model = "unknown";

  void validate() const {
    if (!op) throw std::invalid_argument("inverse problem: missing operator");
    if (y.shape() != op->output_shape)
      throw std::invalid_argument(
          "inverse problem: y shape does not match operator output");
  }
};

// Noisy-latent to clean-image estimate. `printed` follows the form
// (x_t + (1 - a_bar) * eps) / sqrt(a_bar); `conventional` uses the usual
// sqrt(1 - a_bar) noise coefficient. Which one the source intended is
// ambiguous, so both are available; printed is the default.
enum class X0EstimateForm { printed, conventional };

struct GuidanceConfig {
  double alpha = 1.0;       // step size of the gradient / approximate step
  double zeta = 0.0;        // step size of the posterior-guided step
  double alpha_bar = 0.25;  // cumulative schedule value at the operating step
  X0EstimateForm form = X0EstimateForm::printed;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("guidance: alpha must be in (0,1]");
    if (zeta < 0.0) throw std::invalid_argument("guidance: zeta must be >= 0");
    if (!(alpha_bar > 0.0 && alpha_bar <= 1.0))
      throw std::invalid_argument("guidance: alpha_bar must be in (0,1]");
  }
};

// One data-fidelity gradient step: x' = x - 2 alpha A^T (A x - y). The true
// adjoint of bicubic resampling is unavailable, so A† stands in for A^T (the
// same surrogate the approximate step uses); the substitution is logged once
// per operator.
Tensor grad_step(const Tensor& x, const InverseProblem& problem, double alpha);

// Range-space replacement step: x' = x - alpha (A† A x - A† y).
Tensor ddnm_step(const Tensor& x0t, const InverseProblem& problem,
                 double alpha);

// x_{0|t} estimate from the noisy latent and predicted noise.
Tensor dps_estimate_x0(const Tensor& x_t, const Tensor& eps, double alpha_bar,
                       X0EstimateForm form = X0EstimateForm::printed);

// Full posterior-guided step (the two-line solving process): estimate x0,
// then move it against the data-fidelity gradient with step zeta.
Tensor dps_guided_step(const Tensor& x_t, const Tensor& eps,
                       const InverseProblem& problem,
                       const GuidanceConfig& cfg);

}  // namespace panosr::unfold
