#pragma once

#include "deblur/core.hpp"
#include "deblur/latent.hpp"
#include "deblur/trace.hpp"
#include "deblur/transforms.hpp"

namespace deblur {

/// Frequency-domain pieces of the gradient-domain kernel solve that depend
/// only on the latent and observed images.
class KSolver {
 public:
  KSolver(const GradientField& grad_x, const GradientField& grad_y);

  Size2 shape() const noexcept { return symbols_.horizontal.shape(); }

  /// Image-sized minimizer of
  ///   sum_c ||d_c x * k - d_c y||^2 + nu ||k||^2 + xi ||grad k - q||^2
  /// (centered at the origin, not yet cropped or projected).
  Image solve(const GradientField& q, double nu, double xi) const;

 private:
  GradientSymbols symbols_;
  Spectrum cross_;                // sum_c conj(F(d_c x)) F(d_c y)
  std::vector<double> power_;     // sum_c |F(d_c x)|^2
};

Image solve_kernel_field(const GradientField& grad_x, const GradientField& grad_y,
                         const GradientField& q, double nu, double xi);

/// Kernel solve followed by crop to kernel_size and projection onto the
/// feasible set.
Kernel update_k(const GradientField& grad_x, const GradientField& grad_y, const GradientField& q,
                double nu, double xi, Size2 kernel_size);

/// q_i = shrink((grad k)_i, eta*w_i/(2 xi)).
GradientField update_q(const GradientField& grad_k, const WeightField& weights, double eta,
                       double xi);

/// w_i = 1 / (|(grad k)_i| + eps).
WeightField update_weights_k(const GradientField& grad_k, double eps);

/// sum_c ||d_c x * k - d_c y||^2.
double kernel_data_term(const GradientField& grad_x, const GradientField& grad_y, const Kernel& k);

/// Kernel estimate for a fixed latent image under xi continuation from
/// kappa*eta up to xi_max. The kernel size is taken from k_init.
Kernel solve_kernel(const Image& x, const Image& y, const ValidatedConfig& cfg,
                    const Kernel& k_init, const TraceSink& sink = {});

}  // namespace deblur
