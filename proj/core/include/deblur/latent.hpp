#pragma once

#include <functional>

#include "deblur/core.hpp"
#include "deblur/trace.hpp"
#include "deblur/transforms.hpp"

namespace deblur {

/// Per-pixel reweighting factors for the two gradient channels.
using WeightField = GradientField;

/// Closed-form minimizer of
///   ||Kx - y||^2 + gamma||x||^2 + mu||grad x - g||^2 + beta||Wx - u||^2
/// under periodic boundaries.
Image update_x(const Image& y, const FreqCache& cache, const GradientField& g,
               const FrameletCoeffs& u, double gamma, double mu, double beta);

/// Precomputes the parts of the x-solve that stay fixed for one image and
/// kernel so the continuation loop only pays for the g and u terms.
class XSolver {
 public:
  XSolver(const Image& y, const FreqCache& cache);

  /// framelet_term is dft2(framelet_synthesis(u)).
  Image solve(const GradientField& g, const Spectrum& framelet_term, double gamma, double mu,
              double beta) const;

 private:
  const FreqCache* cache_;
  Spectrum data_term_;  // conj(F(K)) F(y)
  std::vector<double> kernel_power_;
};

/// Weighted soft-threshold: g_i = shrink((grad x)_i, lambda*w_i/(2 mu)).
GradientField update_g(const GradientField& grad_x, const WeightField& weights, double lambda,
                       double mu);

/// w_i = 1 / (|(grad x)_i| + eps).
WeightField update_weights_x(const GradientField& grad_x, double eps);

struct FbsParams {
  double beta = 0.0;
  double lambda = 0.0;
  double sigma = 0.0;
  double alpha = 0.0;
  double tau = 0.0;
  int max_iters = 50;
  double tol = 1e-6;
};

struct FbsResult {
  std::vector<double> u;
  int iterations = 0;
  double residual = 0.0;  // ||u_{k+1} - u_k||_inf of the last step
};

/// Called after every FBS step with the iteration count and the new iterate.
using FbsObserver = std::function<void(int, std::span<const double>)>;

/// Forward-backward splitting for
///   argmin_u lambda*sigma*||u||_MCP + beta*||target - u||^2,
/// in the form divided through by lambda*sigma:
///   f1(u) = beta/(lambda sigma) ||target - u||^2 - S_alpha(u),  f2 = ||u||_1.
/// Requires alpha <= 2 beta/(lambda sigma) and 0 < tau < 2/rho with
/// rho = 2 beta/(lambda sigma) + alpha.
FbsResult fbs_mcp_prox(std::span<const double> target, std::span<const double> u0,
                       const FbsParams& params, const FbsObserver& observer = {});

FrameletCoeffs update_u_fbs(const FrameletCoeffs& wx, const FrameletCoeffs& u0,
                            const FbsParams& params);

/// lambda*sigma*||u||_MCP + beta*||target - u||^2.
double mcp_prox_objective(std::span<const double> target, std::span<const double> u,
                          const FbsParams& params);

/// Lipschitz constant of grad f1.
double fbs_lipschitz(double beta, double lambda, double sigma, double alpha);

/// Step 1/rho - eps, falling back to (1 - eps)/rho once eps is no longer
/// small against 1/rho (large beta drives 1/rho below eps).
double fbs_step_size(double rho, double eps);

/// ||Kx - y||^2 + gamma||x||^2 + lambda*(sigma*||Wx||_MCP + sum_i w_i |(grad x)_i|).
double latent_energy(const Image& x, const Image& y, const FreqCache& cache, double gamma,
                     double lambda, double sigma, double alpha, const WeightField& weights);

/// Non-blind latent image estimate for a fixed kernel: continuation over beta
/// (outer) and mu (inner), starting from x = y.
Image solve_latent(const Image& y, const Kernel& k, const ValidatedConfig& cfg,
                   const TraceSink& sink = {});

}  // namespace deblur
