#include "deblur/latent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "deblur/prox.hpp"

namespace deblur {

XSolver::XSolver(const Image& y, const FreqCache& cache)
    : cache_(&cache), data_term_(dft2(y)), kernel_power_(y.size()) {
  if (y.shape() != cache.shape()) {
    throw Error(ErrorCode::ShapeMismatch, "XSolver: frequency cache built for another size");
  }
  auto d = data_term_.values();
  auto kf = cache.kernel_spectrum().values();
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] *= std::conj(kf[i]);
    kernel_power_[i] = std::norm(kf[i]);
  }
}

Image XSolver::solve(const GradientField& g, const Spectrum& framelet_term, double gamma,
                     double mu, double beta) const {
  const Size2 shape = cache_->shape();
  if (g.shape() != shape || g.dy.shape() != shape || framelet_term.shape() != shape) {
    throw Error(ErrorCode::ShapeMismatch, "XSolver::solve: operand shape mismatch");
  }
  const GradientSymbols& sym = cache_->gradients();
  const Spectrum gh = dft2(g.dx);
  const Spectrum gv = dft2(g.dy);
  Spectrum num(shape.rows, shape.cols);
  auto out = num.values();
  auto d = data_term_.values();
  auto sh = sym.horizontal.values();
  auto sv = sym.vertical.values();
  auto fh = gh.values();
  auto fv = gv.values();
  auto fw = framelet_term.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Complex n = d[i] + mu * (std::conj(sh[i]) * fh[i] + std::conj(sv[i]) * fv[i]) + beta * fw[i];
    const double den = kernel_power_[i] + mu * sym.laplacian[i] + beta + gamma;
    out[i] = n / den;
  }
  return idft2(num);
}

Image update_x(const Image& y, const FreqCache& cache, const GradientField& g,
               const FrameletCoeffs& u, double gamma, double mu, double beta) {
  if (u.shape() != y.shape()) throw Error(ErrorCode::ShapeMismatch, "update_x: u shape");
  const XSolver solver(y, cache);
  return solver.solve(g, dft2(framelet_synthesis(u)), gamma, mu, beta);
}

GradientField update_g(const GradientField& grad_x, const WeightField& weights, double lambda,
                       double mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::NonPositiveParameter, "update_g: mu must be positive");
  require_same_shape(grad_x.dx, weights.dx, "update_g");
  require_same_shape(grad_x.dy, weights.dy, "update_g");
  GradientField g{Image(grad_x.dx.rows(), grad_x.dx.cols()), Image(grad_x.dy.rows(), grad_x.dy.cols())};
  const double scale = lambda / (2.0 * mu);
  auto shrink = [scale](std::span<const double> v, std::span<const double> w, std::span<double> o) {
    for (std::size_t i = 0; i < v.size(); ++i) o[i] = soft_threshold(v[i], scale * w[i]);
  };
  shrink(grad_x.dx.values(), weights.dx.values(), g.dx.values());
  shrink(grad_x.dy.values(), weights.dy.values(), g.dy.values());
  return g;
}

WeightField update_weights_x(const GradientField& grad_x, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::NonPositiveParameter, "weight epsilon must be positive");
  WeightField w = grad_x;
  for (double& v : w.dx.values()) v = 1.0 / (std::abs(v) + eps);
  for (double& v : w.dy.values()) v = 1.0 / (std::abs(v) + eps);
  return w;
}

double fbs_lipschitz(double beta, double lambda, double sigma, double alpha) {
  return 2.0 * beta / (lambda * sigma) + alpha;
}

double fbs_step_size(double rho, double eps) {
  const double inv = 1.0 / rho;
  return eps < 0.5 * inv ? inv - eps : (1.0 - eps) * inv;
}

namespace {

void check_fbs_params(const FbsParams& p) {
  if (!(p.beta > 0.0) || !(p.lambda > 0.0) || !(p.sigma > 0.0)) {
    throw Error(ErrorCode::NonPositiveParameter, "FBS: beta, lambda and sigma must be positive");
  }
  if (!(p.alpha > 0.0)) throw Error(ErrorCode::AlphaNotPositive, "FBS: alpha must be positive");
  const double bound = 2.0 * p.beta / (p.lambda * p.sigma);
  if (p.alpha > bound * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "alpha = " << p.alpha << " exceeds 2 beta/(lambda sigma) = " << bound;
    throw Error(ErrorCode::PreconditionAlphaTooLarge, os.str());
  }
  const double rho = bound + p.alpha;
  if (!(p.tau > 0.0) || !(p.tau < 2.0 / rho)) {
    std::ostringstream os;
    os << "tau = " << p.tau << " outside (0, 2/rho) with rho = " << rho;
    throw Error(ErrorCode::StepSizeOutOfRange, os.str());
  }
  if (p.max_iters < 1 || !(p.tol > 0.0)) {
    throw Error(ErrorCode::NonPositiveParameter, "FBS: max_iters and tol must be positive");
  }
}

}  // namespace

FbsResult fbs_mcp_prox(std::span<const double> target, std::span<const double> u0,
                       const FbsParams& params, const FbsObserver& observer) {
  check_fbs_params(params);
  if (target.size() != u0.size()) throw Error(ErrorCode::ShapeMismatch, "FBS: u0 size");

  const double pull = 2.0 * params.beta / (params.lambda * params.sigma);
  const double alpha = params.alpha;
  const double inv_alpha = 1.0 / alpha;
  const double tau = params.tau;

  FbsResult result;
  result.u.assign(u0.begin(), u0.end());
  std::vector<double> next(u0.size());
  for (int it = 1; it <= params.max_iters; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double u = result.u[i];
      const double envelope_grad = alpha * (u - soft_threshold(u, inv_alpha));
      const double z = u - tau * (pull * (u - target[i]) - envelope_grad);
      const double mag = std::abs(z) - tau;
      next[i] = mag > 0.0 ? std::copysign(mag, z) : 0.0;
      change = std::max(change, std::abs(next[i] - u));
    }
    result.u.swap(next);
    result.iterations = it;
    result.residual = change;
    if (observer) observer(it, result.u);
    if (change < params.tol) break;
  }
  return result;
}

FrameletCoeffs update_u_fbs(const FrameletCoeffs& wx, const FrameletCoeffs& u0,
                            const FbsParams& params) {
  if (wx.shape() != u0.shape()) throw Error(ErrorCode::ShapeMismatch, "update_u_fbs: u0 shape");
  const std::vector<double> target = wx.flatten();
  const std::vector<double> start = u0.flatten();
  return FrameletCoeffs::unflatten(fbs_mcp_prox(target, start, params).u, wx.shape());
}

double mcp_prox_objective(std::span<const double> target, std::span<const double> u,
                          const FbsParams& params) {
  double fit = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) fit += (target[i] - u[i]) * (target[i] - u[i]);
  return params.lambda * params.sigma * mcp_value(u, params.alpha) + params.beta * fit;
}

double latent_energy(const Image& x, const Image& y, const FreqCache& cache, double gamma,
                     double lambda, double sigma, double alpha, const WeightField& weights) {
  const Image residual = convolve_periodic(x, cache.kernel()) - y;
  const double fit = dot(residual.values(), residual.values());
  const double ridge = gamma * dot(x.values(), x.values());
  const double mcp = mcp_value(framelet_analysis(x).flatten(), alpha);
  const GradientField gx = gradient(x);
  double tv = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    tv += weights.dx.values()[i] * std::abs(gx.dx.values()[i]) +
          weights.dy.values()[i] * std::abs(gx.dy.values()[i]);
  }
  return fit + ridge + lambda * (sigma * mcp + tv);
}

Image solve_latent(const Image& y, const Kernel& k, const ValidatedConfig& vcfg,
                   const TraceSink& sink) {
  const SolverConfig& cfg = vcfg.params();
  const FreqCache cache(k, y.shape());
  const XSolver xsolver(y, cache);
  const double ls = cfg.lambda * cfg.sigma;

  Image x = y;
  FrameletCoeffs u;
  for (Image& b : u.bands) b = Image(y.rows(), y.cols());

  int stage = 0;
  for (double beta = cfg.kappa * ls; beta <= cfg.beta_max; beta *= cfg.kappa, ++stage) {
    // Early stages have 2 beta/(lambda sigma) below the model's alpha; the
    // envelope scale is capped there so that f1 stays convex.
    FbsParams fbs;
    fbs.beta = beta;
    fbs.lambda = cfg.lambda;
    fbs.sigma = cfg.sigma;
    fbs.alpha = std::min(vcfg.alpha(), 2.0 * beta / ls);
    fbs.tau = fbs_step_size(fbs_lipschitz(beta, cfg.lambda, cfg.sigma, fbs.alpha), cfg.epsilon);
    fbs.max_iters = cfg.fbs_max_iters;
    fbs.tol = cfg.fbs_tol;

    const std::vector<double> target = framelet_analysis(x).flatten();
    const FbsResult fr = fbs_mcp_prox(target, u.flatten(), fbs);
    u = FrameletCoeffs::unflatten(fr.u, y.shape());
    const Spectrum framelet_term = dft2(framelet_synthesis(u));

    double mu = cfg.kappa * cfg.lambda;
    for (; mu <= cfg.mu_max; mu *= cfg.kappa) {
      const GradientField gx = gradient(x);
      const WeightField w = update_weights_x(gx, cfg.weight_epsilon);
      const GradientField g = update_g(gx, w, cfg.lambda, mu);
      x = xsolver.solve(g, framelet_term, cfg.gamma, mu, beta);
    }

    if (sink) {
      TraceRecord rec;
      rec.solver = "latent";
      rec.stage = stage;
      rec.beta = beta;
      rec.mu = mu / cfg.kappa;
      rec.gamma = cfg.gamma;
      rec.lambda = cfg.lambda;
      rec.objective = mcp_prox_objective(target, fr.u, fbs);
      rec.residual = fr.residual;
      rec.iterations = fr.iterations;
      sink(rec);
    }
  }
  return x;
}

}  // namespace deblur
