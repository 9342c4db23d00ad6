#include "deblur/kernel.hpp"

#include <cmath>

#include "deblur/prox.hpp"

namespace deblur {

KSolver::KSolver(const GradientField& grad_x, const GradientField& grad_y)
    : symbols_(grad_x.shape()) {
  require_same_shape(grad_x.dx, grad_y.dx, "KSolver");
  require_same_shape(grad_x.dy, grad_y.dy, "KSolver");
  require_same_shape(grad_x.dx, grad_x.dy, "KSolver");
  const Spectrum xh = dft2(grad_x.dx);
  const Spectrum xv = dft2(grad_x.dy);
  const Spectrum yh = dft2(grad_y.dx);
  const Spectrum yv = dft2(grad_y.dy);
  cross_ = Spectrum(xh.rows(), xh.cols());
  power_.resize(xh.size());
  for (std::size_t i = 0; i < power_.size(); ++i) {
    const Complex a = xh.values()[i];
    const Complex b = xv.values()[i];
    cross_.values()[i] = std::conj(a) * yh.values()[i] + std::conj(b) * yv.values()[i];
    power_[i] = std::norm(a) + std::norm(b);
  }
}

Image KSolver::solve(const GradientField& q, double nu, double xi) const {
  if (!(nu > 0.0) || !(xi > 0.0)) {
    throw Error(ErrorCode::NonPositiveParameter, "kernel solve: nu and xi must be positive");
  }
  const Size2 s = shape();
  if (q.dx.shape() != s || q.dy.shape() != s) {
    throw Error(ErrorCode::ShapeMismatch, "kernel solve: q shape");
  }
  const Spectrum qh = dft2(q.dx);
  const Spectrum qv = dft2(q.dy);
  Spectrum out(s.rows, s.cols);
  auto sh = symbols_.horizontal.values();
  auto sv = symbols_.vertical.values();
  for (std::size_t i = 0; i < power_.size(); ++i) {
    const Complex num = cross_.values()[i] +
                        xi * (std::conj(sh[i]) * qh.values()[i] + std::conj(sv[i]) * qv.values()[i]);
    const double den = power_[i] + xi * symbols_.laplacian[i] + nu;
    out.values()[i] = num / den;
  }
  return idft2(out);
}

Image solve_kernel_field(const GradientField& grad_x, const GradientField& grad_y,
                         const GradientField& q, double nu, double xi) {
  return KSolver(grad_x, grad_y).solve(q, nu, xi);
}

Kernel update_k(const GradientField& grad_x, const GradientField& grad_y, const GradientField& q,
                double nu, double xi, Size2 kernel_size) {
  const Image field = solve_kernel_field(grad_x, grad_y, q, nu, xi);
  return project_kernel(crop_center_kernel(field, kernel_size));
}

GradientField update_q(const GradientField& grad_k, const WeightField& weights, double eta,
                       double xi) {
  if (!(xi > 0.0)) throw Error(ErrorCode::NonPositiveParameter, "update_q: xi must be positive");
  require_same_shape(grad_k.dx, weights.dx, "update_q");
  require_same_shape(grad_k.dy, weights.dy, "update_q");
  GradientField q = grad_k;
  const double scale = eta / (2.0 * xi);
  for (std::size_t i = 0; i < q.dx.size(); ++i) {
    q.dx.values()[i] = soft_threshold(grad_k.dx.values()[i], scale * weights.dx.values()[i]);
    q.dy.values()[i] = soft_threshold(grad_k.dy.values()[i], scale * weights.dy.values()[i]);
  }
  return q;
}

WeightField update_weights_k(const GradientField& grad_k, double eps) {
  return update_weights_x(grad_k, eps);
}

double kernel_data_term(const GradientField& grad_x, const GradientField& grad_y, const Kernel& k) {
  const Image rh = convolve_periodic(grad_x.dx, k) - grad_y.dx;
  const Image rv = convolve_periodic(grad_x.dy, k) - grad_y.dy;
  return dot(rh.values(), rh.values()) + dot(rv.values(), rv.values());
}

Kernel solve_kernel(const Image& x, const Image& y, const ValidatedConfig& vcfg,
                    const Kernel& k_init, const TraceSink& sink) {
  const SolverConfig& cfg = vcfg.params();
  require_same_shape(x, y, "solve_kernel");
  if (k_init.rows() > x.rows() || k_init.cols() > x.cols()) {
    throw Error(ErrorCode::KernelLargerThanImage, "solve_kernel: kernel larger than image");
  }
  // The only feasible 1x1 kernel is the identity.
  if (k_init.rows() == 1 && k_init.cols() == 1) return Kernel::delta(1, 1);

  const GradientField gx = gradient(x);
  const GradientField gy = gradient(y);
  const KSolver solver(gx, gy);
  const Size2 ksize = k_init.shape();

  Kernel k = k_init;
  int stage = 0;
  for (double xi = cfg.kappa * cfg.eta; xi <= cfg.xi_max; xi *= cfg.kappa, ++stage) {
    const GradientField gk = gradient(pad_center_kernel(k, x.shape()));
    const WeightField w = update_weights_k(gk, cfg.weight_epsilon);
    const GradientField q = update_q(gk, w, cfg.eta, xi);
    const Image field = solver.solve(q, cfg.nu, xi);
    try {
      k = project_kernel(crop_center_kernel(field, ksize));
    } catch (const Error& e) {
      // Nothing positive inside the support: keep the previous estimate.
      if (e.code() != ErrorCode::DegenerateKernel) throw;
    }
    if (sink) {
      TraceRecord rec;
      rec.solver = "kernel";
      rec.stage = stage;
      rec.xi = xi;
      rec.objective = kernel_data_term(gx, gy, k);
      sink(rec);
    }
  }
  return k;
}

}  // namespace deblur
