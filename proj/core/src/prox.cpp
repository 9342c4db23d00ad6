#include "deblur/prox.hpp"

#include <cmath>
#include <limits>

#include "deblur/core.hpp"

namespace deblur {

namespace {

void require_alpha_positive(double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::AlphaNotPositive, "alpha must be positive");
}

}  // namespace

double soft_threshold(double v, double t) {
  if (t < 0.0) throw Error(ErrorCode::NegativeThreshold, "soft-threshold level must be >= 0");
  const double mag = std::abs(v) - t;
  return mag > 0.0 ? std::copysign(mag, v) : 0.0;
}

std::vector<double> soft_threshold(std::span<const double> v, double t) {
  if (t < 0.0) throw Error(ErrorCode::NegativeThreshold, "soft-threshold level must be >= 0");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - t;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

std::vector<double> prox_l1_scaled(std::span<const double> v, double inv_alpha) {
  return soft_threshold(v, inv_alpha);
}

double moreau_env_l1(double v, double alpha) {
  if (alpha <= 0.0) return 0.0;
  const double a = std::abs(v);
  return a <= 1.0 / alpha ? 0.5 * alpha * v * v : a - 0.5 / alpha;
}

double moreau_env_l1(std::span<const double> v, double alpha) {
  double acc = 0.0;
  for (double x : v) acc += moreau_env_l1(x, alpha);
  return acc;
}

double grad_moreau_env_l1(double v, double alpha) {
  require_alpha_positive(alpha);
  return alpha * (v - soft_threshold(v, 1.0 / alpha));
}

std::vector<double> grad_moreau_env_l1(std::span<const double> v, double alpha) {
  require_alpha_positive(alpha);
  std::vector<double> out(v.size());
  const double t = 1.0 / alpha;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = alpha * (v[i] - soft_threshold(v[i], t));
  return out;
}

double mcp_value(double v, double alpha) {
  require_alpha_positive(alpha);
  return std::abs(v) - moreau_env_l1(v, alpha);
}

double mcp_value(std::span<const double> v, double alpha) {
  require_alpha_positive(alpha);
  double acc = 0.0;
  for (double x : v) acc += std::abs(x) - moreau_env_l1(x, alpha);
  return acc;
}

double mcp_prox_oracle_1d(double c, double weight, double quad, double alpha) {
  constexpr double kStep = 1e-4;
  const double half_width = 2.0 * std::abs(c) + 2.0;
  const auto steps = static_cast<long>(std::ceil(half_width / kStep));
  double best_u = 0.0;
  double best = std::numeric_limits<double>::infinity();
  // Scan outward from zero so that ties resolve to the smallest magnitude.
  for (long n = 0; n <= steps; ++n) {
    for (int sign : {1, -1}) {
      if (n == 0 && sign < 0) continue;
      const double u = sign * static_cast<double>(n) * kStep;
      const double f = weight * mcp_value(u, alpha) + quad * (u - c) * (u - c);
      if (f < best) {
        best = f;
        best_u = u;
      }
    }
  }
  return best_u;
}

}  // namespace deblur
