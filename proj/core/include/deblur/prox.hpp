#pragma once

#include <span>
#include <vector>

namespace deblur {

// Proximal toolkit for the l1 norm, its scaled Moreau envelope
//   S_a(v) = min_x ||x||_1 + (a/2)||v - x||^2
// and the minimax concave penalty written as ||v||_1 - S_a(v).
// Every operation is separable; the field versions apply the scalar rule
// componentwise.

double soft_threshold(double v, double t);
std::vector<double> soft_threshold(std::span<const double> v, double t);

/// prox of (1/a)||.||_1, i.e. soft-thresholding at 1/a.
std::vector<double> prox_l1_scaled(std::span<const double> v, double inv_alpha);

double moreau_env_l1(double v, double alpha);
double moreau_env_l1(std::span<const double> v, double alpha);

double grad_moreau_env_l1(double v, double alpha);
std::vector<double> grad_moreau_env_l1(std::span<const double> v, double alpha);

double mcp_value(double v, double alpha);
double mcp_value(std::span<const double> v, double alpha);

/// Brute-force reference: argmin over a 1e-4 grid on [-2|c|-2, 2|c|+2] of
///   weight * mcp(u) + quad * (u - c)^2.
/// Ties go to the smallest |u|.
double mcp_prox_oracle_1d(double c, double weight, double quad, double alpha);

}  // namespace deblur
