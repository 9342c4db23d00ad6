#pragma once

#include <string>

#include "deblur/core.hpp"

namespace deblur::cli {

Kernel box_kernel(int size);

/// Sampled isotropic Gaussian. size <= 0 picks 2*ceil(3 sigma) + 1.
Kernel gaussian_kernel(double sigma, int size = 0);

/// Straight motion path covering `length` pixels at `angle_deg` (counter
/// clockwise from the horizontal axis), splatted bilinearly onto the smallest
/// odd square grid that holds it.
Kernel motion_kernel(double length, double angle_deg);

/// Parses a generator spec: "delta", "box:N", "gaussian:SIGMA[:SIZE]" or
/// "motion:LENGTH:ANGLE". Returns false when `spec` is not a generator spec.
bool parse_kernel_spec(const std::string& spec, Kernel& out);

}  // namespace deblur::cli
