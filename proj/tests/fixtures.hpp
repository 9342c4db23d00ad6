#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "deblur/core.hpp"
#include "deblur/transforms.hpp"

namespace deblur::testing {

/// Deterministic piecewise-constant scene: rectangles, a disk, a triangle and
/// a thin bar on a mid-gray background, scaled to `size` x `size`.
inline Image shapes_fixture(int size = 64) {
  Image img(size, size, 0.35);
  const double s = size / 64.0;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double y = r / s;
      const double x = c / s;
      double v = 0.35;
      if (x >= 6 && x < 26 && y >= 8 && y < 22) v = 0.85;
      if (x >= 36 && x < 58 && y >= 6 && y < 14) v = 0.1;
      if ((x - 44) * (x - 44) + (y - 34) * (y - 34) < 100) v = 0.95;
      if (y >= 38 && y < 58 && x >= 8 && x - 8 < (y - 38) * 1.1) v = 0.6;
      if (x >= 30 && x < 33 && y >= 26 && y < 60) v = 0.05;
      if (x >= 40 && x < 60 && y >= 50 && y < 56) v = 0.7;
      img(r, c) = v;
    }
  }
  return img;
}

inline Image random_image(int rows, int cols, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Image img(rows, cols);
  for (double& v : img.values()) v = dist(rng);
  return img;
}

inline Kernel random_kernel(int size, std::uint64_t seed) {
  return project_kernel(random_image(size, size, seed, 0.0, 1.0));
}

inline GradientField random_gradient(int rows, int cols, std::uint64_t seed) {
  return {random_image(rows, cols, seed, -1.0, 1.0), random_image(rows, cols, seed + 1, -1.0, 1.0)};
}

inline FrameletCoeffs random_coeffs(int rows, int cols, std::uint64_t seed) {
  FrameletCoeffs u;
  for (int b = 0; b < FrameletCoeffs::kBands; ++b) {
    u.bands[static_cast<std::size_t>(b)] = random_image(rows, cols, seed + 17 * b, -1.0, 1.0);
  }
  return u;
}

/// Gaussian noise with a fixed seed.
inline Image add_noise(Image img, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  for (double& v : img.values()) v += dist(rng);
  return img;
}

/// Normalized cross-correlation of two equally sized kernels.
inline double kernel_ncc(const Image& a, const Image& b) {
  const double ma = a.sum() / a.size();
  const double mb = b.sum() / b.size();
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.values()[i] - ma;
    const double y = b.values()[i] - mb;
    num += x * y;
    da += x * x;
    db += y * y;
  }
  return num / std::sqrt(da * db);
}

/// Best NCC over integer translations of `estimate` (zero fill) within +-max_shift.
inline double aligned_kernel_ncc(const Image& estimate, const Image& truth, int max_shift) {
  double best = -1.0;
  for (int dy = -max_shift; dy <= max_shift; ++dy) {
    for (int dx = -max_shift; dx <= max_shift; ++dx) {
      Image moved(truth.rows(), truth.cols());
      for (int r = 0; r < truth.rows(); ++r) {
        for (int c = 0; c < truth.cols(); ++c) {
          const int sr = r - dy;
          const int sc = c - dx;
          if (sr >= 0 && sr < estimate.rows() && sc >= 0 && sc < estimate.cols()) {
            moved(r, c) = estimate(sr, sc);
          }
        }
      }
      best = std::max(best, kernel_ncc(moved, truth));
    }
  }
  return best;
}

}  // namespace deblur::testing
