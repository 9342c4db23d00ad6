#pragma once

#include <vector>

#include "deblur/core.hpp"
#include "deblur/trace.hpp"

namespace deblur {

struct PyramidLevel {
  Image y_level;
  Size2 kernel_size;
  double scale = 1.0;  // nominal scale relative to full resolution
};

inline constexpr int kMaxPyramidLevels = 12;
inline constexpr int kMinPyramidSide = 16;

/// Nearest odd integer >= 3 to v (ties go up).
int nearest_odd_at_least3(double v);

/// Bilinear resampling with half-pixel-centered sample positions. A 3x3
/// binomial prefilter is applied first when shrinking by a factor of two or
/// more along either axis.
Image resize_bilinear(const Image& img, Size2 target);

/// Coarse-to-fine ladder, coarsest level first. Kernel sides shrink by
/// `scale` per level (rounded to the nearest odd >= 3) until both are 3;
/// image sides are rounded to even and never go below 16.
std::vector<PyramidLevel> build_pyramid(const Image& y, Size2 kernel_size, double scale);

/// Center-aligned bilinear enlargement followed by projection.
Kernel upsample_kernel(const Kernel& k, Size2 new_size);

/// Zeroes taps below fraction * max and renormalizes.
Kernel prune_kernel(const Kernel& k, double fraction);

/// Blends y with its periodic blur by k near the borders using a raised
/// cosine ramp as wide as the kernel, removing the wrap-around discontinuity.
Image edge_taper(const Image& y, const Kernel& k);

struct LevelResult {
  Image x;
  Kernel k;
  double gamma = 0.0;   // values after the final decay
  double lambda = 0.0;
};

/// Alternates solve_latent and solve_kernel cfg.outer_iters times, decaying
/// gamma and lambda by 1.1 (floor 1e-4) after each alternation. Emits one
/// "level" trace record per alternation.
LevelResult run_level(const Image& y_level, const Kernel& k_init, const SolverConfig& cfg,
                      int level = -1, const TraceSink& sink = {});

struct LevelSnapshot {
  int level = 0;
  Image x;
  Kernel k;
};

struct RestorationResult {
  Image x_final;
  Kernel k_final;
  std::vector<TraceRecord> traces;
  std::vector<LevelSnapshot> levels;
  double seconds = 0.0;
};

/// Final non-blind pass: edge taper, then solve_latent at full resolution.
Image restore_with_kernel(const Image& y, const Kernel& k, const SolverConfig& cfg);

/// Full blind restoration: pyramid loop coarse to fine, then one
/// restore_with_kernel() pass on the input.
RestorationResult blind_deblur(const Image& y, const SolverConfig& cfg);

}  // namespace deblur
