#pragma once

#include <limits>
#include <string>
#include <vector>

#include "deblur/core.hpp"

namespace deblur {

/// PSNR reported for identical inputs.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10 log10(1 / MSE) with unit peak.
double psnr(const Image& a, const Image& b);

/// Mean SSIM over all fully contained 11x11 Gaussian windows (sigma 1.5),
/// C1 = 0.01^2, C2 = 0.03^2. Both sides must be at least 11.
double ssim(const Image& a, const Image& b);

enum class Metric { Psnr, Ssim };

struct Shift {
  int dx = 0;
  int dy = 0;
  friend bool operator==(const Shift&, const Shift&) = default;
};

/// Periodic translation: out(r, c) = img(r - dy, c - dx).
Image shift_periodic(const Image& img, Shift s);
/// Removes `border` pixels from every side.
Image crop_border(const Image& img, int border);

struct ScoreReport {
  double psnr = 0.0;
  double ssim = 0.0;
  Shift best_shift;
};

/// Scores `restored` against every translation of `reference` in
/// [-max_shift, max_shift]^2, both cropped by `border` pixels (max_shift when
/// negative), and keeps the best value of `metric`. Ties resolve to the
/// lexicographically smallest (dx, dy). Both metrics are reported at the
/// selected shift.
ScoreReport shift_aligned_score(const Image& restored, const Image& reference, int max_shift,
                                Metric metric, int border = -1);

struct ScoreRow {
  std::string image;
  std::string kernel;
  ScoreReport score;
};

std::string format_scores_csv(const std::vector<ScoreRow>& rows);
std::string format_scores_table(const std::vector<ScoreRow>& rows);

}  // namespace deblur
