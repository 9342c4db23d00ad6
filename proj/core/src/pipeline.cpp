#include "deblur/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "deblur/kernel.hpp"
#include "deblur/latent.hpp"
#include "deblur/transforms.hpp"

namespace deblur {

int nearest_odd_at_least3(double v) {
  const int odd = 2 * static_cast<int>(std::floor((v - 1.0) / 2.0)) + 1;  // odd in (v-2, v]
  const int best = (v - odd >= 1.0) ? odd + 2 : odd;
  return std::max(3, best);
}

namespace {

int nearest_even(double v) { return 2 * static_cast<int>(std::lround(v / 2.0)); }

// Separable [1 2 1]/4 with edge replication.
Image binomial3(const Image& img) {
  const int rows = img.rows();
  const int cols = img.cols();
  Image tmp(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int cm = std::max(c - 1, 0);
      const int cp = std::min(c + 1, cols - 1);
      tmp(r, c) = 0.25 * img(r, cm) + 0.5 * img(r, c) + 0.25 * img(r, cp);
    }
  }
  Image out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const int rm = std::max(r - 1, 0);
    const int rp = std::min(r + 1, rows - 1);
    for (int c = 0; c < cols; ++c) out(r, c) = 0.25 * tmp(rm, c) + 0.5 * tmp(r, c) + 0.25 * tmp(rp, c);
  }
  return out;
}

struct Tap {
  int lo;
  int hi;
  double frac;
};

Tap sample_position(double pos, int n) {
  pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
  const int lo = static_cast<int>(std::floor(pos));
  const int hi = std::min(lo + 1, n - 1);
  return {lo, hi, pos - lo};
}

double bilinear(const Image& img, const Tap& tr, const Tap& tc) {
  const double top = (1.0 - tc.frac) * img(tr.lo, tc.lo) + tc.frac * img(tr.lo, tc.hi);
  const double bottom = (1.0 - tc.frac) * img(tr.hi, tc.lo) + tc.frac * img(tr.hi, tc.hi);
  return (1.0 - tr.frac) * top + tr.frac * bottom;
}

}  // namespace

Image resize_bilinear(const Image& img, Size2 target) {
  if (target.rows < 1 || target.cols < 1 || img.empty()) {
    throw Error(ErrorCode::ImageTooSmall, "resize_bilinear: empty source or target");
  }
  const bool prefilter = 2 * target.rows <= img.rows() || 2 * target.cols <= img.cols();
  const Image src = prefilter ? binomial3(img) : img;
  const double sr = static_cast<double>(img.rows()) / target.rows;
  const double sc = static_cast<double>(img.cols()) / target.cols;
  Image out(target.rows, target.cols);
  for (int r = 0; r < target.rows; ++r) {
    const Tap tr = sample_position((r + 0.5) * sr - 0.5, img.rows());
    for (int c = 0; c < target.cols; ++c) {
      out(r, c) = bilinear(src, tr, sample_position((c + 0.5) * sc - 0.5, img.cols()));
    }
  }
  return out;
}

std::vector<PyramidLevel> build_pyramid(const Image& y, Size2 kernel_size, double scale) {
  if (!(scale > 0.0 && scale < 1.0)) {
    throw Error(ErrorCode::InvalidPyramid, "pyramid scale must lie in (0, 1)");
  }
  if (kernel_size.rows % 2 == 0 || kernel_size.cols % 2 == 0 || kernel_size.rows < 1 ||
      kernel_size.cols < 1) {
    throw Error(ErrorCode::EvenKernelDimension, "kernel dimensions must be odd");
  }
  if (y.rows() < kMinPyramidSide || y.cols() < kMinPyramidSide || y.rows() < kernel_size.rows ||
      y.cols() < kernel_size.cols) {
    std::ostringstream os;
    os << "image " << y.rows() << "x" << y.cols() << " is smaller than "
       << std::max(kMinPyramidSide, kernel_size.rows) << "x"
       << std::max(kMinPyramidSide, kernel_size.cols);
    throw Error(ErrorCode::ImageTooSmall, os.str());
  }

  std::vector<PyramidLevel> fine_to_coarse;
  fine_to_coarse.push_back({y, kernel_size, 1.0});
  Size2 ks = kernel_size;
  for (int l = 1; ks.rows > 3 || ks.cols > 3; ++l) {
    if (l >= kMaxPyramidLevels) {
      throw Error(ErrorCode::InvalidPyramid, "pyramid would exceed 12 levels; use a smaller scale");
    }
    const double s = std::pow(scale, l);
    ks = {kernel_size.rows <= 3 ? kernel_size.rows : nearest_odd_at_least3(kernel_size.rows * s),
          kernel_size.cols <= 3 ? kernel_size.cols : nearest_odd_at_least3(kernel_size.cols * s)};
    const Size2 dims{std::clamp(nearest_even(y.rows() * s), kMinPyramidSide, y.rows()),
                     std::clamp(nearest_even(y.cols() * s), kMinPyramidSide, y.cols())};
    fine_to_coarse.push_back({resize_bilinear(y, dims), ks, s});
  }
  std::reverse(fine_to_coarse.begin(), fine_to_coarse.end());
  return fine_to_coarse;
}

Kernel upsample_kernel(const Kernel& k, Size2 new_size) {
  if (new_size.rows % 2 == 0 || new_size.cols % 2 == 0) {
    throw Error(ErrorCode::EvenKernelDimension, "upsample_kernel: target must be odd");
  }
  if (new_size.rows < k.rows() || new_size.cols < k.cols()) {
    throw Error(ErrorCode::ShrinkNotAllowed, "upsample_kernel: target smaller than kernel");
  }
  const double sr = static_cast<double>(k.rows()) / new_size.rows;
  const double sc = static_cast<double>(k.cols()) / new_size.cols;
  const int cr_new = new_size.rows / 2;
  const int cc_new = new_size.cols / 2;
  const int cr_old = k.rows() / 2;
  const int cc_old = k.cols() / 2;
  Image out(new_size.rows, new_size.cols);
  for (int r = 0; r < new_size.rows; ++r) {
    const Tap tr = sample_position(cr_old + (r - cr_new) * sr, k.rows());
    for (int c = 0; c < new_size.cols; ++c) {
      out(r, c) = bilinear(k.taps(), tr, sample_position(cc_old + (c - cc_new) * sc, k.cols()));
    }
  }
  return project_kernel(out);
}

Kernel prune_kernel(const Kernel& k, double fraction) {
  Image taps = k.taps();
  const double cut = fraction * taps.max();
  for (double& v : taps.values()) {
    if (v < cut) v = 0.0;
  }
  return project_kernel(taps);
}

Image edge_taper(const Image& y, const Kernel& k) {
  const Image blurred = convolve_periodic(y, k);
  auto ramp = [](int n, int width) {
    std::vector<double> w(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) {
      const int d = std::min(i, n - 1 - i);
      if (d < width) {
        w[static_cast<std::size_t>(i)] =
            0.5 * (1.0 - std::cos(std::numbers::pi * (d + 0.5) / width));
      }
    }
    return w;
  };
  const auto wr = ramp(y.rows(), k.rows());
  const auto wc = ramp(y.cols(), k.cols());
  Image out(y.rows(), y.cols());
  for (int r = 0; r < y.rows(); ++r) {
    for (int c = 0; c < y.cols(); ++c) {
      const double w = wr[static_cast<std::size_t>(r)] * wc[static_cast<std::size_t>(c)];
      out(r, c) = w * y(r, c) + (1.0 - w) * blurred(r, c);
    }
  }
  return out;
}

LevelResult run_level(const Image& y_level, const Kernel& k_init, const SolverConfig& cfg,
                      int level, const TraceSink& sink) {
  SolverConfig stage_cfg = cfg;
  LevelResult result{y_level, k_init, cfg.gamma, cfg.lambda};
  TraceSink inner;
  if (sink) {
    inner = [&sink, level](const TraceRecord& rec) {
      TraceRecord tagged = rec;
      tagged.level = level;
      sink(tagged);
    };
  }
  for (int i = 0; i < cfg.outer_iters; ++i) {
    // alpha is re-derived from the decayed gamma and lambda here.
    const ValidatedConfig v = validate_config(stage_cfg);
    result.x = solve_latent(y_level, result.k, v, inner);
    result.k = solve_kernel(result.x, y_level, v, result.k, inner);
    if (sink) {
      TraceRecord rec;
      rec.solver = "level";
      rec.level = level;
      rec.stage = i;
      rec.gamma = stage_cfg.gamma;
      rec.lambda = stage_cfg.lambda;
      const Image residual = convolve_periodic(result.x, result.k) - y_level;
      rec.objective = dot(residual.values(), residual.values());
      sink(rec);
    }
    stage_cfg.gamma = std::max(stage_cfg.gamma / 1.1, 1e-4);
    stage_cfg.lambda = std::max(stage_cfg.lambda / 1.1, 1e-4);
  }
  result.gamma = stage_cfg.gamma;
  result.lambda = stage_cfg.lambda;
  return result;
}

Image restore_with_kernel(const Image& y, const Kernel& k, const SolverConfig& cfg) {
  return solve_latent(edge_taper(y, k), k, validate_config(cfg));
}

RestorationResult blind_deblur(const Image& y, const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  validate_config(cfg);
  const std::vector<PyramidLevel> levels = build_pyramid(y, cfg.kernel_size, cfg.pyramid_scale);

  RestorationResult result{y, Kernel::uniform(levels.front().kernel_size.rows,
                                              levels.front().kernel_size.cols),
                           {}, {}, 0.0};
  const TraceSink sink = [&result](const TraceRecord& rec) { result.traces.push_back(rec); };

  Kernel k = result.k_final;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const PyramidLevel& level = levels[l];
    if (l > 0) k = upsample_kernel(k, level.kernel_size);
    LevelResult lr = run_level(level.y_level, k, cfg, static_cast<int>(l), sink);
    k = cfg.prune_kernel ? prune_kernel(lr.k, cfg.prune_fraction) : lr.k;
    result.levels.push_back({static_cast<int>(l), std::move(lr.x), k});
  }
  result.k_final = k;
  result.x_final = restore_with_kernel(y, k, cfg);
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace deblur
