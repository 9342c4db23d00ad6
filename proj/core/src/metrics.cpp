#include "deblur/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace deblur {

double psnr(const Image& a, const Image& b) {
  require_same_shape(a, b, "psnr");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(a.size());
  if (mse == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(1.0 / mse);
}

namespace {

constexpr int kWindow = 11;

const std::array<double, kWindow>& gaussian_window() {
  static const std::array<double, kWindow> w = [] {
    std::array<double, kWindow> g{};
    double total = 0.0;
    for (int i = 0; i < kWindow; ++i) {
      const double d = i - kWindow / 2;
      g[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
      total += g[static_cast<std::size_t>(i)];
    }
    for (double& v : g) v /= total;
    return g;
  }();
  return w;
}

// "valid" separable filtering: output is (rows-10) x (cols-10).
Image filter_valid(const Image& img) {
  const auto& w = gaussian_window();
  const int orows = img.rows() - kWindow + 1;
  const int ocols = img.cols() - kWindow + 1;
  Image tmp(img.rows(), ocols);
  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 0; c < ocols; ++c) {
      double acc = 0.0;
      for (int t = 0; t < kWindow; ++t) acc += w[static_cast<std::size_t>(t)] * img(r, c + t);
      tmp(r, c) = acc;
    }
  }
  Image out(orows, ocols);
  for (int r = 0; r < orows; ++r) {
    for (int c = 0; c < ocols; ++c) {
      double acc = 0.0;
      for (int t = 0; t < kWindow; ++t) acc += w[static_cast<std::size_t>(t)] * tmp(r + t, c);
      out(r, c) = acc;
    }
  }
  return out;
}

Image product(const Image& a, const Image& b) {
  Image out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] *= b.values()[i];
  return out;
}

}  // namespace

double ssim(const Image& a, const Image& b) {
  require_same_shape(a, b, "ssim");
  if (a.rows() < kWindow || a.cols() < kWindow) {
    throw Error(ErrorCode::ImageTooSmall, "ssim needs both sides >= 11");
  }
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  const Image mu_a = filter_valid(a);
  const Image mu_b = filter_valid(b);
  const Image aa = filter_valid(product(a, a));
  const Image bb = filter_valid(product(b, b));
  const Image ab = filter_valid(product(a, b));
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a.values()[i];
    const double mb = mu_b.values()[i];
    const double va = aa.values()[i] - ma * ma;
    const double vb = bb.values()[i] - mb * mb;
    const double cov = ab.values()[i] - ma * mb;
    total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
             ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return total / static_cast<double>(mu_a.size());
}

Image shift_periodic(const Image& img, Shift s) {
  Image out(img.rows(), img.cols());
  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 0; c < img.cols(); ++c) out(r, c) = img.wrapped(r - s.dy, c - s.dx);
  }
  return out;
}

Image crop_border(const Image& img, int border) {
  if (border == 0) return img;
  const int rows = img.rows() - 2 * border;
  const int cols = img.cols() - 2 * border;
  if (rows < 1 || cols < 1) throw Error(ErrorCode::ImageTooSmall, "crop border exceeds image");
  Image out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) out(r, c) = img(r + border, c + border);
  }
  return out;
}

ScoreReport shift_aligned_score(const Image& restored, const Image& reference, int max_shift,
                                Metric metric, int border) {
  require_same_shape(restored, reference, "shift_aligned_score");
  if (max_shift < 0) throw Error(ErrorCode::NonPositiveParameter, "max_shift must be >= 0");
  if (border < 0) border = max_shift;
  const Image target = crop_border(restored, border);
  auto evaluate = [&](const Image& candidate) {
    return metric == Metric::Psnr ? psnr(target, candidate) : ssim(target, candidate);
  };

  Shift best{-max_shift, -max_shift};
  double best_value = -std::numeric_limits<double>::infinity();
  bool first = true;
  // Scan order (dx, then dy) ascending; strict improvement keeps the
  // lexicographically smallest shift on ties.
  for (int dx = -max_shift; dx <= max_shift; ++dx) {
    for (int dy = -max_shift; dy <= max_shift; ++dy) {
      const double value = evaluate(crop_border(shift_periodic(reference, {dx, dy}), border));
      if (first || value > best_value) {
        best_value = value;
        best = {dx, dy};
        first = false;
      }
    }
  }

  const Image aligned = crop_border(shift_periodic(reference, best), border);
  ScoreReport report;
  report.best_shift = best;
  report.psnr = psnr(target, aligned);
  report.ssim = (target.rows() >= kWindow && target.cols() >= kWindow)
                    ? ssim(target, aligned)
                    : std::numeric_limits<double>::quiet_NaN();
  return report;
}

namespace {

std::string format_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string format_scores_csv(const std::vector<ScoreRow>& rows) {
  std::ostringstream os;
  os << "image,kernel,PSNR,SSIM,best_shift\n";
  for (const ScoreRow& row : rows) {
    os << row.image << ',' << row.kernel << ',' << format_value(row.score.psnr) << ','
       << format_value(row.score.ssim) << ',' << row.score.best_shift.dx << ' '
       << row.score.best_shift.dy << '\n';
  }
  return os.str();
}

std::string format_scores_table(const std::vector<ScoreRow>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %-16s %10s %8s %10s\n", "image", "kernel", "PSNR",
                "SSIM", "shift");
  os << line;
  for (const ScoreRow& row : rows) {
    const std::string shift =
        std::to_string(row.score.best_shift.dx) + "," + std::to_string(row.score.best_shift.dy);
    std::snprintf(line, sizeof line, "%-24s %-16s %10s %8s %10s\n", row.image.c_str(),
                  row.kernel.c_str(), format_value(row.score.psnr).c_str(),
                  format_value(row.score.ssim).c_str(), shift.c_str());
    os << line;
  }
  return os.str();
}

}  // namespace deblur
