#include "deblur/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace deblur {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::AlphaNonPositive: return "AlphaNonPositive";
    case ErrorCode::EvenKernelDimension: return "EvenKernelDimension";
    case ErrorCode::DegenerateKernel: return "DegenerateKernel";
    case ErrorCode::KernelLargerThanImage: return "KernelLargerThanImage";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NegativeThreshold: return "NegativeThreshold";
    case ErrorCode::AlphaNotPositive: return "AlphaNotPositive";
    case ErrorCode::StepSizeOutOfRange: return "StepSizeOutOfRange";
    case ErrorCode::PreconditionAlphaTooLarge: return "PreconditionAlphaTooLarge";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::ShrinkNotAllowed: return "ShrinkNotAllowed";
    case ErrorCode::InvalidPyramid: return "InvalidPyramid";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

Image::Image(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) {
    throw Error(ErrorCode::ShapeMismatch, "negative image dimensions");
  }
  data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
}

Image::Image(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 0 || cols < 0 ||
      data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw Error(ErrorCode::ShapeMismatch, "data size does not match dimensions");
  }
}

double Image::wrapped(int r, int c) const {
  r %= rows_;
  c %= cols_;
  if (r < 0) r += rows_;
  if (c < 0) c += cols_;
  return data_[index(r, c)];
}

bool Image::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Image::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

double Image::min() const {
  return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

double Image::max() const {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

Image& Image::operator+=(const Image& rhs) {
  require_same_shape(*this, rhs, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

Image& Image::operator-=(const Image& rhs) {
  require_same_shape(*this, rhs, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

Image& Image::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Image operator+(Image lhs, const Image& rhs) { return lhs += rhs; }
Image operator-(Image lhs, const Image& rhs) { return lhs -= rhs; }
Image operator*(Image lhs, double s) { return lhs *= s; }
Image operator*(double s, Image rhs) { return rhs *= s; }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Image& a, const Image& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::abs(av[i] - bv[i]));
  return m;
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    std::ostringstream os;
    os << what << ": " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
    throw Error(ErrorCode::ShapeMismatch, os.str());
  }
}

Image clamp_unit(Image img) {
  for (double& v : img.values()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

namespace {

void require_odd(int rows, int cols) {
  if (rows < 1 || cols < 1 || rows % 2 == 0 || cols % 2 == 0) {
    std::ostringstream os;
    os << "kernel dimensions must be odd and positive, got " << rows << "x" << cols;
    throw Error(ErrorCode::EvenKernelDimension, os.str());
  }
}

}  // namespace

Kernel Kernel::delta(int rows, int cols) {
  require_odd(rows, cols);
  Image taps(rows, cols, 0.0);
  taps(rows / 2, cols / 2) = 1.0;
  return Kernel(std::move(taps));
}

Kernel Kernel::uniform(int rows, int cols) {
  require_odd(rows, cols);
  return Kernel(Image(rows, cols, 1.0 / (static_cast<double>(rows) * cols)));
}

Kernel project_kernel(const Image& raw) {
  require_odd(raw.rows(), raw.cols());
  if (!raw.all_finite()) throw Error(ErrorCode::DegenerateKernel, "kernel has non-finite taps");

  const auto in = raw.values();
  const bool nonnegative = std::all_of(in.begin(), in.end(), [](double v) { return v >= 0.0; });
  // Already feasible grids pass through untouched, which makes the projection
  // exactly idempotent.
  if (nonnegative && std::abs(raw.sum() - 1.0) <= 1e-12) return Kernel(raw);

  Image taps = raw;
  double total = 0.0;
  for (double& v : taps.values()) {
    v = std::max(v, 0.0);
    total += v;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::DegenerateKernel, "no positive taps after clipping");
  }
  for (double& v : taps.values()) v /= total;
  return Kernel(std::move(taps));
}

ValidatedConfig validate_config(const SolverConfig& cfg) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NonPositiveParameter, std::string(name) + " must be positive");
    }
  };
  positive(cfg.gamma, "gamma");
  positive(cfg.lambda, "lambda");
  positive(cfg.sigma, "sigma");
  positive(cfg.nu, "nu");
  positive(cfg.eta, "eta");
  positive(cfg.mu_max, "mu_max");
  positive(cfg.beta_max, "beta_max");
  positive(cfg.xi_max, "xi_max");
  positive(cfg.epsilon, "epsilon");
  positive(cfg.weight_epsilon, "weight_epsilon");
  positive(cfg.fbs_tol, "fbs_tol");
  if (!(cfg.kappa > 1.0) || !std::isfinite(cfg.kappa)) {
    throw Error(ErrorCode::NonPositiveParameter, "kappa must exceed 1");
  }
  if (cfg.outer_iters < 1) throw Error(ErrorCode::NonPositiveParameter, "outer_iters must be >= 1");
  if (cfg.fbs_max_iters < 1) {
    throw Error(ErrorCode::NonPositiveParameter, "fbs_max_iters must be >= 1");
  }
  if (!(cfg.pyramid_scale > 0.0 && cfg.pyramid_scale < 1.0)) {
    throw Error(ErrorCode::NonPositiveParameter, "pyramid_scale must lie in (0, 1)");
  }
  if (cfg.prune_fraction < 0.0 || cfg.prune_fraction >= 1.0) {
    throw Error(ErrorCode::NonPositiveParameter, "prune_fraction must lie in [0, 1)");
  }
  require_odd(cfg.kernel_size.rows, cfg.kernel_size.cols);

  const double alpha = 2.0 * cfg.gamma / (cfg.lambda * cfg.sigma) - cfg.epsilon;
  if (!(alpha > 0.0)) {
    std::ostringstream os;
    os << "2*gamma/(lambda*sigma) = " << 2.0 * cfg.gamma / (cfg.lambda * cfg.sigma)
       << " does not exceed epsilon = " << cfg.epsilon;
    throw Error(ErrorCode::AlphaNonPositive, os.str());
  }
  return ValidatedConfig(cfg, alpha);
}

}  // namespace deblur
