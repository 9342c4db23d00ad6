#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace deblur {

enum class ErrorCode {
  NonPositiveParameter,
  AlphaNonPositive,
  EvenKernelDimension,
  DegenerateKernel,
  KernelLargerThanImage,
  ShapeMismatch,
  NegativeThreshold,
  AlphaNotPositive,
  StepSizeOutOfRange,
  PreconditionAlphaTooLarge,
  ImageTooSmall,
  ShrinkNotAllowed,
  InvalidPyramid,
  Io,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Size2 {
  int rows = 0;
  int cols = 0;
  friend bool operator==(const Size2&, const Size2&) = default;
};

/// Dense row-major 2-D scalar field. Used for images, kernel workspaces and
/// every intermediate field of the solvers.
class Image {
 public:
  Image() = default;
  Image(int rows, int cols, double fill = 0.0);
  Image(int rows, int cols, std::vector<double> data);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  Size2 shape() const noexcept { return {rows_, cols_}; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int r, int c) { return data_[index(r, c)]; }
  double operator()(int r, int c) const { return data_[index(r, c)]; }

  // Periodic access: indices are wrapped into range.
  double wrapped(int r, int c) const;

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool all_finite() const;
  double sum() const;
  double min() const;
  double max() const;

  Image& operator+=(const Image& rhs);
  Image& operator-=(const Image& rhs);
  Image& operator*=(double s);

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Image operator+(Image lhs, const Image& rhs);
Image operator-(Image lhs, const Image& rhs);
Image operator*(Image lhs, double s);
Image operator*(double s, Image rhs);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
double max_abs_diff(const Image& a, const Image& b);

void require_same_shape(const Image& a, const Image& b, const char* what);

/// Clamps into [0,1]. Only applied at I/O boundaries.
Image clamp_unit(Image img);

/// A point spread function: odd dimensions, nonnegative taps summing to 1.
/// Instances can only be obtained through project_kernel() or the factories,
/// so every Kernel in circulation is feasible.
class Kernel {
 public:
  static Kernel delta(int rows, int cols);
  static Kernel uniform(int rows, int cols);

  int rows() const noexcept { return taps_.rows(); }
  int cols() const noexcept { return taps_.cols(); }
  Size2 shape() const noexcept { return taps_.shape(); }
  double operator()(int r, int c) const { return taps_(r, c); }
  const Image& taps() const noexcept { return taps_; }

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  explicit Kernel(Image taps) : taps_(std::move(taps)) {}
  friend Kernel project_kernel(const Image& raw);

  Image taps_;
};

/// Clips negative taps to zero and renormalizes to unit sum.
/// Throws DegenerateKernel when nothing positive survives the clipping and
/// EvenKernelDimension when either side is even.
Kernel project_kernel(const Image& raw);

/// Scalar parameters of the hybrid MCP / reweighted-l1 model and of the
/// continuation schedules.
struct SolverConfig {
  double gamma = 1e-1;           // ridge weight on x
  double lambda = 4e-3;          // prior weight
  double sigma = 1.0;            // framelet-MCP vs gradient balance
  double nu = 1e-2;              // kernel ridge weight
  double eta = 1e-3;             // kernel gradient sparsity weight
  double kappa = 2.0;            // continuation rate
  double mu_max = 1e5;
  double beta_max = 1e5;
  double xi_max = 1.0;
  double epsilon = 1e-6;         // alpha relaxation and FBS step margin
  double weight_epsilon = 1e-4;  // reweighting denominators
  Size2 kernel_size{7, 7};
  int outer_iters = 5;
  double pyramid_scale = 0.70710678118654752;
  int fbs_max_iters = 50;
  double fbs_tol = 1e-6;
  bool prune_kernel = true;
  double prune_fraction = 0.05;
};

/// A SolverConfig that passed validate_config(), with the derived envelope
/// scale alpha = 2*gamma/(lambda*sigma) - epsilon attached.
class ValidatedConfig {
 public:
  const SolverConfig& params() const noexcept { return params_; }
  double alpha() const noexcept { return alpha_; }

 private:
  ValidatedConfig(SolverConfig params, double alpha)
      : params_(std::move(params)), alpha_(alpha) {}
  friend ValidatedConfig validate_config(const SolverConfig& cfg);

  SolverConfig params_;
  double alpha_;
};

ValidatedConfig validate_config(const SolverConfig& cfg);

}  // namespace deblur
