#pragma once

#include <array>
#include <complex>
#include <vector>

#include "deblur/core.hpp"

namespace deblur {

using Complex = std::complex<double>;

/// DFT of a 2-D field. Forward transforms are unnormalized; the inverse
/// carries the 1/N factor.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(int rows, int cols, Complex fill = {});

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  Size2 shape() const noexcept { return {rows_, cols_}; }
  std::size_t size() const noexcept { return data_.size(); }

  Complex& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  Complex operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  std::span<Complex> values() noexcept { return data_; }
  std::span<const Complex> values() const noexcept { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Complex> data_;
};

Spectrum dft2(const Image& field);
Spectrum dft2(const Spectrum& field);
/// Inverse DFT returning the real part.
Image idft2(const Spectrum& spectrum);
/// Inverse DFT keeping the complex result.
Spectrum idft2_complex(const Spectrum& spectrum);

/// Horizontal (dx) and vertical (dy) periodic forward differences.
struct GradientField {
  Image dx;
  Image dy;

  Size2 shape() const noexcept { return dx.shape(); }
};

GradientField gradient(const Image& img);
/// Negative adjoint of gradient(): <grad x, g> = -<x, div g>.
Image divergence(const GradientField& g);

/// Single-level undecimated tensor framelet coefficients. Band (i, j) is the
/// periodic correlation of the image with h_i (vertical) times h_j (horizontal).
struct FrameletCoeffs {
  static constexpr int kBands = 9;
  std::array<Image, kBands> bands;

  Image& band(int i, int j) { return bands[static_cast<std::size_t>(3 * i + j)]; }
  const Image& band(int i, int j) const { return bands[static_cast<std::size_t>(3 * i + j)]; }
  Size2 shape() const noexcept { return bands[0].shape(); }

  /// Concatenation of all bands, band-major.
  std::vector<double> flatten() const;
  static FrameletCoeffs unflatten(std::span<const double> flat, Size2 shape);
};

/// 1-D piecewise-linear framelet filters h0, h1, h2 over taps {-1, 0, +1}.
const std::array<std::array<double, 3>, 3>& framelet_filters();

FrameletCoeffs framelet_analysis(const Image& img);
/// Adjoint of framelet_analysis(); also its inverse since W^T W = I.
Image framelet_synthesis(const FrameletCoeffs& coeffs);

/// DFT symbol of the analysis filter for band (i, j) on a rows x cols grid.
Spectrum framelet_symbol(int i, int j, Size2 shape);

/// Embeds an odd-sized kernel into a zero field of the target size with the
/// center tap moved to index (0, 0).
Image pad_center_kernel(const Kernel& k, Size2 target);
Image pad_center_kernel(const Image& taps, Size2 target);
/// Inverse of pad_center_kernel: extracts an odd-sized window around (0, 0).
Image crop_center_kernel(const Image& field, Size2 kernel_size);

/// Periodic convolution x * k with a centered kernel, via the DFT.
Image convolve_periodic(const Image& x, const Kernel& k);
Image convolve_periodic(const Image& x, const Image& centered_taps);

/// Symbols of the two difference operators and of their normal operator.
struct GradientSymbols {
  explicit GradientSymbols(Size2 shape);

  Spectrum horizontal;
  Spectrum vertical;
  std::vector<double> laplacian;  // |F(dh)|^2 + |F(dv)|^2
};

/// Frequency-domain data for a fixed image size and kernel.
class FreqCache {
 public:
  FreqCache(const Kernel& k, Size2 shape);

  Size2 shape() const noexcept { return gradients_.horizontal.shape(); }
  const Kernel& kernel() const noexcept { return kernel_; }
  const Spectrum& kernel_spectrum() const noexcept { return kernel_spectrum_; }
  const GradientSymbols& gradients() const noexcept { return gradients_; }

 private:
  Kernel kernel_;
  Spectrum kernel_spectrum_;
  GradientSymbols gradients_;
};

}  // namespace deblur
