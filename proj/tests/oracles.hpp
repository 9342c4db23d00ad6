#pragma once

// Direct spatial-domain operators used as references for the FFT solvers.
// Everything here is O(N * support) or O(N^2) and meant for small grids.

#include <cmath>

#include "deblur/core.hpp"
#include "deblur/transforms.hpp"

namespace deblur::testing {

/// (x * k)(r, c) = sum_{a,b} k(a + cr, b + cc) x(r - a, c - b), periodic.
inline Image direct_convolve(const Image& x, const Kernel& k) {
  const int cr = k.rows() / 2;
  const int cc = k.cols() / 2;
  Image out(x.rows(), x.cols());
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) {
      double acc = 0.0;
      for (int a = -cr; a <= cr; ++a) {
        for (int b = -cc; b <= cc; ++b) acc += k(a + cr, b + cc) * x.wrapped(r - a, c - b);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

/// Adjoint of direct_convolve.
inline Image direct_convolve_adjoint(const Image& z, const Kernel& k) {
  const int cr = k.rows() / 2;
  const int cc = k.cols() / 2;
  Image out(z.rows(), z.cols());
  for (int r = 0; r < z.rows(); ++r) {
    for (int c = 0; c < z.cols(); ++c) {
      double acc = 0.0;
      for (int a = -cr; a <= cr; ++a) {
        for (int b = -cc; b <= cc; ++b) acc += k(a + cr, b + cc) * z.wrapped(r + a, c + b);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

/// Circular convolution of two image-sized fields, the second one indexed
/// with its origin at (0, 0).
inline Image direct_circular(const Image& a, const Image& k) {
  Image out(a.rows(), a.cols());
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) {
      double acc = 0.0;
      for (int p = 0; p < k.rows(); ++p) {
        for (int q = 0; q < k.cols(); ++q) acc += k(p, q) * a.wrapped(r - p, c - q);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

/// Adjoint of k -> direct_circular(a, k).
inline Image direct_circular_adjoint(const Image& a, const Image& z) {
  Image out(a.rows(), a.cols());
  for (int p = 0; p < a.rows(); ++p) {
    for (int q = 0; q < a.cols(); ++q) {
      double acc = 0.0;
      for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) acc += a.wrapped(r - p, c - q) * z(r, c);
      }
      out(p, q) = acc;
    }
  }
  return out;
}

inline GradientField direct_gradient(const Image& x) {
  GradientField g{Image(x.rows(), x.cols()), Image(x.rows(), x.cols())};
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) {
      g.dx(r, c) = x.wrapped(r, c + 1) - x(r, c);
      g.dy(r, c) = x.wrapped(r + 1, c) - x(r, c);
    }
  }
  return g;
}

/// Adjoint of direct_gradient (so minus the divergence).
inline Image direct_gradient_adjoint(const GradientField& p) {
  Image out(p.dx.rows(), p.dx.cols());
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) {
      out(r, c) = p.dx.wrapped(r, c - 1) - p.dx(r, c) + p.dy.wrapped(r - 1, c) - p.dy(r, c);
    }
  }
  return out;
}

inline FrameletCoeffs direct_analysis(const Image& x) {
  const auto& h = framelet_filters();
  FrameletCoeffs out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Image band(x.rows(), x.cols());
      for (int r = 0; r < x.rows(); ++r) {
        for (int c = 0; c < x.cols(); ++c) {
          double acc = 0.0;
          for (int a = -1; a <= 1; ++a) {
            for (int b = -1; b <= 1; ++b) acc += h[i][a + 1] * h[j][b + 1] * x.wrapped(r + a, c + b);
          }
          band(r, c) = acc;
        }
      }
      out.band(i, j) = band;
    }
  }
  return out;
}

inline Image direct_synthesis(const FrameletCoeffs& u) {
  const auto& h = framelet_filters();
  const Size2 s = u.shape();
  Image out(s.rows, s.cols);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Image& band = u.band(i, j);
      for (int r = 0; r < s.rows; ++r) {
        for (int c = 0; c < s.cols; ++c) {
          double acc = 0.0;
          for (int a = -1; a <= 1; ++a) {
            for (int b = -1; b <= 1; ++b) acc += h[i][a + 1] * h[j][b + 1] * band.wrapped(r - a, c - b);
          }
          out(r, c) += acc;
        }
      }
    }
  }
  return out;
}

/// Gradient (up to the factor 2) of
///   ||Kx - y||^2 + gamma||x||^2 + mu||grad x - g||^2 + beta||Wx - u||^2.
inline Image x_stationarity(const Image& x, const Image& y, const Kernel& k, const GradientField& g,
                            const FrameletCoeffs& u, double gamma, double mu, double beta) {
  Image res = direct_convolve_adjoint(direct_convolve(x, k) - y, k);
  res += gamma * x;
  const GradientField gx = direct_gradient(x);
  res += mu * direct_gradient_adjoint({gx.dx - g.dx, gx.dy - g.dy});
  FrameletCoeffs diff = direct_analysis(x);
  for (int b = 0; b < FrameletCoeffs::kBands; ++b) {
    diff.bands[static_cast<std::size_t>(b)] -= u.bands[static_cast<std::size_t>(b)];
  }
  res += beta * direct_synthesis(diff);
  return res;
}

/// Gradient (up to the factor 2) of
///   sum_c ||d_c x (*) k - d_c y||^2 + nu||k||^2 + xi||grad k - q||^2
/// for an image-sized, origin-indexed field k.
inline Image k_stationarity(const Image& k, const GradientField& gx, const GradientField& gy,
                            const GradientField& q, double nu, double xi) {
  Image res = direct_circular_adjoint(gx.dx, direct_circular(gx.dx, k) - gy.dx);
  res += direct_circular_adjoint(gx.dy, direct_circular(gx.dy, k) - gy.dy);
  res += nu * k;
  const GradientField gk = direct_gradient(k);
  res += xi * direct_gradient_adjoint({gk.dx - q.dx, gk.dy - q.dy});
  return res;
}

}  // namespace deblur::testing
