#include "deblur/transforms.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace deblur {

Spectrum::Spectrum(int rows, int cols, Complex fill)
    : rows_(rows), cols_(cols),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {}

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per (rows, cols, direction) and kept for the process
// lifetime.
class PlanRegistry {
 public:
  static PlanRegistry& instance() {
    static PlanRegistry registry;
    return registry;
  }

  fftw_plan get(int rows, int cols, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(rows, cols, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<Complex> in(static_cast<std::size_t>(rows) * cols);
    std::vector<Complex> out(in.size());
    fftw_plan plan = fftw_plan_dft_2d(rows, cols, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanRegistry(const PlanRegistry&) = delete;
  PlanRegistry& operator=(const PlanRegistry&) = delete;

 private:
  PlanRegistry() = default;
  ~PlanRegistry() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const Spectrum& in, Spectrum& out, int sign) {
  fftw_plan plan = PlanRegistry::instance().get(in.rows(), in.cols(), sign);
  // FFTW does not modify the input of an out-of-place c2c transform.
  auto* src = const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.values().data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.values().data()));
}

}  // namespace

Spectrum dft2(const Spectrum& field) {
  Spectrum out(field.rows(), field.cols());
  if (field.size() == 0) return out;
  execute(field, out, FFTW_FORWARD);
  return out;
}

Spectrum dft2(const Image& field) {
  Spectrum in(field.rows(), field.cols());
  auto src = field.values();
  auto dst = in.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
  return dft2(in);
}

Spectrum idft2_complex(const Spectrum& spectrum) {
  Spectrum out(spectrum.rows(), spectrum.cols());
  if (spectrum.size() == 0) return out;
  execute(spectrum, out, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(spectrum.size());
  for (Complex& v : out.values()) v *= scale;
  return out;
}

Image idft2(const Spectrum& spectrum) {
  const Spectrum full = idft2_complex(spectrum);
  Image out(spectrum.rows(), spectrum.cols());
  auto src = full.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i].real();
  return out;
}

GradientField gradient(const Image& img) {
  const int rows = img.rows();
  const int cols = img.cols();
  GradientField g{Image(rows, cols), Image(rows, cols)};
  for (int r = 0; r < rows; ++r) {
    const int rn = (r + 1 == rows) ? 0 : r + 1;
    for (int c = 0; c < cols; ++c) {
      const int cn = (c + 1 == cols) ? 0 : c + 1;
      g.dx(r, c) = img(r, cn) - img(r, c);
      g.dy(r, c) = img(rn, c) - img(r, c);
    }
  }
  return g;
}

Image divergence(const GradientField& g) {
  require_same_shape(g.dx, g.dy, "divergence");
  const int rows = g.dx.rows();
  const int cols = g.dx.cols();
  Image out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const int rp = (r == 0) ? rows - 1 : r - 1;
    for (int c = 0; c < cols; ++c) {
      const int cp = (c == 0) ? cols - 1 : c - 1;
      out(r, c) = (g.dx(r, c) - g.dx(r, cp)) + (g.dy(r, c) - g.dy(rp, c));
    }
  }
  return out;
}

std::vector<double> FrameletCoeffs::flatten() const {
  std::vector<double> flat;
  flat.reserve(bands[0].size() * kBands);
  for (const Image& b : bands) flat.insert(flat.end(), b.values().begin(), b.values().end());
  return flat;
}

FrameletCoeffs FrameletCoeffs::unflatten(std::span<const double> flat, Size2 shape) {
  const std::size_t n = static_cast<std::size_t>(shape.rows) * shape.cols;
  if (flat.size() != n * kBands) {
    throw Error(ErrorCode::ShapeMismatch, "framelet coefficient count does not match shape");
  }
  FrameletCoeffs out;
  for (int b = 0; b < kBands; ++b) {
    auto part = flat.subspan(static_cast<std::size_t>(b) * n, n);
    out.bands[static_cast<std::size_t>(b)] =
        Image(shape.rows, shape.cols, std::vector<double>(part.begin(), part.end()));
  }
  return out;
}

const std::array<std::array<double, 3>, 3>& framelet_filters() {
  static const std::array<std::array<double, 3>, 3> filters = [] {
    const double s = std::sqrt(2.0) / 4.0;
    return std::array<std::array<double, 3>, 3>{{
        {0.25, 0.5, 0.25},
        {s, 0.0, -s},
        {-0.25, 0.5, -0.25},
    }};
  }();
  return filters;
}

namespace {

// out(r, c) = sum_t h[t+1] * in(r, c + t)   (periodic)
Image correlate_rows(const Image& in, const std::array<double, 3>& h) {
  const int rows = in.rows();
  const int cols = in.cols();
  Image out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int cm = (c == 0) ? cols - 1 : c - 1;
      const int cp = (c + 1 == cols) ? 0 : c + 1;
      out(r, c) = h[0] * in(r, cm) + h[1] * in(r, c) + h[2] * in(r, cp);
    }
  }
  return out;
}

// out(r, c) = sum_t h[t+1] * in(r + t, c)
Image correlate_cols(const Image& in, const std::array<double, 3>& h) {
  const int rows = in.rows();
  const int cols = in.cols();
  Image out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const int rm = (r == 0) ? rows - 1 : r - 1;
    const int rp = (r + 1 == rows) ? 0 : r + 1;
    for (int c = 0; c < cols; ++c) {
      out(r, c) = h[0] * in(rm, c) + h[1] * in(r, c) + h[2] * in(rp, c);
    }
  }
  return out;
}

// Adjoints of the two correlations: out(r, c) = sum_t h[t+1] * in(r, c - t).
Image convolve_rows(const Image& in, const std::array<double, 3>& h) {
  return correlate_rows(in, {h[2], h[1], h[0]});
}

Image convolve_cols(const Image& in, const std::array<double, 3>& h) {
  return correlate_cols(in, {h[2], h[1], h[0]});
}

}  // namespace

FrameletCoeffs framelet_analysis(const Image& img) {
  const auto& h = framelet_filters();
  FrameletCoeffs out;
  for (int j = 0; j < 3; ++j) {
    const Image horizontal = correlate_rows(img, h[static_cast<std::size_t>(j)]);
    for (int i = 0; i < 3; ++i) {
      out.band(i, j) = correlate_cols(horizontal, h[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

Image framelet_synthesis(const FrameletCoeffs& coeffs) {
  const auto& h = framelet_filters();
  const Size2 shape = coeffs.shape();
  Image out(shape.rows, shape.cols);
  for (int j = 0; j < 3; ++j) {
    Image vertical(shape.rows, shape.cols);
    for (int i = 0; i < 3; ++i) {
      vertical += convolve_cols(coeffs.band(i, j), h[static_cast<std::size_t>(i)]);
    }
    out += convolve_rows(vertical, h[static_cast<std::size_t>(j)]);
  }
  return out;
}

Spectrum framelet_symbol(int i, int j, Size2 shape) {
  // Analysis is a correlation, so its multiplier is the conjugate of the
  // filter's DFT: conj(sum_{a,b} f(a,b) exp(-i w.(a,b))).
  const auto& h = framelet_filters();
  Image taps(shape.rows, shape.cols);
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      const int r = ((a % shape.rows) + shape.rows) % shape.rows;
      const int c = ((b % shape.cols) + shape.cols) % shape.cols;
      taps(r, c) += h[static_cast<std::size_t>(i)][static_cast<std::size_t>(a + 1)] *
                    h[static_cast<std::size_t>(j)][static_cast<std::size_t>(b + 1)];
    }
  }
  Spectrum s = dft2(taps);
  for (Complex& v : s.values()) v = std::conj(v);
  return s;
}

Image pad_center_kernel(const Image& taps, Size2 target) {
  if (taps.rows() % 2 == 0 || taps.cols() % 2 == 0) {
    throw Error(ErrorCode::EvenKernelDimension, "pad_center_kernel needs odd kernel dimensions");
  }
  if (taps.rows() > target.rows || taps.cols() > target.cols) {
    std::ostringstream os;
    os << "kernel " << taps.rows() << "x" << taps.cols() << " exceeds target " << target.rows
       << "x" << target.cols;
    throw Error(ErrorCode::KernelLargerThanImage, os.str());
  }
  Image field(target.rows, target.cols);
  const int cr = taps.rows() / 2;
  const int cc = taps.cols() / 2;
  for (int r = 0; r < taps.rows(); ++r) {
    const int fr = ((r - cr) % target.rows + target.rows) % target.rows;
    for (int c = 0; c < taps.cols(); ++c) {
      const int fc = ((c - cc) % target.cols + target.cols) % target.cols;
      field(fr, fc) += taps(r, c);
    }
  }
  return field;
}

Image pad_center_kernel(const Kernel& k, Size2 target) { return pad_center_kernel(k.taps(), target); }

Image crop_center_kernel(const Image& field, Size2 kernel_size) {
  if (kernel_size.rows % 2 == 0 || kernel_size.cols % 2 == 0) {
    throw Error(ErrorCode::EvenKernelDimension, "crop_center_kernel needs odd kernel dimensions");
  }
  if (kernel_size.rows > field.rows() || kernel_size.cols > field.cols()) {
    throw Error(ErrorCode::KernelLargerThanImage, "crop window exceeds field");
  }
  Image taps(kernel_size.rows, kernel_size.cols);
  const int cr = kernel_size.rows / 2;
  const int cc = kernel_size.cols / 2;
  for (int r = 0; r < kernel_size.rows; ++r) {
    for (int c = 0; c < kernel_size.cols; ++c) taps(r, c) = field.wrapped(r - cr, c - cc);
  }
  return taps;
}

Image convolve_periodic(const Image& x, const Image& centered_taps) {
  const Spectrum kx = dft2(pad_center_kernel(centered_taps, x.shape()));
  Spectrum sx = dft2(x);
  auto a = sx.values();
  auto b = kx.values();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return idft2(sx);
}

Image convolve_periodic(const Image& x, const Kernel& k) { return convolve_periodic(x, k.taps()); }

GradientSymbols::GradientSymbols(Size2 shape) {
  // Forward difference as a convolution: -1 at the origin, +1 one step back.
  Image h(shape.rows, shape.cols);
  h(0, 0) -= 1.0;
  h(0, shape.cols - 1) += 1.0;
  Image v(shape.rows, shape.cols);
  v(0, 0) -= 1.0;
  v(shape.rows - 1, 0) += 1.0;
  horizontal = dft2(h);
  vertical = dft2(v);
  laplacian.resize(horizontal.size());
  for (std::size_t i = 0; i < laplacian.size(); ++i) {
    laplacian[i] = std::norm(horizontal.values()[i]) + std::norm(vertical.values()[i]);
  }
}

FreqCache::FreqCache(const Kernel& k, Size2 shape)
    : kernel_(k), kernel_spectrum_(dft2(pad_center_kernel(k, shape))), gradients_(shape) {}

}  // namespace deblur
