#include "deblur/cli/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace deblur::cli {

namespace fs = std::filesystem;

Image Raster::luminance() const {
  if (!color()) return channels.front();
  Image y(shape().rows, shape().cols);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y.values()[i] = 0.299 * channels[0].values()[i] + 0.587 * channels[1].values()[i] +
                    0.114 * channels[2].values()[i];
  }
  return y;
}

namespace {

[[noreturn]] void io_error(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::Io, path.string() + ": " + what);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Raster read_png(const fs::path& path, const std::string& bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    io_error(path, image.message);
  }
  // 16-bit files are read as linear 16-bit, 8-bit files as 8-bit, so no
  // gamma conversion is applied in either case.
  const bool sixteen = (image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = (sixteen ? PNG_FORMAT_FLAG_LINEAR : 0u) | (color ? PNG_FORMAT_FLAG_COLOR : 0u);
  const int nch = color ? 3 : 1;
  const std::size_t count = static_cast<std::size_t>(image.width) * image.height * nch;
  std::vector<std::uint16_t> wide;
  std::vector<std::uint8_t> narrow;
  void* buffer = nullptr;
  if (sixteen) {
    wide.resize(count);
    buffer = wide.data();
  } else {
    narrow.resize(count);
    buffer = narrow.data();
  }
  if (!png_image_finish_read(&image, nullptr, buffer, 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    io_error(path, msg);
  }
  const int rows = static_cast<int>(image.height);
  const int cols = static_cast<int>(image.width);
  Raster raster;
  raster.channels.assign(static_cast<std::size_t>(nch), Image(rows, cols));
  for (std::size_t i = 0; i < count; ++i) {
    const double v = sixteen ? wide[i] / 65535.0 : narrow[i] / 255.0;
    raster.channels[i % nch].values()[i / nch] = v;
  }
  return raster;
}

Raster read_pgm(const fs::path& path, const std::string& bytes) {
  std::size_t pos = 2;
  auto next_token = [&]() -> long {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos) io_error(path, "malformed PGM header");
    return std::stol(bytes.substr(start, pos - start));
  };
  const bool binary = bytes[1] == '5';
  const long cols = next_token();
  const long rows = next_token();
  const long maxval = next_token();
  if (cols < 1 || rows < 1 || maxval < 1 || maxval > 65535) io_error(path, "bad PGM dimensions");
  Image img(static_cast<int>(rows), static_cast<int>(cols));
  const std::size_t n = img.size();
  if (binary) {
    ++pos;  // single whitespace after maxval
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    if (bytes.size() < pos + n * bpp) io_error(path, "truncated PGM data");
    for (std::size_t i = 0; i < n; ++i) {
      const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos + i * bpp);
      const unsigned v = bpp == 2 ? (static_cast<unsigned>(p[0]) << 8) | p[1] : p[0];
      img.values()[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      img.values()[i] = static_cast<double>(next_token()) / static_cast<double>(maxval);
    }
  }
  Raster raster;
  raster.channels.push_back(std::move(img));
  return raster;
}

void write_png(const fs::path& path, png_uint_32 format, int rows, int cols, const void* data) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(cols);
  image.height = static_cast<png_uint_32>(rows);
  image.format = format;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, data, 0, nullptr)) {
    io_error(path, image.message);
  }
}

}  // namespace

Raster read_image(const fs::path& path) {
  const std::string bytes = slurp(path);
  if (bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0) {
    return read_png(path, bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '2')) {
    return read_pgm(path, bytes);
  }
  io_error(path, "unsupported image format (expected PNG or PGM)");
}

void write_png16(const fs::path& path, const Raster& raster) {
  const int nch = static_cast<int>(raster.channels.size());
  if (nch != 1 && nch != 3) io_error(path, "only gray or RGB rasters can be written");
  const Size2 shape = raster.shape();
  std::vector<std::uint16_t> data(static_cast<std::size_t>(shape.rows) * shape.cols * nch);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = std::clamp(raster.channels[i % nch].values()[i / nch], 0.0, 1.0);
    data[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
  }
  write_png(path, PNG_FORMAT_FLAG_LINEAR | (nch == 3 ? PNG_FORMAT_FLAG_COLOR : 0u), shape.rows,
            shape.cols, data.data());
}

void write_png16(const fs::path& path, const Image& gray) {
  Raster r;
  r.channels.push_back(gray);
  write_png16(path, r);
}

void write_kernel_png(const fs::path& path, const Kernel& k) {
  const int factor = std::max(1, (64 + std::min(k.rows(), k.cols()) - 1) / std::min(k.rows(), k.cols()));
  const int rows = k.rows() * factor;
  const int cols = k.cols() * factor;
  const double peak = k.taps().max();
  std::vector<std::uint8_t> data(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = peak > 0.0 ? k(r / factor, c / factor) / peak : 0.0;
      data[static_cast<std::size_t>(r) * cols + c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  write_png(path, PNG_FORMAT_GRAY, rows, cols, data.data());
}

std::string format_kernel_text(const Image& taps) {
  std::ostringstream os;
  os << taps.rows() << ' ' << taps.cols() << '\n';
  char buf[40];
  for (int r = 0; r < taps.rows(); ++r) {
    for (int c = 0; c < taps.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", taps(r, c));
      os << (c ? " " : "") << buf;
    }
    os << '\n';
  }
  return os.str();
}

Image parse_kernel_text(const std::string& text) {
  std::istringstream in(text);
  long rows = 0;
  long cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1 || rows > 4096 || cols > 4096) {
    throw Error(ErrorCode::Io, "kernel text: bad header, expected '<rows> <cols>'");
  }
  Image taps(static_cast<int>(rows), static_cast<int>(cols));
  for (double& v : taps.values()) {
    if (!(in >> v)) throw Error(ErrorCode::Io, "kernel text: fewer values than rows*cols");
  }
  std::string extra;
  if (in >> extra) throw Error(ErrorCode::Io, "kernel text: trailing data '" + extra + "'");
  return taps;
}

void write_kernel_text(const fs::path& path, const Kernel& k) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_error(path, "cannot open for writing");
  out << format_kernel_text(k.taps());
  if (!out) io_error(path, "write failed");
}

Kernel read_kernel_text(const fs::path& path) {
  try {
    return project_kernel(parse_kernel_text(slurp(path)));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) io_error(path, e.what());
    throw;
  }
}

}  // namespace deblur::cli
