#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "deblur/core.hpp"

namespace deblur::cli {

/// A decoded raster with one Image per channel (1 = gray, 3 = RGB), all
/// intensities scaled into [0,1].
struct Raster {
  std::vector<Image> channels;

  bool color() const noexcept { return channels.size() == 3; }
  Size2 shape() const noexcept { return channels.front().shape(); }
  /// Rec. 601 luma for color rasters, the single channel otherwise.
  Image luminance() const;
};

/// PNG (8/16-bit gray, gray+alpha, RGB, RGBA, palette) or PGM (P2/P5, 8/16-bit).
/// Alpha is discarded.
Raster read_image(const std::filesystem::path& path);

/// 16-bit PNG, values clamped to [0,1].
void write_png16(const std::filesystem::path& path, const Raster& raster);
void write_png16(const std::filesystem::path& path, const Image& gray);

/// Kernel thumbnail: 8-bit, scaled so the largest tap is white, enlarged by
/// pixel replication to at least 64 pixels on the short side.
void write_kernel_png(const std::filesystem::path& path, const Kernel& k);

// Kernel text format:
//   line 1: "<rows> <cols>"
//   then <rows> lines of <cols> space-separated decimals, row-major,
//   printed with 17 significant digits so values round-trip exactly.
std::string format_kernel_text(const Image& taps);
Image parse_kernel_text(const std::string& text);
void write_kernel_text(const std::filesystem::path& path, const Kernel& k);
/// Reads and projects onto the feasible set.
Kernel read_kernel_text(const std::filesystem::path& path);

}  // namespace deblur::cli
