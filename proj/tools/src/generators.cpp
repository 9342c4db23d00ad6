#include "deblur/cli/generators.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace deblur::cli {

Kernel box_kernel(int size) { return Kernel::uniform(size, size); }

Kernel gaussian_kernel(double sigma, int size) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveParameter, "gaussian sigma must be positive");
  if (size <= 0) size = 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
  Image taps(size, size);
  const int c = size / 2;
  for (int r = 0; r < size; ++r) {
    for (int q = 0; q < size; ++q) {
      const double d2 = static_cast<double>((r - c) * (r - c) + (q - c) * (q - c));
      taps(r, q) = std::exp(-d2 / (2.0 * sigma * sigma));
    }
  }
  return project_kernel(taps);
}

Kernel motion_kernel(double length, double angle_deg) {
  if (!(length >= 1.0)) throw Error(ErrorCode::NonPositiveParameter, "motion length must be >= 1");
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double ux = std::cos(theta);
  const double uy = -std::sin(theta);  // image rows grow downwards
  const double half = 0.5 * (length - 1.0);
  const int radius = static_cast<int>(std::ceil(half * std::max(std::abs(ux), std::abs(uy)) - 1e-9));
  const int size = 2 * radius + 1;
  Image taps(size, size);
  const int samples = std::max(2, static_cast<int>(std::ceil(length * 20.0)));
  for (int s = 0; s <= samples; ++s) {
    const double t = -half + (2.0 * half) * s / samples;
    const double x = radius + t * ux;
    const double y = radius + t * uy;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto splat = [&](int r, int c, double w) {
      if (r >= 0 && r < size && c >= 0 && c < size) taps(r, c) += w;
    };
    splat(y0, x0, (1 - fy) * (1 - fx));
    splat(y0, x0 + 1, (1 - fy) * fx);
    splat(y0 + 1, x0, fy * (1 - fx));
    splat(y0 + 1, x0 + 1, fy * fx);
  }
  return project_kernel(taps);
}

bool parse_kernel_spec(const std::string& spec, Kernel& out) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) return false;
  auto number = [&](std::size_t i) {
    std::size_t used = 0;
    const double v = std::stod(parts.at(i), &used);
    if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
    return v;
  };
  try {
    if (parts[0] == "delta" && parts.size() == 1) {
      out = Kernel::delta(1, 1);
      return true;
    }
    if (parts[0] == "box" && parts.size() == 2) {
      out = box_kernel(static_cast<int>(number(1)));
      return true;
    }
    if (parts[0] == "gaussian" && (parts.size() == 2 || parts.size() == 3)) {
      out = gaussian_kernel(number(1), parts.size() == 3 ? static_cast<int>(number(2)) : 0);
      return true;
    }
    if (parts[0] == "motion" && parts.size() == 3) {
      out = motion_kernel(number(1), number(2));
      return true;
    }
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::NonPositiveParameter, "malformed kernel spec '" + spec + "'");
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::NonPositiveParameter, "malformed kernel spec '" + spec + "'");
  }
  return false;
}

}  // namespace deblur::cli
