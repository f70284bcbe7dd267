#include "mlrpca/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace mlrpca::kernels {

std::vector<Offset> disk_offsets(int radius) {
  std::vector<Offset> se;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) se.push_back({dx, dy});
  return se;
}

namespace serial {

namespace {
int clamp(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }
}  // namespace

GrayImage lbp(const GrayImage& img) {
  // clockwise from the top-left neighbour; bit k has weight 2^k
  static constexpr Offset kRing[8] = {{-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}};
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double c = img.at(x, y);
      int code = 0;
      for (int k = 0; k < 8; ++k) {
        const int nx = clamp(x + kRing[k].dx, 0, img.width - 1);
        const int ny = clamp(y + kRing[k].dy, 0, img.height - 1);
        if (img.at(nx, ny) >= c) code |= 1 << k;
      }
      out.at(x, y) = code / 255.0;
    }
  }
  return out;
}

GrayImage convolve_separable(const GrayImage& img, std::span<const double> kernel) {
  const int r = static_cast<int>(kernel.size() / 2);
  GrayImage tmp(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[k + r] * img.at(clamp(x + k, 0, img.width - 1), y);
      tmp.at(x, y) = acc;
    }
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[k + r] * tmp.at(x, clamp(y + k, 0, img.height - 1));
      out.at(x, y) = acc;
    }
  return out;
}

BinaryMask dilate(const BinaryMask& mask, std::span<const Offset> se) {
  BinaryMask out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      bool hit = false;
      for (const auto& o : se) {
        const int sx = x - o.dx, sy = y - o.dy;
        if (sx >= 0 && sy >= 0 && sx < mask.width && sy < mask.height && mask.at(sx, sy)) {
          hit = true;
          break;
        }
      }
      out.set(x, y, hit);
    }
  return out;
}

BinaryMask erode(const BinaryMask& mask, std::span<const Offset> se, bool outside) {
  BinaryMask out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      bool all = true;
      for (const auto& o : se) {
        const int sx = x + o.dx, sy = y + o.dy;
        const bool inside = sx >= 0 && sy >= 0 && sx < mask.width && sy < mask.height;
        if (!(inside ? mask.at(sx, sy) : outside)) {
          all = false;
          break;
        }
      }
      out.set(x, y, all);
    }
  return out;
}

void fuse(std::span<const double> texture, std::span<const double> color, double beta, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = beta * texture[i] + (1.0 - beta) * color[i];
}

void soft_threshold(const Eigen::MatrixXd& in, double tau, Eigen::MatrixXd& out) {
  out.resize(in.rows(), in.cols());
  for (Eigen::Index j = 0; j < in.cols(); ++j)
    for (Eigen::Index i = 0; i < in.rows(); ++i) {
      const double v = in(i, j);
      const double mag = std::max(std::abs(v) - tau, 0.0);
      out(i, j) = (v < 0 && mag > 0) ? -mag : mag;
    }
}

}  // namespace serial
}  // namespace mlrpca::kernels
