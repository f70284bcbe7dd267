#include "mlrpca/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace mlrpca::kernels::omp {

namespace {
int clamp(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }
}  // namespace

GrayImage lbp(const GrayImage& img) {
  const int w = img.width, h = img.height;
  GrayImage out(w, h);
  const double* src = img.data.data();
  double* dst = out.data.data();

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const int ym = clamp(y - 1, 0, h - 1), yp = clamp(y + 1, 0, h - 1);
    const double* up = src + static_cast<std::size_t>(ym) * w;
    const double* mid = src + static_cast<std::size_t>(y) * w;
    const double* down = src + static_cast<std::size_t>(yp) * w;
    for (int x = 0; x < w; ++x) {
      const int xm = x > 0 ? x - 1 : 0, xp = x + 1 < w ? x + 1 : w - 1;
      const double c = mid[x];
      const int code = (up[xm] >= c) | (up[x] >= c) << 1 | (up[xp] >= c) << 2 | (mid[xp] >= c) << 3 |
                       (down[xp] >= c) << 4 | (down[x] >= c) << 5 | (down[xm] >= c) << 6 | (mid[xm] >= c) << 7;
      dst[static_cast<std::size_t>(y) * w + x] = code / 255.0;
    }
  }
  return out;
}

GrayImage convolve_separable(const GrayImage& img, std::span<const double> kernel) {
  const int w = img.width, h = img.height;
  const int r = static_cast<int>(kernel.size() / 2);
  GrayImage tmp(w, h), out(w, h);

#pragma omp parallel
  {
    std::vector<double> row(static_cast<std::size_t>(w + 2 * r));
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      const double* src = img.data.data() + static_cast<std::size_t>(y) * w;
      for (int i = 0; i < w + 2 * r; ++i) row[i] = src[clamp(i - r, 0, w - 1)];
      double* dst = tmp.data.data() + static_cast<std::size_t>(y) * w;
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int k = 0; k <= 2 * r; ++k) acc += kernel[k] * row[x + k];
        dst[x] = acc;
      }
    }
    // vertical pass reads whole rows of tmp, so wait for the horizontal pass
#pragma omp barrier
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      double* dst = out.data.data() + static_cast<std::size_t>(y) * w;
      std::fill(dst, dst + w, 0.0);
      for (int k = -r; k <= r; ++k) {
        const double* src = tmp.data.data() + static_cast<std::size_t>(clamp(y + k, 0, h - 1)) * w;
        const double wk = kernel[k + r];
        for (int x = 0; x < w; ++x) dst[x] += wk * src[x];
      }
    }
  }
  return out;
}

BinaryMask dilate(const BinaryMask& mask, std::span<const Offset> se) {
  BinaryMask out(mask.width, mask.height);
  const int w = mask.width, h = mask.height;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::uint8_t hit = 0;
      for (const auto& o : se) {
        const int sx = x - o.dx, sy = y - o.dy;
        if (static_cast<unsigned>(sx) < static_cast<unsigned>(w) && static_cast<unsigned>(sy) < static_cast<unsigned>(h) &&
            mask.data[static_cast<std::size_t>(sy) * w + sx]) {
          hit = 1;
          break;
        }
      }
      out.data[static_cast<std::size_t>(y) * w + x] = hit;
    }
  return out;
}

BinaryMask erode(const BinaryMask& mask, std::span<const Offset> se, bool outside) {
  BinaryMask out(mask.width, mask.height);
  const int w = mask.width, h = mask.height;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::uint8_t all = 1;
      for (const auto& o : se) {
        const int sx = x + o.dx, sy = y + o.dy;
        const bool inside =
            static_cast<unsigned>(sx) < static_cast<unsigned>(w) && static_cast<unsigned>(sy) < static_cast<unsigned>(h);
        if (!(inside ? mask.data[static_cast<std::size_t>(sy) * w + sx] != 0 : outside)) {
          all = 0;
          break;
        }
      }
      out.data[static_cast<std::size_t>(y) * w + x] = all;
    }
  return out;
}

void fuse(std::span<const double> texture, std::span<const double> color, double beta, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = beta * texture[i] + (1.0 - beta) * color[i];
}

void soft_threshold(const Eigen::MatrixXd& in, double tau, Eigen::MatrixXd& out) {
  out.resize(in.rows(), in.cols());
  const Eigen::Index n = in.size();
  const double* src = in.data();
  double* dst = out.data();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = src[i];
    const double mag = std::max(std::abs(v) - tau, 0.0);
    dst[i] = (v < 0 && mag > 0) ? -mag : mag;
  }
}

}  // namespace mlrpca::kernels::omp
