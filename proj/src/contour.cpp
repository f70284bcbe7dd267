// Morphological geodesic active contour (Marquez-Neila, Baumela, Alvarez):
// the GAC level-set PDE replaced by a balloon step (binary dilation or
// erosion gated by g), an image-attachment step driven by grad(g) . grad(u),
// and a curvature step from the SI/IS line operators.

#include <cmath>

#include "mlrpca/error.hpp"
#include "mlrpca/kernels.hpp"
#include "mlrpca/postprocess.hpp"
#include "mlrpca/preprocess.hpp"

namespace mlrpca {

namespace {

using kernels::Offset;

struct Gradient {
  std::vector<double> gx, gy;
};

// Central differences inside, one-sided at the borders.
template <typename Get>
Gradient gradient(int w, int h, Get get) {
  Gradient g{std::vector<double>(static_cast<std::size_t>(w) * h, 0.0), std::vector<double>(static_cast<std::size_t>(w) * h, 0.0)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (w > 1) {
        if (x == 0)
          g.gx[i] = get(1, y) - get(0, y);
        else if (x == w - 1)
          g.gx[i] = get(x, y) - get(x - 1, y);
        else
          g.gx[i] = 0.5 * (get(x + 1, y) - get(x - 1, y));
      }
      if (h > 1) {
        if (y == 0)
          g.gy[i] = get(x, 1) - get(x, 0);
        else if (y == h - 1)
          g.gy[i] = get(x, y) - get(x, y - 1);
        else
          g.gy[i] = 0.5 * (get(x, y + 1) - get(x, y - 1));
      }
    }
  return g;
}

const std::vector<Offset> kLines[4] = {
    {{-1, 0}, {0, 0}, {1, 0}},
    {{0, -1}, {0, 0}, {0, 1}},
    {{-1, -1}, {0, 0}, {1, 1}},
    {{1, -1}, {0, 0}, {-1, 1}},
};

BinaryMask sup_inf(const BinaryMask& u) {
  BinaryMask out(u.width, u.height);
  for (const auto& line : kLines) {
    const auto e = kernels::omp::erode(u, line, false);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] |= e.data[i];
  }
  return out;
}

BinaryMask inf_sup(const BinaryMask& u) {
  BinaryMask out(u.width, u.height, true);
  for (const auto& line : kLines) {
    const auto d = kernels::omp::dilate(u, line);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] &= d.data[i];
  }
  return out;
}

}  // namespace

GrayImage edge_stopping(const GrayImage& guide, double alpha, double sigma) {
  const auto smooth = gaussian_blur(guide, sigma);
  const auto grad = gradient(smooth.width, smooth.height, [&](int x, int y) { return smooth.at(x, y); });
  GrayImage g(guide.width, guide.height);
  for (std::size_t i = 0; i < g.data.size(); ++i)
    g.data[i] = 1.0 / (1.0 + alpha * (grad.gx[i] * grad.gx[i] + grad.gy[i] * grad.gy[i]));
  return g;
}

BinaryMask refine_contour(const BinaryMask& mask, const GrayImage& guide, const PostprocessConfig& cfg) {
  if (mask.size() != guide.size()) throw Error(ErrorCode::DimensionMismatch, "mask and guide differ in size");
  if (cfg.contour_iterations == 0 || mask.data.empty()) return mask;

  const auto g = edge_stopping(guide);
  const auto dg = gradient(g.width, g.height, [&](int x, int y) { return g.at(x, y); });
  static const std::vector<Offset> square = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {0, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  const double gate = std::abs(cfg.balloon);

  BinaryMask u = mask;
  for (int it = 0; it < cfg.contour_iterations; ++it) {
    if (cfg.balloon != 0.0) {
      const auto moved = cfg.balloon > 0 ? kernels::omp::dilate(u, square) : kernels::omp::erode(u, square, false);
      for (std::size_t i = 0; i < u.data.size(); ++i)
        if (g.data[i] > gate) u.data[i] = moved.data[i];
    }

    const auto du = gradient(u.width, u.height, [&](int x, int y) { return u.at(x, y) ? 1.0 : 0.0; });
    for (std::size_t i = 0; i < u.data.size(); ++i) {
      const double attach = dg.gx[i] * du.gx[i] + dg.gy[i] * du.gy[i];
      if (attach > 0)
        u.data[i] = 1;
      else if (attach < 0)
        u.data[i] = 0;
    }

    u = it % 2 == 0 ? sup_inf(inf_sup(u)) : inf_sup(sup_inf(u));
  }
  return u;
}

}  // namespace mlrpca
