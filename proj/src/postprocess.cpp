#include "mlrpca/postprocess.hpp"

#include <cmath>
#include <string>

#include "mlrpca/error.hpp"
#include "mlrpca/kernels.hpp"

namespace mlrpca {

void PostprocessConfig::validate() const {
  if (!(hard_threshold > 0.0 && hard_threshold < 1.0))
    throw Error(ErrorCode::ThresholdOutOfRange, "hard threshold must lie in (0,1)");
  if (opening_radius < 0 || closing_radius < 0) throw Error(ErrorCode::InvalidArgument, "radii must be >= 0");
  if (min_component_area < 0) throw Error(ErrorCode::InvalidArgument, "min component area must be >= 0");
  if (contour_iterations < 0) throw Error(ErrorCode::InvalidArgument, "contour iterations must be >= 0");
  if (!std::isfinite(balloon)) throw Error(ErrorCode::InvalidArgument, "balloon must be finite");
}

BinaryMask hard_threshold_mask(std::span<const double> sparse_column, Size layout, double t) {
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::ThresholdOutOfRange, "t = " + std::to_string(t));
  if (sparse_column.size() != layout.area())
    throw Error(ErrorCode::DimensionMismatch, "column length does not match layout");
  BinaryMask out(layout.width, layout.height);
  for (std::size_t i = 0; i < sparse_column.size(); ++i) out.data[i] = std::abs(sparse_column[i]) >= t ? 1 : 0;
  return out;
}

BinaryMask binary_opening(const BinaryMask& mask, int radius) {
  const auto se = kernels::disk_offsets(radius);
  return kernels::omp::dilate(kernels::omp::erode(mask, se, true), se);
}

BinaryMask binary_closing(const BinaryMask& mask, int radius) {
  const auto se = kernels::disk_offsets(radius);
  return kernels::omp::erode(kernels::omp::dilate(mask, se), se, true);
}

namespace {

// Labels 8-connected components; returns the label image (-1 background) and sizes.
std::vector<int> label_components(const BinaryMask& mask, std::vector<int>& sizes) {
  std::vector<int> labels(mask.data.size(), -1);
  std::vector<int> stack;
  sizes.clear();
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      const int seed = y * mask.width + x;
      if (!mask.data[seed] || labels[seed] >= 0) continue;
      const int id = static_cast<int>(sizes.size());
      sizes.push_back(0);
      labels[seed] = id;
      stack.push_back(seed);
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        ++sizes[id];
        const int px = p % mask.width, py = p / mask.width;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = px + dx, ny = py + dy;
            if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
            const int q = ny * mask.width + nx;
            if (mask.data[q] && labels[q] < 0) {
              labels[q] = id;
              stack.push_back(q);
            }
          }
      }
    }
  return labels;
}

}  // namespace

BinaryMask remove_small_components(const BinaryMask& mask, int min_area) {
  if (min_area <= 1) return mask;
  std::vector<int> sizes;
  const auto labels = label_components(mask, sizes);
  BinaryMask out(mask.width, mask.height);
  for (std::size_t i = 0; i < labels.size(); ++i) out.data[i] = labels[i] >= 0 && sizes[labels[i]] >= min_area ? 1 : 0;
  return out;
}

int count_components(const BinaryMask& mask) {
  std::vector<int> sizes;
  label_components(mask, sizes);
  return static_cast<int>(sizes.size());
}

BinaryMask morphological_clean(const BinaryMask& mask, const PostprocessConfig& cfg) {
  auto out = binary_opening(mask, cfg.opening_radius);
  out = binary_closing(out, cfg.closing_radius);
  return remove_small_components(out, cfg.min_component_area);
}

std::vector<BinaryMask> postprocess(const Eigen::MatrixXd& sparse, Size layout, std::span<const GrayImage> guides,
                                    const PostprocessConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(sparse.cols()) != guides.size())
    throw Error(ErrorCode::DimensionMismatch, "need one guide frame per sparse column");
  if (static_cast<std::size_t>(sparse.rows()) != layout.area())
    throw Error(ErrorCode::DimensionMismatch, "sparse rows do not match layout");

  std::vector<BinaryMask> masks(guides.size());
  for (std::size_t j = 0; j < guides.size(); ++j) {
    const std::span<const double> column(sparse.col(static_cast<Eigen::Index>(j)).data(), layout.area());
    auto mask = hard_threshold_mask(column, layout, cfg.hard_threshold);
    mask = morphological_clean(mask, cfg);
    masks[j] = refine_contour(mask, guides[j], cfg);
  }
  return masks;
}

}  // namespace mlrpca
