#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "mlrpca/image.hpp"

namespace mlrpca {

struct PostprocessConfig {
  double hard_threshold = 0.15;  // applied to |S|
  int opening_radius = 2;
  int closing_radius = 4;
  int min_component_area = 50;
  int contour_iterations = 50;
  double balloon = 0.3;  // > 0 pushes the contour outwards

  void validate() const;
};

/// mask = |S| >= t. Throws ThresholdOutOfRange unless 0 < t < 1.
BinaryMask hard_threshold_mask(std::span<const double> sparse_column, Size layout, double t);

BinaryMask binary_opening(const BinaryMask& mask, int radius);
BinaryMask binary_closing(const BinaryMask& mask, int radius);
/// Drops 8-connected components with fewer than `min_area` pixels.
BinaryMask remove_small_components(const BinaryMask& mask, int min_area);
/// Number of 8-connected components.
int count_components(const BinaryMask& mask);

/// Opening, then closing (disks), then small-component removal.
BinaryMask morphological_clean(const BinaryMask& mask, const PostprocessConfig& cfg);

/// Edge-stopping map g = 1 / (1 + alpha |grad(gaussian_blur(guide, sigma))|^2).
GrayImage edge_stopping(const GrayImage& guide, double alpha = 100.0, double sigma = 2.0);

/// Morphological geodesic active contour seeded by `mask`, run for
/// cfg.contour_iterations steps against the edge map of `guide`.
BinaryMask refine_contour(const BinaryMask& mask, const GrayImage& guide, const PostprocessConfig& cfg);

/// hard threshold -> morphological_clean -> refine_contour, one mask per
/// column of `sparse`.
std::vector<BinaryMask> postprocess(const Eigen::MatrixXd& sparse, Size layout, std::span<const GrayImage> guides,
                                    const PostprocessConfig& cfg);

}  // namespace mlrpca
