#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "mlrpca/image.hpp"

namespace mlrpca {

/// Texture weight beta in [0,1]; construction rejects anything else.
class FusionWeight {
 public:
  explicit FusionWeight(double beta);
  double beta() const { return beta_; }

 private:
  double beta_;
};

/// p x n data matrix, one flattened (row-major) frame per column.
struct FeatureMatrix {
  Eigen::MatrixXd data;
  Size layout;

  Eigen::Index rows() const { return data.rows(); }
  Eigen::Index cols() const { return data.cols(); }
};

/// Radius-1, 8-neighbour LBP. Bit k is set when neighbour k >= centre,
/// neighbours clockwise from the top-left; codes divided by 255.
/// Throws ImageTooSmall below 3x3.
GrayImage lbp(const GrayImage& img);

/// beta * texture + (1 - beta) * color, per pixel.
GrayImage fuse_layers(const GrayImage& texture, const GrayImage& color, FusionWeight w);

/// Texture (LBP) and color (grayscale) layers of a pre-processed frame.
struct FrameLayers {
  GrayImage texture;
  GrayImage color;
};

FrameLayers compute_layers(const GrayImage& preprocessed);

FeatureMatrix assemble_matrix(std::span<const GrayImage> frames);

/// Column `j` of `m` reshaped back to an image (values are not clamped).
GrayImage column_image(const FeatureMatrix& m, Eigen::Index j);
GrayImage column_image(const Eigen::MatrixXd& m, Size layout, Eigen::Index j);

}  // namespace mlrpca
