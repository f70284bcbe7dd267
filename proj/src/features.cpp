#include "mlrpca/features.hpp"

#include <string>

#include "mlrpca/error.hpp"
#include "mlrpca/kernels.hpp"

namespace mlrpca {

FusionWeight::FusionWeight(double beta) : beta_(beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "beta must lie in [0,1], got " + std::to_string(beta));
}

GrayImage lbp(const GrayImage& img) {
  if (img.width < 3 || img.height < 3)
    throw Error(ErrorCode::ImageTooSmall,
                "LBP needs at least 3x3, got " + std::to_string(img.width) + "x" + std::to_string(img.height));
  return kernels::omp::lbp(img);
}

GrayImage fuse_layers(const GrayImage& texture, const GrayImage& color, FusionWeight w) {
  if (texture.size() != color.size()) throw Error(ErrorCode::DimensionMismatch, "texture and color layers differ in size");
  GrayImage out(texture.width, texture.height);
  kernels::omp::fuse(texture.data, color.data, w.beta(), out.data);
  return out;
}

FrameLayers compute_layers(const GrayImage& preprocessed) { return {lbp(preprocessed), preprocessed}; }

FeatureMatrix assemble_matrix(std::span<const GrayImage> frames) {
  if (frames.size() < 2) throw Error(ErrorCode::TooFewFrames, "need at least 2 frames, got " + std::to_string(frames.size()));
  const Size layout = frames.front().size();
  for (const auto& f : frames)
    if (f.size() != layout) throw Error(ErrorCode::DimensionMismatch, "frames differ in size");

  FeatureMatrix m;
  m.layout = layout;
  m.data.resize(static_cast<Eigen::Index>(layout.area()), static_cast<Eigen::Index>(frames.size()));
  const auto n = static_cast<std::ptrdiff_t>(frames.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j)
    m.data.col(j) = Eigen::Map<const Eigen::VectorXd>(frames[j].data.data(), m.data.rows());
  return m;
}

GrayImage column_image(const Eigen::MatrixXd& m, Size layout, Eigen::Index j) {
  if (static_cast<std::size_t>(m.rows()) != layout.area())
    throw Error(ErrorCode::DimensionMismatch, "matrix rows do not match layout");
  GrayImage img(layout.width, layout.height);
  Eigen::Map<Eigen::VectorXd>(img.data.data(), m.rows()) = m.col(j);
  return img;
}

GrayImage column_image(const FeatureMatrix& m, Eigen::Index j) { return column_image(m.data, m.layout, j); }

}  // namespace mlrpca
