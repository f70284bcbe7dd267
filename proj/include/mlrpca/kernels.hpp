#pragma once

// Per-pixel data-parallel kernels. Each kernel exists twice: `serial` is the
// plain reference loop, `omp` is the OpenMP version used by the pipeline.
// Both produce bit-identical results.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "mlrpca/image.hpp"

namespace mlrpca::kernels {

struct Offset {
  int dx = 0;
  int dy = 0;
};

/// Offsets of a digital disk: all (dx, dy) with dx^2 + dy^2 <= radius^2.
std::vector<Offset> disk_offsets(int radius);

namespace serial {

/// 8-neighbour radius-1 LBP, codes scaled by 1/255, edge-replicated borders.
GrayImage lbp(const GrayImage& img);
/// Separable convolution with a symmetric 1-D kernel, edge-replicated borders.
GrayImage convolve_separable(const GrayImage& img, std::span<const double> kernel);
/// Pixels outside the image count as false.
BinaryMask dilate(const BinaryMask& mask, std::span<const Offset> se);
/// Pixels outside the image count as `outside`.
BinaryMask erode(const BinaryMask& mask, std::span<const Offset> se, bool outside);
void fuse(std::span<const double> texture, std::span<const double> color, double beta, std::span<double> out);
void soft_threshold(const Eigen::MatrixXd& in, double tau, Eigen::MatrixXd& out);

}  // namespace serial

namespace omp {

GrayImage lbp(const GrayImage& img);
GrayImage convolve_separable(const GrayImage& img, std::span<const double> kernel);
BinaryMask dilate(const BinaryMask& mask, std::span<const Offset> se);
BinaryMask erode(const BinaryMask& mask, std::span<const Offset> se, bool outside);
void fuse(std::span<const double> texture, std::span<const double> color, double beta, std::span<double> out);
void soft_threshold(const Eigen::MatrixXd& in, double tau, Eigen::MatrixXd& out);

}  // namespace omp

}  // namespace mlrpca::kernels
