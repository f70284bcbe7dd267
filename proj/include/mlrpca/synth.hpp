#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mlrpca/image.hpp"
#include "mlrpca/imgio.hpp"

namespace mlrpca::synth {

/// M = L0 + S0 with known factors.
struct Instance {
  Eigen::MatrixXd m;
  Eigen::MatrixXd low_rank;
  Eigen::MatrixXd sparse;
};

/// L0 = A B^T with A ~ N(0,1)/sqrt(rows), B ~ N(0,1)/sqrt(cols); S0 has exactly
/// round(fraction * rows * cols) entries of value +-magnitude at uniformly
/// drawn positions. Bit-identical for a given seed.
Instance generate(int rows, int cols, int rank, double sparsity_fraction, double magnitude, std::uint64_t seed);

struct VideoOptions {
  int width = 64;
  int height = 48;
  int frames = 30;
  int block = 10;
  double block_value = 1.0;
  int speed_x = 7;  // pixels per frame
  int speed_y = 5;
  int patch = 1;  // background mosaic cell size; 1 gives per-pixel noise
  double background_low = 0.0;
  double background_high = 0.1;
  std::uint64_t seed = 7;
};

/// Static mosaic background (random gray level per patch x patch cell) with
/// one square bouncing off the frame borders.
struct Video {
  std::vector<GrayImage> frames;
  std::vector<BinaryMask> ground_truth;
};

Video generate_video(const VideoOptions& opts);

/// Writes frame_NNN.png, gt_NNN.png and manifest.json (kind "day") into `dir`;
/// returns the manifest path.
std::filesystem::path write_video(const Video& video, const std::filesystem::path& dir, const std::string& sequence_id,
                                  SequenceKind kind = SequenceKind::Day);

}  // namespace mlrpca::synth
