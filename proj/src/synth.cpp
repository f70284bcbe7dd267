#include "mlrpca/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "mlrpca/error.hpp"
#include "mlrpca/imgio.hpp"

namespace mlrpca::synth {

Instance generate(int rows, int cols, int rank, double sparsity_fraction, double magnitude, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::ZeroDimension, "rows and cols must be >= 1");
  if (rank < 0 || rank > std::min(rows, cols))
    throw Error(ErrorCode::RankOutOfBounds, "rank " + std::to_string(rank) + " outside [0, min(rows, cols)]");
  if (!(sparsity_fraction >= 0.0 && sparsity_fraction <= 1.0))
    throw Error(ErrorCode::FractionOutOfRange, "sparsity fraction must lie in [0,1]");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd a(rows, rank), b(cols, rank);
  for (Eigen::Index j = 0; j < rank; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = normal(rng) / std::sqrt(static_cast<double>(rows));
  for (Eigen::Index j = 0; j < rank; ++j)
    for (Eigen::Index i = 0; i < cols; ++i) b(i, j) = normal(rng) / std::sqrt(static_cast<double>(cols));

  Instance out;
  out.low_rank = rank > 0 ? Eigen::MatrixXd(a * b.transpose()) : Eigen::MatrixXd::Zero(rows, cols);

  const auto total = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  const auto count = static_cast<std::size_t>(std::llround(sparsity_fraction * static_cast<double>(total)));
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // partial Fisher-Yates: the first `count` slots become the support
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, total - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  out.sparse = Eigen::MatrixXd::Zero(rows, cols);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < count; ++i) out.sparse.data()[idx[i]] = coin(rng) ? magnitude : -magnitude;

  out.m = out.low_rank + out.sparse;
  return out;
}

Video generate_video(const VideoOptions& opts) {
  if (opts.width < opts.block || opts.height < opts.block || opts.block < 1)
    throw Error(ErrorCode::InvalidArgument, "block must fit inside the frame");
  if (opts.frames < 2) throw Error(ErrorCode::TooFewFrames, "need at least 2 frames");

  if (opts.patch < 1) throw Error(ErrorCode::InvalidArgument, "patch must be >= 1");
  if (opts.speed_x < 0 || opts.speed_y < 0) throw Error(ErrorCode::InvalidArgument, "speed must be >= 0");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> level(opts.background_low, opts.background_high);
  const int cells_x = (opts.width + opts.patch - 1) / opts.patch, cells_y = (opts.height + opts.patch - 1) / opts.patch;
  std::vector<double> cells(static_cast<std::size_t>(cells_x) * cells_y);
  for (auto& c : cells) c = level(rng);
  GrayImage background(opts.width, opts.height);
  for (int y = 0; y < opts.height; ++y)
    for (int x = 0; x < opts.width; ++x)
      background.at(x, y) = std::clamp(cells[static_cast<std::size_t>(y / opts.patch) * cells_x + x / opts.patch], 0.0, 1.0);

  // block bounces off the frame borders at a constant per-frame speed
  auto bounce = [](int travel, int span) {
    if (span == 0) return 0;
    const int r = travel % (2 * span);
    return r <= span ? r : 2 * span - r;
  };
  Video v;
  const int span_x = opts.width - opts.block, span_y = opts.height - opts.block;
  for (int j = 0; j < opts.frames; ++j) {
    const int bx = bounce(j * opts.speed_x, span_x);
    const int by = bounce(j * opts.speed_y, span_y);
    GrayImage frame = background;
    BinaryMask gt(opts.width, opts.height);
    for (int y = by; y < by + opts.block; ++y)
      for (int x = bx; x < bx + opts.block; ++x) {
        frame.at(x, y) = opts.block_value;
        gt.set(x, y, true);
      }
    v.frames.push_back(std::move(frame));
    v.ground_truth.push_back(std::move(gt));
  }
  return v;
}

std::filesystem::path write_video(const Video& video, const std::filesystem::path& dir, const std::string& sequence_id,
                                  SequenceKind kind) {
  std::filesystem::create_directories(dir);
  SequenceManifest m;
  m.sequence_id = sequence_id;
  m.kind = kind;
  for (std::size_t j = 0; j < video.frames.size(); ++j) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.png", j);
    const auto frame_path = dir / name;
    std::snprintf(name, sizeof name, "gt_%03zu.png", j);
    const auto gt_path = dir / name;
    save_image(video.frames[j], frame_path);
    save_mask(video.ground_truth[j], gt_path);
    m.frames.push_back({frame_path, gt_path, std::nullopt});
  }
  const auto manifest_path = dir / "manifest.json";
  save_manifest(m, manifest_path);
  return manifest_path;
}

}  // namespace mlrpca::synth
