#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mlrpca/image.hpp"
#include "mlrpca/imgio.hpp"

namespace mlrpca {

/// The two single-step pipelines: equalization for day frames, Gaussian
/// filtering for night frames.
enum class PipelineKind { EqualizeOnly, GaussianOnly };

enum class PreprocessStep { Equalize, Gaussian };

/// Ordered list of steps applied to the grayscale frame. Empty means identity.
struct Pipeline {
  std::vector<PreprocessStep> steps;
  double sigma = 1.0;

  static Pipeline from_kind(PipelineKind kind, double sigma = 1.0);
  static Pipeline identity() { return {}; }

  /// "equalize", "gaussian", "none", or steps joined by '+'.
  std::string name() const;
  bool operator==(const Pipeline&) const = default;
};

/// Parses the `name()` syntax; throws InvalidArgument on unknown step names.
Pipeline parse_pipeline(std::string_view text, double sigma = 1.0);

struct PreprocessConfig {
  Pipeline day = Pipeline::from_kind(PipelineKind::EqualizeOnly);
  Pipeline night = Pipeline::from_kind(PipelineKind::GaussianOnly);

  const Pipeline& for_kind(SequenceKind kind) const { return kind == SequenceKind::Day ? day : night; }
};

/// 256-bin histogram equalization with min-CDF normalization:
/// out = (cdf(bin) - cdf_min) / (N - cdf_min); a constant image maps to 0.
GrayImage equalize_histogram(const GrayImage& img);

/// Normalized 1-D Gaussian taps, radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian filter with edge replication. Throws NonPositiveSigma.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

GrayImage run_pipeline(const GrayImage& img, PipelineKind kind, double sigma = 1.0);
GrayImage run_pipeline(const GrayImage& img, const Pipeline& pipeline);

}  // namespace mlrpca
