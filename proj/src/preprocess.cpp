#include "mlrpca/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mlrpca/error.hpp"
#include "mlrpca/kernels.hpp"

namespace mlrpca {

Pipeline Pipeline::from_kind(PipelineKind kind, double sigma) {
  Pipeline p;
  p.sigma = sigma;
  p.steps.push_back(kind == PipelineKind::EqualizeOnly ? PreprocessStep::Equalize : PreprocessStep::Gaussian);
  return p;
}

std::string Pipeline::name() const {
  if (steps.empty()) return "none";
  std::string out;
  for (auto s : steps) {
    if (!out.empty()) out += '+';
    out += s == PreprocessStep::Equalize ? "equalize" : "gaussian";
  }
  return out;
}

Pipeline parse_pipeline(std::string_view text, double sigma) {
  Pipeline p;
  p.sigma = sigma;
  if (text == "none") return p;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('+', start), text.size());
    const auto token = text.substr(start, end - start);
    if (token == "equalize")
      p.steps.push_back(PreprocessStep::Equalize);
    else if (token == "gaussian")
      p.steps.push_back(PreprocessStep::Gaussian);
    else
      throw Error(ErrorCode::InvalidArgument,
                  "unknown pre-processing step \"" + std::string(token) + "\" (expected equalize, gaussian or none)");
    start = end + 1;
  }
  return p;
}

GrayImage equalize_histogram(const GrayImage& img) {
  std::array<std::size_t, 256> hist{};
  std::vector<int> bins(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    bins[i] = static_cast<int>(std::lround(img.data[i] * 255.0));
    ++hist[bins[i]];
  }
  std::array<std::size_t, 256> cdf{};
  std::size_t run = 0, cdf_min = 0;
  for (int b = 0; b < 256; ++b) {
    run += hist[b];
    cdf[b] = run;
    if (cdf_min == 0) cdf_min = run;
  }
  const std::size_t total = img.data.size();
  GrayImage out(img.width, img.height);
  if (total == cdf_min) return out;  // single occupied level
  const double denom = static_cast<double>(total - cdf_min);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = static_cast<double>(cdf[bins[i]] - cdf_min) / denom;
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma = " + std::to_string(sigma));
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  for (auto& v : k) v /= sum;
  return k;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  const auto k = gaussian_kernel(sigma);
  auto out = kernels::omp::convolve_separable(img, k);
  if (img.data.empty()) return out;
  // rounding in the weighted sums must not push values past the input range
  const auto [lo, hi] = std::minmax_element(img.data.begin(), img.data.end());
  for (auto& v : out.data) v = std::clamp(v, *lo, *hi);
  return out;
}

GrayImage run_pipeline(const GrayImage& img, PipelineKind kind, double sigma) {
  return run_pipeline(img, Pipeline::from_kind(kind, sigma));
}

GrayImage run_pipeline(const GrayImage& img, const Pipeline& pipeline) {
  GrayImage out = img;
  for (auto step : pipeline.steps)
    out = step == PreprocessStep::Equalize ? equalize_histogram(out) : gaussian_blur(out, pipeline.sigma);
  return out;
}

}  // namespace mlrpca
