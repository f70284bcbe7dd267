#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlrpca/image.hpp"

namespace mlrpca::eval {

struct ConfusionMatrix {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Foreground is `true` in both masks. Throws DimensionMismatch.
ConfusionMatrix confusion(const BinaryMask& pred, const BinaryMask& gt);

// A frame with empty prediction and empty ground truth scores 1 on all three;
// otherwise a zero denominator gives 0.
double precision(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);
double f_measure(const ConfusionMatrix& cm);

/// Harmonic mean 2pr/(p+r); 0 when p + r = 0.
double f_measure(double precision, double recall);

struct FrameInput {
  std::string id;
  BinaryMask pred;
  std::optional<BinaryMask> gt;
};

struct FrameScore {
  std::string id;
  ConfusionMatrix cm;
  double precision = 0, recall = 0, f_measure = 0;
};

struct EvalReport {
  std::vector<FrameScore> per_frame;
  std::vector<std::string> excluded;  // frames without ground truth
  double average_f_measure = 0;
  nlohmann::json config_echo;
};

/// Per-frame scores plus their unweighted mean. Throws NoGroundTruth when no
/// frame carries a ground-truth mask.
EvalReport report(std::span<const FrameInput> frames, const nlohmann::json& config);

nlohmann::json to_json(const EvalReport& r);
/// `frame,tp,fp,tn,fn,precision,recall,f_measure` rows, then an `average` row.
void write_csv(const EvalReport& r, std::ostream& out);

}  // namespace mlrpca::eval
