#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "mlrpca/eval.hpp"
#include "mlrpca/features.hpp"
#include "mlrpca/imgio.hpp"
#include "mlrpca/postprocess.hpp"
#include "mlrpca/preprocess.hpp"
#include "mlrpca/rpca.hpp"

namespace mlrpca::experiments {

/// Experiments 1-4: days, nights, days+nights with per-kind pipelines,
/// days+nights with the day pipeline everywhere.
enum class ExperimentKind { DaysOnly = 1, NightsOnly = 2, MixedTwoPipelines = 3, MixedOnePipeline = 4 };

ExperimentKind experiment_from_number(int n);
std::string_view to_string(ExperimentKind kind) noexcept;

/// Pre-processing each experiment prescribes; `sigma` feeds the Gaussian step.
PreprocessConfig preprocess_for(ExperimentKind kind, double sigma = 1.0);

struct GroupFrame {
  std::string id;  // "<sequence_id>/<mask stem>"
  std::string mask_name;
  FrameEntry entry;
  SequenceKind kind = SequenceKind::Day;
};

/// Frames solved together as one data matrix.
struct SolveGroup {
  std::string id;
  std::vector<GroupFrame> frames;
};

/// File name a frame's mask is written under: "<index:04>_<image stem>.png".
std::string mask_file_name(std::size_t index, const std::filesystem::path& image_path);

SolveGroup group_from_manifest(const SequenceManifest& m);

/// DaysOnly / NightsOnly: one group per matching manifest. Mixed kinds: day i
/// and night i (input order within each kind) merged into one group; throws
/// UnpairedSequence when the counts differ.
std::vector<SolveGroup> group_sequences(std::span<const SequenceManifest> manifests, ExperimentKind kind);

/// Manifests (*.json) of a directory in file-name order.
std::vector<SequenceManifest> load_manifest_dir(const std::filesystem::path& dir);

struct PipelineConfig {
  PreprocessConfig pre;
  rpca::SolverConfig solver;
  PostprocessConfig post;
  int scale = 8;                     // working size = source / scale
  std::optional<Size> working_size;  // overrides scale
};

nlohmann::json to_json(const PipelineConfig& cfg);

/// Frame layers of one group, computed once and reused for every beta.
struct PreparedGroup {
  std::string id;
  Size layout;
  std::vector<std::string> frame_ids;
  std::vector<std::string> mask_names;
  std::vector<FrameLayers> layers;
  std::vector<GrayImage> guides;  // grayscale before pre-processing; steers the active contour
  std::vector<std::optional<BinaryMask>> ground_truth;
};

PreparedGroup prepare_group(const SolveGroup& group, const PipelineConfig& cfg);

struct GroupRun {
  std::vector<BinaryMask> masks;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  std::vector<rpca::TraceRow> trace;
  std::vector<eval::FrameScore> scores;  // frames with ground truth only
};

/// fuse(beta) -> assemble -> solve -> postprocess -> score, for one group.
GroupRun run_group(const PreparedGroup& group, double beta, const rpca::SolverConfig& solver,
                   const PostprocessConfig& post);

/// "start:step:end" (inclusive, values rounded to 1e-12) or a comma list.
/// Throws InvalidArgument unless values lie in [0,1] and strictly increase.
std::vector<double> parse_beta_grid(const std::string& text);

struct SweepRow {
  ExperimentKind experiment = ExperimentKind::DaysOnly;
  rpca::Algorithm solver = rpca::Algorithm::IALM;
  double beta = 0;
  double average_f_measure = 0;
  double converged_fraction = 0;
  std::size_t frames_scored = 0;
};

struct WorkKey {
  std::string group;
  rpca::Algorithm solver = rpca::Algorithm::IALM;
  double beta = 0;
};

struct SweepFailure {
  WorkKey key;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepFailure> failures;
  std::vector<WorkKey> not_converged;  // best iterate used after max_iterations
  /// Filled when SweepOptions::keep_runs; key (group, solver, beta).
  std::map<std::tuple<std::string, rpca::Algorithm, double>, GroupRun> runs;
};

struct SweepOptions {
  int jobs = 0;  // 0: OpenMP default
  bool keep_runs = false;
};

/// Every (group, solver, beta) work item through run_group; average
/// f-measure per (solver, beta) over all scored frames of all groups.
SweepResult run_sweep(std::span<const PreparedGroup> groups, ExperimentKind experiment,
                      std::span<const rpca::SolverConfig> solvers, std::span<const double> beta_grid,
                      const PostprocessConfig& post, const SweepOptions& opts = {});

struct BestConfiguration {
  ExperimentKind experiment;
  rpca::Algorithm solver;
  double beta;
  double average_f_measure;
};

/// Highest average f-measure per experiment; ties go to the smaller beta,
/// then the earlier solver. Throws EmptyResult.
std::vector<BestConfiguration> best_configuration(const SweepResult& result);

nlohmann::json to_json(const SweepResult& r, const nlohmann::json& config_echo);
/// `experiment,solver,beta,average_f_measure,converged_fraction,frames_scored`.
void write_csv(const SweepResult& r, std::ostream& out);

}  // namespace mlrpca::experiments
