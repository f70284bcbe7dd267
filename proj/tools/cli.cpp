#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlrpca/error.hpp"
#include "mlrpca/eval.hpp"
#include "mlrpca/experiments.hpp"
#include "mlrpca/imgio.hpp"
#include "mlrpca/rpca.hpp"
#include "mlrpca/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mlrpca::cli {
namespace {

struct FlagError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StageError : std::runtime_error {
  StageError(std::string stage, const std::string& what) : std::runtime_error(what), stage(std::move(stage)) {}
  std::string stage;
};

std::string stage_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::MissingFile:
    case ErrorCode::ParseError:
    case ErrorCode::EmptySequence:
    case ErrorCode::DecodeError:
    case ErrorCode::ZeroSize: return "imgio";
    case ErrorCode::NonPositiveSigma: return "preprocess";
    case ErrorCode::ImageTooSmall:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::TooFewFrames: return "features";
    case ErrorCode::ZeroDimension:
    case ErrorCode::NegativeTau:
    case ErrorCode::SvdFailure:
    case ErrorCode::RankOutOfBounds:
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::NonFiniteInput: return "rpca";
    case ErrorCode::ThresholdOutOfRange: return "postprocess";
    case ErrorCode::NoGroundTruth: return "eval";
    case ErrorCode::UnpairedSequence:
    case ErrorCode::FractionOutOfRange:
    case ErrorCode::EmptyResult: return "experiments";
    case ErrorCode::InvalidArgument: return "config";
    case ErrorCode::IoError: return "output";
  }
  return "pipeline";
}

// Runs `fn`, tagging any failure with `stage` (or, when empty, the stage the
// error code belongs to).
template <class Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw StageError(stage.empty() ? stage_of(e.code()) : stage, e.what());
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage.empty() ? "pipeline" : stage, e.what());
  }
}

struct Options {
  // pre-processing
  std::vector<std::string> pre;
  double sigma = 1.0;
  // solver
  std::string solver = "ialm";
  std::string lambda = "auto";
  double tol = rpca::SolverConfig{}.tolerance;
  int max_iter = rpca::SolverConfig{}.max_iterations;
  int rank_guess = rpca::SolverConfig{}.partial_rank_guess;
  std::uint64_t seed = rpca::SolverConfig{}.seed;
  // post-processing
  PostprocessConfig post;
  // working size
  int scale = 8;
  int width = 0, height = 0;
  int jobs = 0;
  std::string trace;
  // segment
  std::string manifest;
  double beta = 0.5;
  std::string out;
  // sweep
  int experiment = 1;
  std::string manifest_dir;
  std::string beta_grid = "0:0.05:1";
  std::string csv;
  // eval
  std::string pred_dir, gt_manifest;
  // synth
  int rows = 200, cols = 50, rank = 2;
  double sparsity = 0.05, magnitude = 1.0;
  std::uint64_t synth_seed = 7;
  bool video = false;
  int frames = 30;
};

CLI::Validator unit_interval() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          const double v = std::stod(s);
          if (v >= 0.0 && v <= 1.0) return {};
        } catch (const std::exception&) {
        }
        return "beta must lie in [0,1], got " + s;
      },
      "in [0,1]");
}

void add_pre_flags(CLI::App* app, Options& o) {
  app->add_option("--pre", o.pre, "Pre-processing per kind: day=equalize|gaussian|none, night=...")
      ->delimiter(',');
  app->add_option("--sigma", o.sigma, "Gaussian sigma")->capture_default_str();
}

void add_solver_flags(CLI::App* app, Options& o, bool list) {
  app->add_option("--solver", o.solver, list ? "Comma-separated solvers: ealm,ialm,apg,apg-partial" : "ealm|ialm|apg|apg-partial")
      ->capture_default_str();
  app->add_option("--lambda", o.lambda, "auto or a positive value")->capture_default_str();
  app->add_option("--tol", o.tol, "Relative residual tolerance")->capture_default_str();
  app->add_option("--max-iter", o.max_iter, "Iteration cap")->capture_default_str();
  app->add_option("--rank-guess", o.rank_guess, "Initial rank for apg-partial")->capture_default_str();
  app->add_option("--seed", o.seed, "Solver RNG seed")->capture_default_str();
}

void add_post_flags(CLI::App* app, Options& o) {
  app->add_option("--hard-threshold", o.post.hard_threshold, "Threshold on |S|")->capture_default_str();
  app->add_option("--open-radius", o.post.opening_radius)->capture_default_str();
  app->add_option("--close-radius", o.post.closing_radius)->capture_default_str();
  app->add_option("--min-area", o.post.min_component_area)->capture_default_str();
  app->add_option("--contour-iters", o.post.contour_iterations)->capture_default_str();
  app->add_option("--balloon", o.post.balloon)->capture_default_str();
}

void add_size_flags(CLI::App* app, Options& o) {
  app->add_option("--scale", o.scale, "Working size = source size / scale")->capture_default_str();
  app->add_option("--width", o.width, "Working width (with --height, overrides --scale)");
  app->add_option("--height", o.height, "Working height");
}

void add_jobs_flag(CLI::App* app, Options& o) {
  app->add_option("--jobs", o.jobs, "Worker threads (0: all)")->capture_default_str();
}

std::string env_name(const std::string& flag) {
  std::string s = "MLRPCA_";
  for (char c : flag) s += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Every named flag also reads MLRPCA_<FLAG> from the environment.
void bind_env(CLI::App& app) {
  for (CLI::App* sub : app.get_subcommands({})) {
    for (CLI::Option* opt : sub->get_options()) {
      const std::string name = opt->get_single_name();
      if (name.empty() || name == "help") continue;
      opt->envname(env_name(name));
    }
  }
}

// CLI11 drops environment values that fail validation; report them instead.
void check_env(const CLI::App& app) {
  for (const CLI::App* sub : app.get_subcommands()) {
    for (const CLI::Option* opt : sub->get_options()) {
      const std::string env = opt->get_envname();
      if (env.empty() || opt->count() > 0) continue;
      if (const char* v = std::getenv(env.c_str()); v && *v)
        throw FlagError("invalid value in " + env + ": " + v + " (" + opt->get_name() + ")");
    }
  }
}

PreprocessConfig build_pre(const Options& o, PreprocessConfig base) {
  base.day.sigma = o.sigma;
  base.night.sigma = o.sigma;
  for (const auto& item : o.pre) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw FlagError("--pre expects day=<pipeline> or night=<pipeline>, got " + item);
    const std::string key = item.substr(0, eq);
    Pipeline p;
    try {
      p = parse_pipeline(item.substr(eq + 1), o.sigma);
    } catch (const Error& e) {
      throw FlagError(std::string("--pre: ") + e.what());
    }
    if (key == "day") base.day = p;
    else if (key == "night") base.night = p;
    else throw FlagError("--pre key must be day or night, got " + key);
  }
  return base;
}

rpca::SolverConfig build_solver(const Options& o, const std::string& name) {
  rpca::SolverConfig s;
  try {
    s.algorithm = rpca::parse_algorithm(name);
  } catch (const Error& e) {
    throw FlagError(std::string("--solver: ") + e.what());
  }
  if (o.lambda != "auto") {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(o.lambda, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != o.lambda.size() || !(v > 0)) throw FlagError("--lambda must be auto or a positive number, got " + o.lambda);
    s.lambda = v;
  }
  s.tolerance = o.tol;
  s.max_iterations = o.max_iter;
  s.partial_rank_guess = o.rank_guess;
  s.seed = o.seed;
  try {
    s.validate();
  } catch (const Error& e) {
    throw FlagError(e.what());
  }
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

experiments::PipelineConfig build_pipeline(const Options& o, PreprocessConfig base_pre) {
  experiments::PipelineConfig cfg;
  cfg.pre = build_pre(o, std::move(base_pre));
  const auto names = split_list(o.solver);
  cfg.solver = build_solver(o, names.empty() ? std::string() : names.front());
  cfg.post = o.post;
  try {
    cfg.post.validate();
  } catch (const Error& e) {
    throw FlagError(e.what());
  }
  if ((o.width > 0) != (o.height > 0)) throw FlagError("--width and --height must be given together");
  if (o.width > 0) cfg.working_size = Size{o.width, o.height};
  if (o.scale < 1) throw FlagError("--scale must be >= 1");
  cfg.scale = o.scale;
  if (o.jobs < 0) throw FlagError("--jobs must be >= 0");
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  staged("output", [&] {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    f << text;
    if (!f) throw Error(ErrorCode::IoError, "write failed for " + path.string());
  });
}

fs::path csv_path_for(const Options& o) {
  if (!o.csv.empty()) return o.csv;
  fs::path p = o.out;
  p.replace_extension(".csv");
  return p;
}

int run_segment(const Options& o, std::ostream& out) {
  const auto cfg = build_pipeline(o, PreprocessConfig{});
  if (o.jobs > 0) omp_set_num_threads(o.jobs);

  const auto manifest = staged("imgio", [&] { return load_manifest(o.manifest); });
  const auto group = experiments::group_from_manifest(manifest);
  const auto prepared = staged("", [&] { return experiments::prepare_group(group, cfg); });
  const auto run = staged("", [&] { return experiments::run_group(prepared, o.beta, cfg.solver, cfg.post); });

  const fs::path dir = o.out;
  staged("output", [&] {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < run.masks.size(); ++i) save_mask(run.masks[i], dir / prepared.mask_names[i]);
  });

  json echo = experiments::to_json(cfg);
  echo["beta"] = o.beta;
  json summary;
  summary["sequence_id"] = manifest.sequence_id;
  summary["kind"] = std::string(to_string(manifest.kind));
  summary["working_size"] = {{"width", prepared.layout.width}, {"height", prepared.layout.height}};
  summary["frames"] = json::array();
  for (std::size_t i = 0; i < prepared.frame_ids.size(); ++i)
    summary["frames"].push_back({{"id", prepared.frame_ids[i]}, {"mask", prepared.mask_names[i]}});
  summary["solver"] = {{"converged", run.converged}, {"iterations", run.iterations}, {"final_residual", run.residual}};
  summary["config_echo"] = echo;

  const bool any_gt = std::any_of(prepared.ground_truth.begin(), prepared.ground_truth.end(),
                                  [](const auto& g) { return g.has_value(); });
  if (any_gt) {
    std::vector<eval::FrameInput> inputs;
    for (std::size_t i = 0; i < run.masks.size(); ++i)
      inputs.push_back({prepared.frame_ids[i], run.masks[i], prepared.ground_truth[i]});
    const auto rep = staged("eval", [&] { return eval::report(inputs, echo); });
    summary["evaluation"] = eval::to_json(rep);
    out << "average f-measure " << rep.average_f_measure << " over " << rep.per_frame.size() << " frames\n";
  }
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  if (!o.trace.empty()) {
    rpca::Decomposition d;
    d.trace = run.trace;
    std::ostringstream csv;
    rpca::write_trace_csv(d, csv);
    write_text(o.trace, csv.str());
  }
  out << run.masks.size() << " masks written to " << dir.string() << (run.converged ? "" : " (solver did not converge)")
      << "\n";
  return 0;
}

int run_sweep(const Options& o, std::ostream& out) {
  experiments::ExperimentKind kind;
  try {
    kind = experiments::experiment_from_number(o.experiment);
  } catch (const Error& e) {
    throw FlagError(std::string("--experiment: ") + e.what());
  }
  auto cfg = build_pipeline(o, experiments::preprocess_for(kind, o.sigma));
  std::vector<rpca::SolverConfig> solvers;
  for (const auto& name : split_list(o.solver)) solvers.push_back(build_solver(o, name));
  if (solvers.empty()) throw FlagError("--solver lists no solver");
  std::vector<double> grid;
  try {
    grid = experiments::parse_beta_grid(o.beta_grid);
  } catch (const Error& e) {
    throw FlagError(std::string("--beta-grid: ") + e.what());
  }

  const auto manifests = staged("imgio", [&] { return experiments::load_manifest_dir(o.manifest_dir); });
  const auto groups = staged("experiments", [&] { return experiments::group_sequences(manifests, kind); });
  std::vector<experiments::PreparedGroup> prepared;
  for (const auto& g : groups) prepared.push_back(staged("", [&] { return experiments::prepare_group(g, cfg); }));

  experiments::SweepOptions sopts;
  sopts.jobs = o.jobs;
  const auto result = staged("experiments", [&] {
    return experiments::run_sweep(prepared, kind, solvers, grid, cfg.post, sopts);
  });

  json echo = experiments::to_json(cfg);
  echo["experiment"] = o.experiment;
  echo["beta_grid"] = grid;
  echo["solvers"] = json::array();
  for (const auto& s : solvers) echo["solvers"].push_back(std::string(rpca::to_string(s.algorithm)));
  write_text(o.out, experiments::to_json(result, echo).dump(2) + "\n");
  std::ostringstream csv;
  experiments::write_csv(result, csv);
  write_text(csv_path_for(o), csv.str());

  if (!result.rows.empty()) {
    for (const auto& b : experiments::best_configuration(result))
      out << "experiment " << static_cast<int>(b.experiment) << ": best " << rpca::to_string(b.solver) << " beta "
          << b.beta << " f " << b.average_f_measure << "\n";
  }
  if (!result.failures.empty()) out << result.failures.size() << " work items failed; see report\n";
  return 0;
}

int run_eval(const Options& o, std::ostream& out) {
  const auto manifest = staged("imgio", [&] { return load_manifest(o.gt_manifest); });
  std::vector<eval::FrameInput> inputs;
  staged("imgio", [&] {
    for (std::size_t i = 0; i < manifest.frames.size(); ++i) {
      const auto& f = manifest.frames[i];
      const std::string name = experiments::mask_file_name(i, f.image_path);
      const fs::path pred_path = fs::path(o.pred_dir) / name;
      const Size size = probe_size(pred_path);
      eval::FrameInput in{manifest.sequence_id + "/" + fs::path(name).stem().string(), load_mask(pred_path, size), std::nullopt};
      if (f.gt_path) in.gt = load_mask(*f.gt_path, size);
      inputs.push_back(std::move(in));
    }
  });
  json echo;
  echo["gt_manifest"] = o.gt_manifest;
  echo["pred_dir"] = o.pred_dir;
  echo["resolution"] = "ground truth resampled (nearest neighbour) to each prediction's size";
  const auto rep = staged("eval", [&] { return eval::report(inputs, echo); });
  write_text(o.out, eval::to_json(rep).dump(2) + "\n");
  std::ostringstream csv;
  eval::write_csv(rep, csv);
  write_text(csv_path_for(o), csv.str());
  out << "average f-measure " << rep.average_f_measure << " over " << rep.per_frame.size() << " frames\n";
  return 0;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::string s;
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) s += ',';
      s += buf;
    }
    s += '\n';
  }
  return s;
}

int run_synth(const Options& o, std::ostream& out) {
  const fs::path dir = o.out;
  if (o.video) {
    synth::VideoOptions vo;
    if (o.width > 0) vo.width = o.width;
    if (o.height > 0) vo.height = o.height;
    vo.frames = o.frames;
    vo.seed = o.synth_seed;
    const auto video = staged("experiments", [&] { return synth::generate_video(vo); });
    const auto path = staged("output", [&] { return synth::write_video(video, dir, "synthetic"); });
    out << video.frames.size() << " frames written; manifest " << path.string() << "\n";
    return 0;
  }
  const auto inst = staged("experiments", [&] {
    return synth::generate(o.rows, o.cols, o.rank, o.sparsity, o.magnitude, o.synth_seed);
  });
  write_text(dir / "M.csv", matrix_csv(inst.m));
  write_text(dir / "L0.csv", matrix_csv(inst.low_rank));
  write_text(dir / "S0.csv", matrix_csv(inst.sparse));
  out << "M, L0, S0 (" << o.rows << "x" << o.cols << ") written to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Multi-layer RPCA background subtraction", "mlrpca"};
  app.require_subcommand(1);

  auto* seg = app.add_subcommand("segment", "Segment one sequence into foreground masks");
  seg->add_option("--manifest", o.manifest, "Sequence manifest (JSON)")->required();
  seg->add_option("--beta", o.beta, "Texture weight in [0,1]")->check(unit_interval())->capture_default_str();
  seg->add_option("--out", o.out, "Output directory for masks and summary.json")->required();
  seg->add_option("--trace", o.trace, "Write the solver convergence trace CSV here");
  add_pre_flags(seg, o);
  add_solver_flags(seg, o, false);
  add_post_flags(seg, o);
  add_size_flags(seg, o);
  add_jobs_flag(seg, o);

  auto* sweep = app.add_subcommand("sweep", "Beta x solver sweep for one experiment");
  sweep->add_option("--experiment", o.experiment, "1 days, 2 nights, 3 mixed two pipelines, 4 mixed one pipeline")
      ->check(CLI::Range(1, 4))
      ->capture_default_str();
  sweep->add_option("--manifest-dir", o.manifest_dir, "Directory of sequence manifests")->required();
  sweep->add_option("--beta-grid", o.beta_grid, "start:step:end or a comma list")->capture_default_str();
  sweep->add_option("--out", o.out, "Report JSON path")->required();
  sweep->add_option("--csv", o.csv, "Report CSV path (default: --out with .csv)");
  add_pre_flags(sweep, o);
  add_solver_flags(sweep, o, true);
  add_post_flags(sweep, o);
  add_size_flags(sweep, o);
  add_jobs_flag(sweep, o);

  auto* ev = app.add_subcommand("eval", "Score predicted masks against ground truth");
  ev->add_option("--pred-dir", o.pred_dir, "Directory of predicted masks")->required();
  ev->add_option("--gt-manifest", o.gt_manifest, "Manifest with ground-truth masks")->required();
  ev->add_option("--out", o.out, "Report JSON path")->required();
  ev->add_option("--csv", o.csv, "Report CSV path (default: --out with .csv)");

  auto* syn = app.add_subcommand("synth", "Write a synthetic low-rank plus sparse instance or video");
  syn->add_option("--rows", o.rows)->capture_default_str();
  syn->add_option("--cols", o.cols)->capture_default_str();
  syn->add_option("--rank", o.rank)->capture_default_str();
  syn->add_option("--sparsity", o.sparsity, "Fraction of corrupted entries")->capture_default_str();
  syn->add_option("--magnitude", o.magnitude)->capture_default_str();
  syn->add_option("--seed", o.synth_seed)->capture_default_str();
  syn->add_option("--out", o.out, "Output directory")->required();
  syn->add_flag("--video", o.video, "Write the moving-block video instead of a matrix");
  syn->add_option("--frames", o.frames, "Video frames")->capture_default_str();
  syn->add_option("--width", o.width, "Video width");
  syn->add_option("--height", o.height, "Video height");

  bind_env(app);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const CLI::App* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    check_env(app);
    if (*seg) return run_segment(o, out);
    if (*sweep) return run_sweep(o, out);
    if (*ev) return run_eval(o, out);
    return run_synth(o, out);
  } catch (const FlagError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const StageError& e) {
    err << "error in stage " << e.stage << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mlrpca::cli
