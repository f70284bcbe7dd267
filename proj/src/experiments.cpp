#include "mlrpca/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "mlrpca/error.hpp"

namespace mlrpca::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

ExperimentKind experiment_from_number(int n) {
  if (n < 1 || n > 4) throw Error(ErrorCode::InvalidArgument, "experiment must be 1, 2, 3 or 4");
  return static_cast<ExperimentKind>(n);
}

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::DaysOnly: return "days";
    case ExperimentKind::NightsOnly: return "nights";
    case ExperimentKind::MixedTwoPipelines: return "mixed-two-pipelines";
    case ExperimentKind::MixedOnePipeline: return "mixed-one-pipeline";
  }
  return "unknown";
}

PreprocessConfig preprocess_for(ExperimentKind kind, double sigma) {
  PreprocessConfig cfg;
  cfg.day = Pipeline::from_kind(PipelineKind::EqualizeOnly, sigma);
  cfg.night = kind == ExperimentKind::MixedOnePipeline ? Pipeline::from_kind(PipelineKind::EqualizeOnly, sigma)
                                                       : Pipeline::from_kind(PipelineKind::GaussianOnly, sigma);
  return cfg;
}

std::string mask_file_name(std::size_t index, const fs::path& image_path) {
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%04zu_", index);
  return prefix + image_path.stem().string() + ".png";
}

SolveGroup group_from_manifest(const SequenceManifest& m) {
  SolveGroup g;
  g.id = m.sequence_id;
  for (std::size_t i = 0; i < m.frames.size(); ++i) {
    GroupFrame f;
    f.mask_name = mask_file_name(i, m.frames[i].image_path);
    f.id = m.sequence_id + "/" + fs::path(f.mask_name).stem().string();
    f.entry = m.frames[i];
    f.kind = m.kind;
    g.frames.push_back(std::move(f));
  }
  return g;
}

std::vector<SolveGroup> group_sequences(std::span<const SequenceManifest> manifests, ExperimentKind kind) {
  if (manifests.empty()) throw Error(ErrorCode::EmptySequence, "no manifests given");
  std::vector<const SequenceManifest*> days, nights;
  for (const auto& m : manifests) (m.kind == SequenceKind::Day ? days : nights).push_back(&m);

  std::vector<SolveGroup> groups;
  switch (kind) {
    case ExperimentKind::DaysOnly:
      for (auto* m : days) groups.push_back(group_from_manifest(*m));
      break;
    case ExperimentKind::NightsOnly:
      for (auto* m : nights) groups.push_back(group_from_manifest(*m));
      break;
    case ExperimentKind::MixedTwoPipelines:
    case ExperimentKind::MixedOnePipeline:
      if (days.size() != nights.size())
        throw Error(ErrorCode::UnpairedSequence, std::to_string(days.size()) + " day sequences vs " +
                                                     std::to_string(nights.size()) + " night sequences");
      for (std::size_t i = 0; i < days.size(); ++i) {
        auto g = group_from_manifest(*days[i]);
        auto night = group_from_manifest(*nights[i]);
        g.id += "+" + night.id;
        for (auto& f : night.frames) g.frames.push_back(std::move(f));
        groups.push_back(std::move(g));
      }
      break;
  }
  return groups;
}

std::vector<SequenceManifest> load_manifest_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::MissingFile, "manifest directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<SequenceManifest> out;
  for (const auto& f : files) out.push_back(load_manifest(f));
  if (out.empty()) throw Error(ErrorCode::EmptySequence, "no *.json manifests in " + dir.string());
  return out;
}

json to_json(const PipelineConfig& cfg) {
  json solver = {{"algorithm", rpca::to_string(cfg.solver.algorithm)},
                 {"lambda", cfg.solver.lambda ? json(*cfg.solver.lambda) : json("auto")},
                 {"tolerance", cfg.solver.tolerance},
                 {"max_iterations", cfg.solver.max_iterations},
                 {"partial_rank_guess", cfg.solver.partial_rank_guess},
                 {"ialm_rho", cfg.solver.ialm_rho},
                 {"seed", cfg.solver.seed}};
  json post = {{"hard_threshold", cfg.post.hard_threshold},   {"opening_radius", cfg.post.opening_radius},
               {"closing_radius", cfg.post.closing_radius},   {"min_component_area", cfg.post.min_component_area},
               {"contour_iterations", cfg.post.contour_iterations}, {"balloon", cfg.post.balloon},
               {"edge_alpha", 100.0},                         {"edge_sigma", 2.0}};
  json pre = {{"day", cfg.pre.day.name()}, {"night", cfg.pre.night.name()}, {"sigma", cfg.pre.day.sigma}};
  json size = cfg.working_size ? json{{"width", cfg.working_size->width}, {"height", cfg.working_size->height}}
                               : json{{"scale", cfg.scale}};
  return {{"preprocess", pre},
          {"solver", solver},
          {"postprocess", post},
          {"working_resolution", size},
          {"lbp", "radius 1, 8 neighbours, neighbour >= centre, clockwise from top-left, /255"},
          {"luma", "0.299 R + 0.587 G + 0.114 B"}};
}

PreparedGroup prepare_group(const SolveGroup& group, const PipelineConfig& cfg) {
  if (group.frames.empty()) throw Error(ErrorCode::EmptySequence, "group " + group.id + " has no frames");
  PreparedGroup out;
  out.id = group.id;
  out.layout = cfg.working_size ? *cfg.working_size
                                : working_size_for(probe_size(group.frames.front().entry.image_path), cfg.scale);
  for (const auto& f : group.frames) {
    const auto gray = load_image(f.entry.image_path, out.layout);
    out.layers.push_back(compute_layers(run_pipeline(gray, cfg.pre.for_kind(f.kind))));
    out.guides.push_back(gray);
    out.ground_truth.push_back(f.entry.gt_path ? std::optional(load_mask(*f.entry.gt_path, out.layout)) : std::nullopt);
    out.frame_ids.push_back(f.id);
    out.mask_names.push_back(f.mask_name);
  }
  return out;
}

GroupRun run_group(const PreparedGroup& group, double beta, const rpca::SolverConfig& solver,
                   const PostprocessConfig& post) {
  const FusionWeight w(beta);
  std::vector<GrayImage> fused;
  fused.reserve(group.layers.size());
  for (const auto& l : group.layers) fused.push_back(fuse_layers(l.texture, l.color, w));
  const auto m = assemble_matrix(fused);
  const auto d = rpca::solve(m, solver);

  GroupRun run;
  run.masks = postprocess(d.sparse, group.layout, group.guides, post);
  run.converged = d.converged;
  run.iterations = d.iterations_used;
  run.residual = d.final_residual;
  run.trace = d.trace;
  for (std::size_t i = 0; i < run.masks.size(); ++i) {
    if (!group.ground_truth[i]) continue;
    eval::FrameScore s;
    s.id = group.frame_ids[i];
    s.cm = eval::confusion(run.masks[i], *group.ground_truth[i]);
    s.precision = eval::precision(s.cm);
    s.recall = eval::recall(s.cm);
    s.f_measure = eval::f_measure(s.cm);
    run.scores.push_back(std::move(s));
  }
  return run;
}

std::vector<double> parse_beta_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw Error(ErrorCode::InvalidArgument, "bad beta grid value \"" + s + "\"");
    return v;
  };
  auto round12 = [](double v) { return std::round(v * 1e12) / 1e12; };

  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw Error(ErrorCode::InvalidArgument, "beta grid must be start:step:end");
    const double start = number(parts[0]), step = number(parts[1]), end = number(parts[2]);
    if (!(step > 0)) throw Error(ErrorCode::InvalidArgument, "beta grid step must be > 0");
    const auto count = static_cast<long>(std::floor((end - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) grid.push_back(round12(start + static_cast<double>(i) * step));
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) grid.push_back(number(p));
  }
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "beta grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw Error(ErrorCode::InvalidArgument, "beta values must lie in [0,1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "beta grid must strictly increase");
  }
  return grid;
}

SweepResult run_sweep(std::span<const PreparedGroup> groups, ExperimentKind experiment,
                      std::span<const rpca::SolverConfig> solvers, std::span<const double> beta_grid,
                      const PostprocessConfig& post, const SweepOptions& opts) {
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    FusionWeight check(beta_grid[i]);
    if (i > 0 && !(beta_grid[i] > beta_grid[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "beta grid must strictly increase");
  }
  post.validate();
  for (const auto& s : solvers) s.validate();

  struct Slot {
    std::optional<GroupRun> run;
    std::string error;
  };
  const std::size_t n_groups = groups.size(), n_solvers = solvers.size(), n_betas = beta_grid.size();
  const auto n_items = static_cast<std::ptrdiff_t>(n_groups * n_solvers * n_betas);
  std::vector<Slot> slots(static_cast<std::size_t>(n_items));

  const int threads = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
  // item index = (solver * n_betas + beta) * n_groups + group
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t item = 0; item < n_items; ++item) {
    const auto g = static_cast<std::size_t>(item) % n_groups;
    const auto b = (static_cast<std::size_t>(item) / n_groups) % n_betas;
    const auto s = static_cast<std::size_t>(item) / (n_groups * n_betas);
    try {
      slots[item].run = run_group(groups[g], beta_grid[b], solvers[s], post);
    } catch (const std::exception& e) {
      slots[item].error = e.what();
    }
  }

  SweepResult result;
  for (std::size_t s = 0; s < n_solvers; ++s)
    for (std::size_t b = 0; b < n_betas; ++b) {
      SweepRow row;
      row.experiment = experiment;
      row.solver = solvers[s].algorithm;
      row.beta = beta_grid[b];
      double sum = 0.0;
      std::size_t converged = 0;
      for (std::size_t g = 0; g < n_groups; ++g) {
        auto& slot = slots[(s * n_betas + b) * n_groups + g];
        const WorkKey key{groups[g].id, solvers[s].algorithm, beta_grid[b]};
        if (!slot.run) {
          result.failures.push_back({key, slot.error});
          continue;
        }
        if (slot.run->converged)
          ++converged;
        else
          result.not_converged.push_back(key);
        for (const auto& sc : slot.run->scores) sum += sc.f_measure;
        row.frames_scored += slot.run->scores.size();
        if (opts.keep_runs) result.runs.emplace(std::tuple(key.group, key.solver, key.beta), std::move(*slot.run));
      }
      row.average_f_measure = row.frames_scored ? sum / static_cast<double>(row.frames_scored) : 0.0;
      row.converged_fraction = n_groups ? static_cast<double>(converged) / static_cast<double>(n_groups) : 0.0;
      result.rows.push_back(row);
    }
  return result;
}

std::vector<BestConfiguration> best_configuration(const SweepResult& result) {
  if (result.rows.empty()) throw Error(ErrorCode::EmptyResult, "sweep produced no rows");
  std::map<ExperimentKind, const SweepRow*> best;
  auto better = [](const SweepRow& a, const SweepRow& b) {
    if (a.average_f_measure != b.average_f_measure) return a.average_f_measure > b.average_f_measure;
    if (a.beta != b.beta) return a.beta < b.beta;
    return a.solver < b.solver;
  };
  for (const auto& row : result.rows) {
    auto& slot = best[row.experiment];
    if (!slot || better(row, *slot)) slot = &row;
  }
  std::vector<BestConfiguration> out;
  for (const auto& [kind, row] : best) out.push_back({kind, row->solver, row->beta, row->average_f_measure});
  return out;
}

json to_json(const SweepResult& r, const json& config_echo) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"experiment", static_cast<int>(row.experiment)},
                    {"solver", rpca::to_string(row.solver)},
                    {"beta", row.beta},
                    {"average_f_measure", row.average_f_measure},
                    {"converged_fraction", row.converged_fraction},
                    {"frames_scored", row.frames_scored}});
  auto key_json = [](const WorkKey& k) {
    return json{{"group", k.group}, {"solver", rpca::to_string(k.solver)}, {"beta", k.beta}};
  };
  json failures = json::array();
  for (const auto& f : r.failures) {
    auto j = key_json(f.key);
    j["error"] = f.message;
    failures.push_back(std::move(j));
  }
  json not_converged = json::array();
  for (const auto& k : r.not_converged) not_converged.push_back(key_json(k));
  json best = json::array();
  if (!r.rows.empty())
    for (const auto& b : best_configuration(r))
      best.push_back({{"experiment", static_cast<int>(b.experiment)},
                      {"solver", rpca::to_string(b.solver)},
                      {"beta", b.beta},
                      {"average_f_measure", b.average_f_measure}});
  return {{"rows", rows},
          {"best", best},
          {"failed_groups", failures},
          {"not_converged", not_converged},
          {"config_echo", config_echo}};
}

void write_csv(const SweepResult& r, std::ostream& out) {
  const auto old = out.precision(17);
  out << "experiment,solver,beta,average_f_measure,converged_fraction,frames_scored\n";
  for (const auto& row : r.rows)
    out << static_cast<int>(row.experiment) << ',' << rpca::to_string(row.solver) << ',' << row.beta << ','
        << row.average_f_measure << ',' << row.converged_fraction << ',' << row.frames_scored << '\n';
  out.precision(old);
}

}  // namespace mlrpca::experiments
