#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "mlrpca/experiments.hpp"
#include "mlrpca/imgio.hpp"
#include "mlrpca/synth.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = mlrpca::cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Small video written by the synth subcommand itself.
fs::path make_video(const oracle::TempDir& dir) {
  const auto r = run({"synth", "--video", "--width", "32", "--height", "24", "--frames", "8", "--out",
                      (dir / "video").string()});
  REQUIRE(r.code == 0);
  return dir / "video" / "manifest.json";
}

}  // namespace

TEST_CASE("help exits 0 with usage") {
  for (auto args : std::vector<std::vector<std::string>>{{"--help"}, {"segment", "--help"}, {"sweep", "-h"}}) {
    const auto r = run(args);
    CHECK(r.code == 0);
    CHECK(r.out.find("Usage") != std::string::npos);
  }
}

TEST_CASE("flag errors exit 2 with usage on stderr") {
  oracle::TempDir dir("cli_flags");
  const auto manifest = make_video(dir);
  const auto beta = run({"segment", "--manifest", manifest.string(), "--beta", "1.5", "--out", (dir / "m").string()});
  CHECK(beta.code == 2);
  CHECK(beta.err.find("[0,1]") != std::string::npos);
  CHECK(beta.err.find("Usage") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "m"));

  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"segment", "--out", "x"}).code == 2);
  CHECK(run({"segment", "--manifest", manifest.string(), "--out", "x", "--solver", "nsa2"}).code == 2);
  CHECK(run({"segment", "--manifest", manifest.string(), "--out", "x", "--lambda", "-3"}).code == 2);
  CHECK(run({"segment", "--manifest", manifest.string(), "--out", "x", "--pre", "day=sharpen"}).code == 2);
  CHECK(run({"segment", "--manifest", manifest.string(), "--out", "x", "--hard-threshold", "1.5"}).code == 2);
  CHECK(run({"sweep", "--manifest-dir", "x", "--out", "r.json", "--experiment", "5"}).code == 2);
  CHECK(run({"sweep", "--manifest-dir", "x", "--out", "r.json", "--beta-grid", "0.5,0.2"}).code == 2);
  CHECK(run({"segment", "--manifest", manifest.string(), "--out", "x", "--tol", "abc"}).code == 2);
}

TEST_CASE("pipeline errors exit 1 naming the stage") {
  oracle::TempDir dir("cli_stage");
  const auto missing = run({"segment", "--manifest", (dir / "nope.json").string(), "--out", (dir / "o").string()});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("stage imgio") != std::string::npos);

  const auto rank = run({"synth", "--rows", "10", "--cols", "4", "--rank", "9", "--out", (dir / "s").string()});
  CHECK(rank.code == 1);
  CHECK(rank.err.find("stage") != std::string::npos);

  const auto manifest = make_video(dir);
  const auto eval = run({"eval", "--pred-dir", (dir / "empty").string(), "--gt-manifest", manifest.string(), "--out",
                         (dir / "e.json").string()});
  CHECK(eval.code == 1);
  CHECK(eval.err.find("stage imgio") != std::string::npos);
}

TEST_CASE("segment then eval on a synthetic video") {
  oracle::TempDir dir("cli_seg");
  const auto manifest = make_video(dir);
  const auto masks = dir / "masks";
  const auto r = run({"segment", "--manifest", manifest.string(), "--scale", "1", "--beta", "0.6", "--solver",
                      "apg-partial", "--out", masks.string(), "--trace", (dir / "trace.csv").string()});
  REQUIRE(r.code == 0);
  const auto m = mlrpca::load_manifest(manifest);
  for (std::size_t i = 0; i < m.frames.size(); ++i) {
    const auto name = mlrpca::experiments::mask_file_name(i, m.frames[i].image_path);
    CHECK(fs::exists(masks / name));
  }
  const auto summary = nlohmann::json::parse(slurp(masks / "summary.json"));
  CHECK(summary["config_echo"]["beta"] == 0.6);
  CHECK(summary["config_echo"]["solver"]["algorithm"] == "apg-partial");
  CHECK(summary["frames"].size() == 8);
  CHECK(slurp(dir / "trace.csv").rfind("iteration,residual,rank,nnz_sparse", 0) == 0);

  const auto e = run({"eval", "--pred-dir", masks.string(), "--gt-manifest", manifest.string(), "--out",
                      (dir / "eval" / "report.json").string()});
  REQUIRE(e.code == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "eval" / "report.json"));
  CHECK(report["per_frame"].size() == 8);
  CHECK(report["summary"]["average_f_measure"] == summary["evaluation"]["summary"]["average_f_measure"]);
  CHECK(fs::exists(dir / "eval" / "report.csv"));
}

TEST_CASE("environment variables back every flag") {
  oracle::TempDir dir("cli_env");
  const auto out = dir / "env";
  ::setenv("MLRPCA_ROWS", "12", 1);
  ::setenv("MLRPCA_COLS", "5", 1);
  ::setenv("MLRPCA_RANK", "1", 1);
  const auto r = run({"synth", "--out", out.string()});
  ::unsetenv("MLRPCA_ROWS");
  ::unsetenv("MLRPCA_COLS");
  ::unsetenv("MLRPCA_RANK");
  REQUIRE(r.code == 0);
  const auto text = slurp(out / "M.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 12);
  CHECK(std::count(text.begin(), text.begin() + text.find('\n'), ',') == 4);

  ::setenv("MLRPCA_BETA", "2", 1);
  const auto bad = run({"segment", "--manifest", "x.json", "--out", (dir / "o").string()});
  ::unsetenv("MLRPCA_BETA");
  CHECK(bad.code == 2);
}

TEST_CASE("sweep writes JSON and CSV reports") {
  oracle::TempDir dir("cli_sweep");
  make_video(dir);
  fs::create_directories(dir / "manifests");
  // manifest paths are relative to the manifest; save a copy with resolved paths
  auto m = mlrpca::load_manifest(dir / "video" / "manifest.json");
  mlrpca::save_manifest(m, dir / "manifests" / "clip.json");
  const auto r = run({"sweep", "--experiment", "1", "--manifest-dir", (dir / "manifests").string(), "--scale", "1",
                      "--solver", "ialm,apg", "--beta-grid", "0.2,0.8", "--out", (dir / "sweep.json").string()});
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "sweep.json"));
  CHECK(report["rows"].size() == 4);
  CHECK(report["config_echo"]["experiment"] == 1);
  const auto csv = slurp(dir / "sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
