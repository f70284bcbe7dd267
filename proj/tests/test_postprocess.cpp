#include <doctest.h>

#include "mlrpca/error.hpp"
#include "mlrpca/postprocess.hpp"
#include "oracles.hpp"

using namespace mlrpca;

namespace {

PostprocessConfig no_area() {
  PostprocessConfig c;
  c.min_component_area = 0;
  return c;
}

BinaryMask disk_mask(int w, int h, double cx, double cy, double r) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r);
  return m;
}

bool subset(const BinaryMask& a, const BinaryMask& b) {
  for (std::size_t i = 0; i < a.data.size(); ++i)
    if (a.data[i] && !b.data[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("hard threshold examples") {
  const std::vector<double> zeros(12, 0.0);
  CHECK(hard_threshold_mask(zeros, {4, 3}, 0.15).count() == 0);
  std::vector<double> one(12, 0.0);
  one[5] = 0.5;
  const auto m1 = hard_threshold_mask(one, {4, 3}, 0.15);
  CHECK(m1.count() == 1);
  CHECK(m1.at(1, 1));
  const std::vector<double> signs{-0.3, 0.1, 0.2};
  const auto m2 = hard_threshold_mask(signs, {3, 1}, 0.15);
  CHECK(m2.at(0, 0));
  CHECK_FALSE(m2.at(1, 0));
  CHECK(m2.at(2, 0));
}

TEST_CASE("hard threshold range and layout checks") {
  const std::vector<double> v(4, 0.2);
  for (double t : {0.0, 1.0, -0.5, 1.5}) {
    try {
      hard_threshold_mask(v, {2, 2}, t);
      FAIL("expected ThresholdOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ThresholdOutOfRange);
    }
  }
  CHECK_THROWS_AS(hard_threshold_mask(v, {3, 2}, 0.5), Error);
}

TEST_CASE("opening removes an isolated pixel") {
  BinaryMask m(15, 15);
  m.set(7, 7, true);
  CHECK(binary_opening(m, 2).count() == 0);
  auto cfg = no_area();
  CHECK(morphological_clean(m, cfg).count() == 0);
}

TEST_CASE("large block survives cleaning unchanged") {
  BinaryMask m(80, 80);
  for (int y = 15; y < 65; ++y)
    for (int x = 15; x < 65; ++x) m.set(x, y, true);
  const auto out = morphological_clean(m, PostprocessConfig{});
  // the disk opening trims the four corners; the closing restores nothing outside
  CHECK(subset(out, m));
  CHECK(out.count() >= m.count() - 4 * 3);
  CHECK(count_components(out) == 1);
}

TEST_CASE("closing fills a 3x3 hole") {
  BinaryMask m(30, 30);
  for (int y = 5; y < 25; ++y)
    for (int x = 5; x < 25; ++x) m.set(x, y, !(x >= 13 && x < 16 && y >= 13 && y < 16));
  const auto closed = binary_closing(m, 4);
  CHECK(closed == oracle::closing(m, 4));
  for (int y = 13; y < 16; ++y)
    for (int x = 13; x < 16; ++x) CHECK(closed.at(x, y));
}

TEST_CASE("opening and closing match the brute-force oracle") {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 40; ++t) {
    const auto m = t % 2 ? oracle::random_mask(21, 17, 0.5, rng) : oracle::random_blobs(21, 17, 4, rng);
    for (int r : {0, 1, 2, 3}) {
      CHECK(binary_opening(m, r) == oracle::opening(m, r));
      CHECK(binary_closing(m, r) == oracle::closing(m, r));
    }
  }
}

TEST_CASE("small components use 8-connectivity") {
  BinaryMask m(10, 10);
  // diagonal chain of 3 pixels is one component
  m.set(1, 1, true);
  m.set(2, 2, true);
  m.set(3, 3, true);
  m.set(8, 8, true);
  CHECK(count_components(m) == 2);
  const auto kept = remove_small_components(m, 2);
  CHECK(kept.count() == 3);
  CHECK_FALSE(kept.at(8, 8));
  CHECK(remove_small_components(m, 0) == m);
  CHECK(remove_small_components(m, 4).count() == 0);
}

TEST_CASE("clean never adds pixels beyond the closing-radius dilation") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 30; ++t) {
    const auto m = oracle::random_blobs(32, 24, 5, rng);
    PostprocessConfig cfg;
    const auto out = morphological_clean(m, cfg);
    CHECK(subset(out, oracle::dilate(m, cfg.closing_radius)));
  }
}

TEST_CASE("clean is idempotent without area filtering") {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 30; ++t) {
    const auto m = t % 3 ? oracle::random_blobs(30, 22, 6, rng) : oracle::random_mask(30, 22, 0.6, rng);
    const auto cfg = no_area();
    const auto once = morphological_clean(m, cfg);
    CHECK(morphological_clean(once, cfg) == once);
  }
}

TEST_CASE("edge stopping is 1 on flat images and dips at a step edge") {
  const auto flat = edge_stopping(GrayImage(20, 20, 0.4));
  for (double v : flat.data) CHECK(v == doctest::Approx(1.0));
  GrayImage step(40, 20, 0.0);
  for (int y = 0; y < 20; ++y)
    for (int x = 20; x < 40; ++x) step.at(x, y) = 1.0;
  const auto g = edge_stopping(step);
  CHECK(g.at(19, 10) < 0.25);
  CHECK(g.at(19, 10) < g.at(16, 10));
  CHECK(g.at(2, 10) > 0.9);
}

TEST_CASE("refine_contour trivial cases") {
  std::mt19937_64 rng(18);
  const auto guide = oracle::random_image(24, 18, rng);
  const auto mask = oracle::random_blobs(24, 18, 3, rng);
  PostprocessConfig cfg;
  cfg.contour_iterations = 0;
  CHECK(refine_contour(mask, guide, cfg) == mask);
  cfg.contour_iterations = 50;
  CHECK(refine_contour(BinaryMask(24, 18), guide, cfg).count() == 0);
  try {
    refine_contour(BinaryMask(24, 17), guide, cfg);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("balloon grows a disk toward a surrounding edge and stops near it") {
  const int n = 64;
  const double c = 31.5;
  GrayImage guide(n, n, 0.0);
  const auto edge = disk_mask(n, n, c, c, 14);
  for (std::size_t i = 0; i < guide.data.size(); ++i) guide.data[i] = edge.data[i] ? 1.0 : 0.0;
  const auto seed = disk_mask(n, n, c, c, 10);
  PostprocessConfig cfg;
  cfg.contour_iterations = 50;
  const auto out = refine_contour(seed, guide, cfg);
  CHECK(out.count() > seed.count());
  CHECK(subset(out, disk_mask(n, n, c, c, 16)));
  CHECK(subset(seed, out));

  // growth is monotone in the number of steps
  std::size_t prev = seed.count();
  for (int it : {5, 10, 20, 40}) {
    cfg.contour_iterations = it;
    const auto step = refine_contour(seed, guide, cfg);
    CHECK(step.count() >= prev);
    prev = step.count();
  }
}

TEST_CASE("postprocess chain") {
  const Size layout{30, 20};
  const std::vector<GrayImage> guides(3, GrayImage(30, 20, 0.5));
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(600, 3);
  for (const auto& m : postprocess(zero, layout, guides, PostprocessConfig{})) CHECK(m.count() == 0);

  Eigen::MatrixXd blob = Eigen::MatrixXd::Zero(600, 1);
  for (int y = 5; y < 15; ++y)
    for (int x = 8; x < 20; ++x) blob(y * 30 + x, 0) = 0.6;
  blob(0, 0) = 0.9;  // stray pixel
  const std::vector<GrayImage> one_guide(1, GrayImage(30, 20, 0.5));
  const auto masks = postprocess(blob, layout, one_guide, PostprocessConfig{});
  REQUIRE(masks.size() == 1);
  CHECK(count_components(masks[0]) == 1);
  CHECK_FALSE(masks[0].at(0, 0));

  PostprocessConfig cfg;
  cfg.contour_iterations = 0;
  const auto plain = postprocess(blob, layout, one_guide, cfg);
  std::vector<double> col(blob.data(), blob.data() + 600);
  CHECK(plain[0] == morphological_clean(hard_threshold_mask(col, layout, cfg.hard_threshold), cfg));
  CHECK(postprocess(blob, layout, one_guide, PostprocessConfig{}) == masks);
}

TEST_CASE("postprocess config validation") {
  PostprocessConfig c;
  CHECK_NOTHROW(c.validate());
  c.hard_threshold = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.opening_radius = -1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.contour_iterations = -1;
  CHECK_THROWS_AS(c.validate(), Error);
}
