#include <doctest.h>

#include <omp.h>

#include "mlrpca/kernels.hpp"
#include "mlrpca/preprocess.hpp"
#include "oracles.hpp"

using namespace mlrpca;
namespace k = mlrpca::kernels;

namespace {

struct Threads {
  explicit Threads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
  int saved;
};

}  // namespace

TEST_CASE("disk offsets") {
  CHECK(k::disk_offsets(0).size() == 1);
  CHECK(k::disk_offsets(1).size() == 5);
  CHECK(k::disk_offsets(2).size() == 13);
  for (const auto& o : k::disk_offsets(4)) CHECK(o.dx * o.dx + o.dy * o.dy <= 16);
}

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
  std::mt19937_64 rng(77);
  for (int threads : {1, 3, 4}) {
    Threads guard(threads);
    for (int t = 0; t < 10; ++t) {
      const int w = 3 + static_cast<int>(rng() % 60), h = 3 + static_cast<int>(rng() % 45);
      const auto img = oracle::random_image(w, h, rng);
      CHECK(k::serial::lbp(img) == k::omp::lbp(img));
      CHECK(k::serial::lbp(img) == oracle::lbp(img));

      const auto kernel = gaussian_kernel(0.5 + (t % 4) * 0.5);
      CHECK(k::serial::convolve_separable(img, kernel) == k::omp::convolve_separable(img, kernel));

      const auto mask = oracle::random_mask(w, h, 0.5, rng);
      for (int r : {0, 1, 3}) {
        const auto se = k::disk_offsets(r);
        CHECK(k::serial::dilate(mask, se) == k::omp::dilate(mask, se));
        CHECK(k::serial::erode(mask, se, true) == k::omp::erode(mask, se, true));
        CHECK(k::serial::erode(mask, se, false) == k::omp::erode(mask, se, false));
        CHECK(k::serial::dilate(mask, se) == oracle::dilate(mask, r));
        CHECK(k::serial::erode(mask, se, false) == oracle::erode(mask, r, false));
      }

      const auto other = oracle::random_image(w, h, rng);
      std::vector<double> a(img.data.size()), b(img.data.size());
      const double beta = (t % 11) / 10.0;
      k::serial::fuse(img.data, other.data, beta, a);
      k::omp::fuse(img.data, other.data, beta, b);
      CHECK(a == b);

      Eigen::MatrixXd m = Eigen::MatrixXd::Random(w, h), s1(w, h), s2(w, h);
      k::serial::soft_threshold(m, 0.3, s1);
      k::omp::soft_threshold(m, 0.3, s2);
      CHECK(s1 == s2);
      for (Eigen::Index i = 0; i < m.size(); ++i) CHECK(s1.data()[i] == oracle::soft(m.data()[i], 0.3));
    }
  }
}
