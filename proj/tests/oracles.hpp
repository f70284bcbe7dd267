#pragma once
// Independent reference implementations used by the unit and acceptance
// tests. None of them calls into the library routine it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <lapacke.h>
#include <unistd.h>

#include "mlrpca/eval.hpp"
#include "mlrpca/image.hpp"

namespace oracle {

struct Svd {
  Eigen::MatrixXd u;   // p x r
  Eigen::VectorXd s;   // r, descending
  Eigen::MatrixXd vt;  // r x n
};

// Thin SVD through LAPACK dgesvd.
inline Svd svd(const Eigen::MatrixXd& m) {
  const lapack_int p = static_cast<lapack_int>(m.rows()), n = static_cast<lapack_int>(m.cols());
  const lapack_int r = std::min(p, n);
  Eigen::MatrixXd a = m;  // column-major copy, overwritten by LAPACK
  Svd out{Eigen::MatrixXd(p, r), Eigen::VectorXd(r), Eigen::MatrixXd(r, n)};
  std::vector<double> superb(static_cast<std::size_t>(std::max<lapack_int>(r, 1)));
  const lapack_int info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'S', 'S', p, n, a.data(), p, out.s.data(), out.u.data(), p,
                                         out.vt.data(), r, superb.data());
  if (info != 0) throw std::runtime_error("dgesvd failed: " + std::to_string(info));
  return out;
}

inline double soft(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

inline Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau) {
  const Svd d = svd(m);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < d.s.size(); ++k) {
    const double s = std::max(d.s(k) - tau, 0.0);
    if (s == 0.0) continue;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, j) += d.u(i, k) * s * d.vt(k, j);
  }
  return out;
}

// LBP written straight from the bit definition.
inline mlrpca::GrayImage lbp(const mlrpca::GrayImage& img) {
  static const int dx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
  static const int dy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
  mlrpca::GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      int code = 0;
      for (int k = 0; k < 8; ++k) {
        const int nx = std::clamp(x + dx[k], 0, img.width - 1);
        const int ny = std::clamp(y + dy[k], 0, img.height - 1);
        if (img.at(nx, ny) >= img.at(x, y)) code += 1 << k;
      }
      out.at(x, y) = code / 255.0;
    }
  return out;
}

inline mlrpca::eval::ConfusionMatrix confusion(const mlrpca::BinaryMask& pred, const mlrpca::BinaryMask& gt) {
  mlrpca::eval::ConfusionMatrix cm;
  for (int y = 0; y < pred.height; ++y)
    for (int x = 0; x < pred.width; ++x) {
      const bool p = pred.at(x, y), g = gt.at(x, y);
      if (p && g) ++cm.tp;
      else if (p) ++cm.fp;
      else if (g) ++cm.fn;
      else ++cm.tn;
    }
  return cm;
}

// Disk morphology by direct neighbourhood scans. Pixels outside the image
// are false for dilation and `outside` for erosion.
inline mlrpca::BinaryMask dilate(const mlrpca::BinaryMask& m, int r) {
  mlrpca::BinaryMask out(m.width, m.height);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      bool hit = false;
      for (int v = -r; v <= r && !hit; ++v)
        for (int u = -r; u <= r && !hit; ++u) {
          if (u * u + v * v > r * r) continue;
          const int sx = x - u, sy = y - v;
          if (sx >= 0 && sy >= 0 && sx < m.width && sy < m.height && m.at(sx, sy)) hit = true;
        }
      out.set(x, y, hit);
    }
  return out;
}

inline mlrpca::BinaryMask erode(const mlrpca::BinaryMask& m, int r, bool outside) {
  mlrpca::BinaryMask out(m.width, m.height);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      bool all = true;
      for (int v = -r; v <= r && all; ++v)
        for (int u = -r; u <= r && all; ++u) {
          if (u * u + v * v > r * r) continue;
          const int sx = x + u, sy = y + v;
          const bool inside = sx >= 0 && sy >= 0 && sx < m.width && sy < m.height;
          if (!(inside ? m.at(sx, sy) : outside)) all = false;
        }
      out.set(x, y, all);
    }
  return out;
}

inline mlrpca::BinaryMask opening(const mlrpca::BinaryMask& m, int r) { return dilate(erode(m, r, true), r); }
inline mlrpca::BinaryMask closing(const mlrpca::BinaryMask& m, int r) { return erode(dilate(m, r), r, true); }

inline mlrpca::GrayImage random_image(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  mlrpca::GrayImage img(w, h);
  for (auto& v : img.data) v = u(rng);
  return img;
}

inline mlrpca::BinaryMask random_mask(int w, int h, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution b(p);
  mlrpca::BinaryMask m(w, h);
  for (auto& v : m.data) v = b(rng) ? 1 : 0;
  return m;
}

// Random union of rectangles; closer to real foreground than pixel noise.
inline mlrpca::BinaryMask random_blobs(int w, int h, int count, std::mt19937_64& rng) {
  mlrpca::BinaryMask m(w, h);
  std::uniform_int_distribution<int> px(0, w - 1), py(0, h - 1), ext(1, std::max(2, std::min(w, h) / 3));
  for (int i = 0; i < count; ++i) {
    const int x0 = px(rng), y0 = py(rng), bw = ext(rng), bh = ext(rng);
    for (int y = y0; y < std::min(h, y0 + bh); ++y)
      for (int x = x0; x < std::min(w, x0 + bw); ++x) m.set(x, y, true);
  }
  return m;
}

inline double rel_fro(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double nb = b.norm();
  return nb == 0.0 ? a.norm() : (a - b).norm() / nb;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("mlrpca_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
