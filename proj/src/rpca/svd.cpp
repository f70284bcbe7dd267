#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "detail.hpp"
#include "mlrpca/error.hpp"
#include "mlrpca/kernels.hpp"

namespace mlrpca::rpca {

namespace detail {

Svd full_svd(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw Error(ErrorCode::SvdFailure, "BDCSVD did not converge");
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Thresholded shrink_triplets(const Eigen::MatrixXd& u, const Eigen::VectorXd& sigma, const Eigen::MatrixXd& v, double tau) {
  int r = 0;
  while (r < sigma.size() && sigma(r) > tau) ++r;
  Thresholded out;
  out.rank = r;
  if (r == 0) {
    out.value = Eigen::MatrixXd::Zero(u.rows(), v.rows());
    return out;
  }
  const Eigen::VectorXd shrunk = sigma.head(r).array() - tau;
  out.value = u.leftCols(r) * shrunk.asDiagonal() * v.leftCols(r).transpose();
  return out;
}

Thresholded svt_full(const Eigen::MatrixXd& m, double tau) {
  const auto s = full_svd(m);
  return shrink_triplets(s.u, s.sigma, s.v, tau);
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  if (svd.info() != Eigen::Success) throw Error(ErrorCode::SvdFailure, "BDCSVD did not converge");
  return svd.singularValues()(0);
}

Eigen::Index count_nonzero(const Eigen::MatrixXd& m) { return (m.array() != 0.0).count(); }

}  // namespace detail

double soft_threshold(double x, double tau) {
  if (tau < 0) throw Error(ErrorCode::NegativeTau, "tau = " + std::to_string(tau));
  const double mag = std::max(std::abs(x) - tau, 0.0);
  return (x < 0 && mag > 0) ? -mag : mag;
}

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& m, double tau) {
  if (tau < 0) throw Error(ErrorCode::NegativeTau, "tau = " + std::to_string(tau));
  Eigen::MatrixXd out;
  kernels::omp::soft_threshold(m, tau, out);
  return out;
}

Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau) {
  if (tau < 0) throw Error(ErrorCode::NegativeTau, "tau = " + std::to_string(tau));
  if (!m.allFinite()) throw Error(ErrorCode::NonFiniteInput, "svt input has non-finite entries");
  return detail::svt_full(m, tau).value;
}

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

constexpr int kOversampling = 10;
constexpr int kMinPowerIterations = 2;
constexpr int kMaxPowerIterations = 300;
constexpr double kResidualTolerance = 1e-10;

}  // namespace

PartialSvd partial_svd(const Eigen::MatrixXd& m, int k, std::mt19937_64& rng) {
  const Eigen::Index min_dim = std::min(m.rows(), m.cols());
  if (k < 1 || k > min_dim)
    throw Error(ErrorCode::RankOutOfBounds,
                "k = " + std::to_string(k) + " outside [1, " + std::to_string(min_dim) + "]");
  if (!m.allFinite()) throw Error(ErrorCode::NonFiniteInput, "partial_svd input has non-finite entries");

  const Eigen::Index sketch = std::min<Eigen::Index>(k + kOversampling, min_dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd omega(m.cols(), sketch);
  for (Eigen::Index j = 0; j < omega.cols(); ++j)
    for (Eigen::Index i = 0; i < omega.rows(); ++i) omega(i, j) = normal(rng);

  Eigen::MatrixXd q = orthonormal_basis(m * omega);
  PartialSvd out;
  for (int iter = 0;; ++iter) {
    if (iter >= kMinPowerIterations || sketch == min_dim) {
      // Rayleigh-Ritz on the current subspace
      const Eigen::MatrixXd b = q.transpose() * m;  // sketch x n
      Eigen::BDCSVD<Eigen::MatrixXd> small(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (small.info() != Eigen::Success) throw Error(ErrorCode::SvdFailure, "BDCSVD did not converge");
      out.u = q * small.matrixU().leftCols(k);
      out.sigma = small.singularValues().head(k);
      out.v = small.matrixV().leftCols(k);

      const double top = out.sigma(0);
      const Eigen::MatrixXd resid = m * out.v - out.u * out.sigma.asDiagonal();
      const double worst = resid.colwise().norm().maxCoeff();
      if (top == 0.0 || worst <= kResidualTolerance * top) return out;
      if (sketch == min_dim) return out;  // the sketch spans the whole column space
      if (iter >= kMaxPowerIterations)
        throw Error(ErrorCode::ConvergenceFailure, "partial_svd residual " + std::to_string(worst / top) +
                                                       " after " + std::to_string(iter) + " power iterations");
    }
    q = orthonormal_basis(m.transpose() * q);
    q = orthonormal_basis(m * q);
  }
}

PartialSvd partial_svd(const Eigen::MatrixXd& m, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return partial_svd(m, k, rng);
}

}  // namespace mlrpca::rpca
