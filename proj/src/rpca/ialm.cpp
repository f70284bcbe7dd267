// Inexact augmented Lagrange multiplier method: one SVT and one shrinkage per
// dual update, with the penalty mu grown geometrically.

#include <algorithm>
#include <cmath>

#include "detail.hpp"
#include "mlrpca/kernels.hpp"

namespace mlrpca::rpca::detail {

Decomposition solve_ialm(const Eigen::MatrixXd& m, const SolverConfig& cfg, double lambda) {
  const double norm_fro = m.norm();
  const double norm_two = spectral_norm(m);
  const double norm_inf = m.cwiseAbs().maxCoeff() / lambda;

  Eigen::MatrixXd y = m / std::max(norm_two, norm_inf);
  double mu = 1.25 / norm_two;
  const double mu_bar = mu * 1e7;

  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  Eigen::MatrixXd z;

  Decomposition out;
  out.lambda = lambda;
  BestIterate best;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    auto low = svt_full(m - s + y / mu, 1.0 / mu);
    l = std::move(low.value);
    kernels::omp::soft_threshold(m - l + y / mu, lambda / mu, s);

    z = m - l - s;
    y += mu * z;
    mu = std::min(mu * cfg.ialm_rho, mu_bar);

    const double residual = z.norm() / norm_fro;
    out.trace.push_back({it, residual, low.rank, count_nonzero(s)});
    best.offer(residual, l, s, it);
    if (residual <= cfg.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.iterations_used = static_cast<int>(out.trace.size());
  out.low_rank = std::move(best.low_rank);
  out.sparse = std::move(best.sparse);
  return out;
}

}  // namespace mlrpca::rpca::detail
