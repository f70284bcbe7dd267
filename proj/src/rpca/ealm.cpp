// Exact augmented Lagrange multiplier method: the (L, S) subproblem is solved
// by alternating minimisation to its own tolerance before every dual update.

#include <algorithm>
#include <cmath>

#include "detail.hpp"
#include "mlrpca/kernels.hpp"

namespace mlrpca::rpca::detail {

Decomposition solve_ealm(const Eigen::MatrixXd& m, const SolverConfig& cfg, double lambda) {
  constexpr double kRho = 6.0;
  constexpr double kInnerTolerance = 1e-8;
  constexpr int kMaxInner = 500;

  const double norm_fro = m.norm();
  Eigen::MatrixXd y = m.array().sign().matrix();
  const double norm_two = spectral_norm(y);
  const double norm_inf = y.cwiseAbs().maxCoeff() / lambda;
  y /= std::max(norm_two, norm_inf);
  double mu = 0.5 / norm_two;
  const double inner_tol = kInnerTolerance * norm_fro;

  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  Eigen::MatrixXd l_prev, s_prev, z;

  Decomposition out;
  out.lambda = lambda;
  BestIterate best;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    int rank = 0;
    for (int inner = 0; inner < kMaxInner; ++inner) {
      l_prev = l;
      s_prev = s;
      kernels::omp::soft_threshold(m - l + y / mu, lambda / mu, s);
      auto low = svt_full(m - s + y / mu, 1.0 / mu);
      l = std::move(low.value);
      rank = low.rank;
      if ((l - l_prev).norm() < inner_tol && (s - s_prev).norm() < inner_tol) break;
    }

    z = m - l - s;
    y += mu * z;
    mu *= kRho;

    const double residual = z.norm() / norm_fro;
    out.trace.push_back({it, residual, rank, count_nonzero(s)});
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
