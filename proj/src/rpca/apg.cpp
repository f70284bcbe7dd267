// Accelerated proximal gradient on the relaxed objective
//   mu ||L||_* + mu lambda ||S||_1 + 1/2 ||L + S - M||_F^2
// with continuation mu -> mu_bar. The partial variant computes only the
// leading singular triplets, growing the rank until the smallest one falls
// below the threshold so the SVT step is the same as with a full SVD.

#include <algorithm>
#include <cmath>
#include <random>

#include "detail.hpp"
#include "mlrpca/error.hpp"
#include "mlrpca/kernels.hpp"

namespace mlrpca::rpca::detail {

namespace {

constexpr int kRankGrowth = 5;

class PartialShrinker {
 public:
  PartialShrinker(Eigen::Index min_dim, int guess, std::uint64_t seed)
      : min_dim_(static_cast<int>(min_dim)), rank_(std::clamp(guess, 1, static_cast<int>(min_dim))), rng_(seed) {}

  Thresholded operator()(const Eigen::MatrixXd& g, double tau) {
    int k = rank_;
    for (;;) {
      PartialSvd ps;
      try {
        ps = partial_svd(g, k, rng_);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ConvergenceFailure) throw;
        return fall_back(g, tau);
      }
      const bool exhausted = ps.sigma(k - 1) > tau;
      if (!exhausted || k == min_dim_) {
        auto out = shrink_triplets(ps.u, ps.sigma, ps.v, tau);
        // next iteration: one more than the surviving rank, or grow when all survived
        rank_ = out.rank < k ? std::max(out.rank + 1, 1) : std::min(k + kRankGrowth, min_dim_);
        return out;
      }
      k = std::min(k + kRankGrowth, min_dim_);
    }
  }

 private:
  Thresholded fall_back(const Eigen::MatrixXd& g, double tau) {
    auto out = svt_full(g, tau);
    rank_ = std::clamp(out.rank + 1, 1, min_dim_);
    return out;
  }

  int min_dim_;
  int rank_;
  std::mt19937_64 rng_;
};

}  // namespace

Decomposition solve_apg(const Eigen::MatrixXd& m, const SolverConfig& cfg, double lambda, bool partial) {
  constexpr double kEta = 0.9;
  constexpr double kLipschitz = 2.0;
  constexpr double kContinuationFloor = 1e-9;

  const double norm_fro = m.norm();
  double mu = 0.99 * spectral_norm(m);
  const double mu_bar = kContinuationFloor * mu;

  const Eigen::Index rows = m.rows(), cols = m.cols();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(rows, cols), l_prev = l;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(rows, cols), s_prev = s;
  Eigen::MatrixXd s_next;
  double t = 1.0, t_prev = 1.0;

  PartialShrinker shrinker(std::min(rows, cols), cfg.partial_rank_guess, cfg.seed);

  Decomposition out;
  out.lambda = lambda;
  BestIterate best;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const double momentum = (t_prev - 1.0) / t;
    const Eigen::MatrixXd yl = l + momentum * (l - l_prev);
    const Eigen::MatrixXd ys = s + momentum * (s - s_prev);
    const Eigen::MatrixXd grad = (yl + ys - m) / kLipschitz;

    auto low = partial ? shrinker(yl - grad, mu / kLipschitz) : svt_full(yl - grad, mu / kLipschitz);
    kernels::omp::soft_threshold(ys - grad, lambda * mu / kLipschitz, s_next);

    t_prev = t;
    t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    mu = std::max(kEta * mu, mu_bar);

    // stopping test on the composite gradient mapping
    const Eigen::MatrixXd coupling = low.value + s_next - yl - ys;
    const double crit_num = std::sqrt((kLipschitz * (yl - low.value) + coupling).squaredNorm() +
                                      (kLipschitz * (ys - s_next) + coupling).squaredNorm());
    const double crit =
        crit_num / (kLipschitz * std::max(1.0, std::sqrt(low.value.squaredNorm() + s_next.squaredNorm())));

    l_prev = std::move(l);
    s_prev = std::move(s);
    l = std::move(low.value);
    s = s_next;

    const double residual = (m - l - s).norm() / norm_fro;
    out.trace.push_back({it, residual, low.rank, count_nonzero(s)});
    best.offer(std::max(crit, residual), l, s, it);
    if (crit <= cfg.tolerance && residual <= cfg.tolerance) {
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
