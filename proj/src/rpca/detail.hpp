#pragma once

#include <limits>

#include <Eigen/Core>

#include "mlrpca/rpca.hpp"

namespace mlrpca::rpca::detail {

struct Svd {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
};

/// Thin SVD; throws SvdFailure.
Svd full_svd(const Eigen::MatrixXd& m);

struct Thresholded {
  Eigen::MatrixXd value;
  int rank = 0;  // singular values that survived the shrink
};

/// U * max(Sigma - tau, 0) * V^T from precomputed triplets.
Thresholded shrink_triplets(const Eigen::MatrixXd& u, const Eigen::VectorXd& sigma, const Eigen::MatrixXd& v, double tau);
Thresholded svt_full(const Eigen::MatrixXd& m, double tau);

double spectral_norm(const Eigen::MatrixXd& m);
Eigen::Index count_nonzero(const Eigen::MatrixXd& m);

/// Keeps the iterate with the lowest score seen so far.
struct BestIterate {
  double score = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd low_rank;
  Eigen::MatrixXd sparse;
  int iteration = 0;

  void offer(double s, const Eigen::MatrixXd& l, const Eigen::MatrixXd& e, int it) {
    if (s < score) {
      score = s;
      low_rank = l;
      sparse = e;
      iteration = it;
    }
  }
};

Decomposition solve_ialm(const Eigen::MatrixXd& m, const SolverConfig& cfg, double lambda);
Decomposition solve_ealm(const Eigen::MatrixXd& m, const SolverConfig& cfg, double lambda);
Decomposition solve_apg(const Eigen::MatrixXd& m, const SolverConfig& cfg, double lambda, bool partial);

}  // namespace mlrpca::rpca::detail
