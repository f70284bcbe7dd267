#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mlrpca/features.hpp"

namespace mlrpca::rpca {

/// Declaration order is the tie-break order used when ranking sweep results.
enum class Algorithm { EALM, IALM, APG, APG_PARTIAL };

std::string_view to_string(Algorithm a) noexcept;
/// Accepts "ealm", "ialm", "apg", "apg-partial". Throws InvalidArgument.
Algorithm parse_algorithm(std::string_view name);

struct SolverConfig {
  Algorithm algorithm = Algorithm::IALM;
  std::optional<double> lambda;  // empty: 1/sqrt(max(p, n))
  double tolerance = 1e-7;
  int max_iterations = 1000;
  int partial_rank_guess = 5;  // APG_PARTIAL only
  double ialm_rho = 1.1;       // IALM penalty growth factor, mu <- rho * mu
  std::uint64_t seed = 20170101;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct TraceRow {
  int iteration = 0;
  double residual = 0.0;
  int rank = 0;
  Eigen::Index nnz_sparse = 0;
};

/// M = L + S split returned by every solver.
struct Decomposition {
  Eigen::MatrixXd low_rank;
  Eigen::MatrixXd sparse;
  int iterations_used = 0;
  double final_residual = 0.0;  // ||M - L - S||_F / ||M||_F
  bool converged = false;
  double lambda = 0.0;
  std::vector<TraceRow> trace;
};

double default_lambda(Eigen::Index rows, Eigen::Index cols);

/// sign(x) * max(|x| - tau, 0). Throws NegativeTau.
double soft_threshold(double x, double tau);
Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& m, double tau);

/// Singular value thresholding: U * shrink(Sigma, tau) * V^T.
Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau);

struct PartialSvd {
  Eigen::MatrixXd u;      // p x k
  Eigen::VectorXd sigma;  // k, descending
  Eigen::MatrixXd v;      // n x k
};

/// Top-k singular triplets by randomized subspace iteration (oversampling 10,
/// at least 2 power iterations, then iterated until the triplet residuals
/// ||M v_i - sigma_i u_i|| fall below 1e-10 * sigma_1).
PartialSvd partial_svd(const Eigen::MatrixXd& m, int k, std::mt19937_64& rng);
PartialSvd partial_svd(const Eigen::MatrixXd& m, int k, std::uint64_t seed = 1);

/// Principal Component Pursuit: min ||L||_* + lambda ||S||_1 s.t. L + S = M.
/// A run that exhausts max_iterations returns its best iterate with
/// converged = false.
Decomposition solve(const Eigen::MatrixXd& m, const SolverConfig& cfg);
Decomposition solve(const FeatureMatrix& m, const SolverConfig& cfg);

double relative_residual(const Eigen::MatrixXd& m, const Eigen::MatrixXd& l, const Eigen::MatrixXd& s);
double nuclear_norm(const Eigen::MatrixXd& m);
double pcp_objective(const Eigen::MatrixXd& l, const Eigen::MatrixXd& s, double lambda);

/// CSV with header `iteration,residual,rank,nnz_sparse`.
void write_trace_csv(const Decomposition& d, std::ostream& out);

}  // namespace mlrpca::rpca
