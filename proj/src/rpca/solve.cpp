#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/SVD>

#include "detail.hpp"
#include "mlrpca/error.hpp"

namespace mlrpca::rpca {

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::EALM: return "ealm";
    case Algorithm::IALM: return "ialm";
    case Algorithm::APG: return "apg";
    case Algorithm::APG_PARTIAL: return "apg-partial";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::EALM, Algorithm::IALM, Algorithm::APG, Algorithm::APG_PARTIAL})
    if (name == to_string(a)) return a;
  throw Error(ErrorCode::InvalidArgument,
              "unknown solver \"" + std::string(name) + "\" (expected ealm, ialm, apg or apg-partial)");
}

void SolverConfig::validate() const {
  if (lambda && !(*lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be > 0");
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be > 0");
  if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
  if (!(ialm_rho > 1.0)) throw Error(ErrorCode::InvalidArgument, "ialm_rho must be > 1");
  if (partial_rank_guess < 1) throw Error(ErrorCode::InvalidArgument, "partial_rank_guess must be >= 1");
}

double default_lambda(Eigen::Index rows, Eigen::Index cols) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::ZeroDimension, "matrix has a zero dimension");
  return 1.0 / std::sqrt(static_cast<double>(std::max(rows, cols)));
}

double relative_residual(const Eigen::MatrixXd& m, const Eigen::MatrixXd& l, const Eigen::MatrixXd& s) {
  const double denom = m.norm();
  const double num = (m - l - s).norm();
  return denom == 0.0 ? num : num / denom;
}

double nuclear_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().sum();
}

double pcp_objective(const Eigen::MatrixXd& l, const Eigen::MatrixXd& s, double lambda) {
  return nuclear_norm(l) + lambda * s.cwiseAbs().sum();
}

Decomposition solve(const Eigen::MatrixXd& m, const SolverConfig& cfg) {
  cfg.validate();
  if (m.cols() < 2) throw Error(ErrorCode::InvalidArgument, "solve needs at least 2 columns");
  if (!m.allFinite()) throw Error(ErrorCode::NonFiniteInput, "data matrix has non-finite entries");
  const double lambda = cfg.lambda.value_or(default_lambda(m.rows(), m.cols()));

  if (m.norm() == 0.0) {
    Decomposition zero;
    zero.low_rank = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    zero.sparse = zero.low_rank;
    zero.converged = true;
    zero.lambda = lambda;
    return zero;
  }

  Decomposition d;
  switch (cfg.algorithm) {
    case Algorithm::IALM: d = detail::solve_ialm(m, cfg, lambda); break;
    case Algorithm::EALM: d = detail::solve_ealm(m, cfg, lambda); break;
    case Algorithm::APG: d = detail::solve_apg(m, cfg, lambda, false); break;
    case Algorithm::APG_PARTIAL: d = detail::solve_apg(m, cfg, lambda, true); break;
  }
  d.final_residual = relative_residual(m, d.low_rank, d.sparse);
  return d;
}

Decomposition solve(const FeatureMatrix& m, const SolverConfig& cfg) { return solve(m.data, cfg); }

void write_trace_csv(const Decomposition& d, std::ostream& out) {
  out << "iteration,residual,rank,nnz_sparse\n";
  const auto old = out.precision(17);
  for (const auto& r : d.trace) out << r.iteration << ',' << r.residual << ',' << r.rank << ',' << r.nnz_sparse << '\n';
  out.precision(old);
}

}  // namespace mlrpca::rpca
