#include "snsm/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <iostream>

namespace snsm {

namespace {

Vector drive_of(const SynapticState& state, const Hyperparams& hyper, const Vector& x) {
  if (x.size() != state.n()) throw DimensionError("solve_nnen: x dimension mismatch");
  return state.W * x - hyper.alpha * state.b;
}

void check_diagonal(const Matrix& M, double lambda2) {
  for (Index i = 0; i < M.rows(); ++i) {
    if (!(M(i, i) + lambda2 > 0.0)) {
      throw InvalidStateError("solve_nnen: non-positive diagonal denominator at " +
                              std::to_string(i));
    }
  }
}

void warn_near_indefinite(const Matrix& M) {
  // Cholesky success certifies PSD without the cost of an eigensolve.
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() == Eigen::Success) return;
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return;
  const double lo = es.eigenvalues().minCoeff();
  if (lo < 0.0 && lo >= -1e-10) {
    std::cerr << "warning: M smallest eigenvalue " << lo
              << " slightly negative; proceeding\n";
  }
}

}  // namespace

OracleResult solve_nnen_drive(const Vector& drive, const Matrix& M,
                              const Hyperparams& hyper, const SolverConfig& cfg,
                              const SweepObserver& observer) {
  cfg.validate();
  check_diagonal(M, hyper.lambda2);
  warn_near_indefinite(M);

  const Index k = M.rows();
  OracleResult res;
  res.y = Vector::Zero(k);
  Vector& y = res.y;

  // (My)_i - M_ii y_i maintained incrementally would also work; at k <= 256 a
  // fresh dot product per coordinate is cheap and simpler to keep exact.
  int sweep = 0;
  while (sweep < cfg.max_iters) {
    double max_change = 0.0;
    for (Index i = 0; i < k; ++i) {
      const double cross = M.row(i).dot(y) - M(i, i) * y(i);
      const double num = drive(i) - hyper.lambda1 - cross;
      const double yi = std::max(0.0, num / (M(i, i) + hyper.lambda2));
      max_change = std::max(max_change, std::abs(yi - y(i)));
      y(i) = yi;
    }
    ++sweep;
    if (observer) observer(sweep, y);
    if (max_change < cfg.tol) {
      res.kkt_residual = kkt_residual_drive(drive, M, hyper, y);
      if (res.kkt_residual <= cfg.tol) break;
    }
  }
  res.iterations = sweep;
  res.kkt_residual = kkt_residual_drive(drive, M, hyper, y);
  res.converged = res.kkt_residual <= cfg.tol;
  return res;
}

OracleResult solve_nnen(const SynapticState& state, const Hyperparams& hyper,
                        const Vector& x, const SolverConfig& cfg,
                        const SweepObserver& observer) {
  state.validate(hyper.lambda2);
  return solve_nnen_drive(drive_of(state, hyper, x), state.M, hyper, cfg, observer);
}

double kkt_residual_drive(const Vector& drive, const Matrix& M,
                          const Hyperparams& hyper, const Vector& y) {
  if (y.size() != drive.size() || M.rows() != y.size()) {
    throw DimensionError("kkt_residual: inconsistent dimensions");
  }
  if ((y.array() < 0.0).any()) {
    throw InvalidStateError("kkt_residual: negative component in y");
  }
  const Vector My = M * y;
  double worst = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    const double g = -2.0 * drive(i) + 2.0 * My(i) + 2.0 * hyper.lambda1 +
                     2.0 * hyper.lambda2 * y(i);
    const double v = y(i) > 0.0 ? std::abs(g) : std::max(0.0, -g);
    worst = std::max(worst, v);
  }
  return worst;
}

double kkt_residual(const SynapticState& state, const Hyperparams& hyper,
                    const Vector& x, const Vector& y) {
  return kkt_residual_drive(drive_of(state, hyper, x), state.M, hyper, y);
}

}  // namespace snsm
