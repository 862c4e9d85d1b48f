#pragma once

#include <functional>

#include "snsm/types.hpp"

namespace snsm {

/// Ground-truth solve of the per-sample subproblem min_{y >= 0} h.
struct OracleResult {
  Vector y;
  int iterations = 0;       // full coordinate sweeps performed
  double kkt_residual = 0;  // optimality certificate, see kkt_residual()
  bool converged = false;   // implies kkt_residual <= cfg.tol
};

/// Called after each coordinate sweep with the sweep index and current iterate.
using SweepObserver = std::function<void(int sweep, const Vector& y)>;

/// Cyclic coordinate descent on the nonnegative elastic net subproblem.
///
/// Starting from y = 0, each coordinate gets the closed-form update
///   y_i <- max(0, (c_i - lambda1 - sum_{j != i} M_ij y_j) / (M_ii + lambda2))
/// with c = Wx - alpha b. Sweeps run until the largest coordinate change in a
/// sweep drops below cfg.tol and the KKT residual certifies optimality to
/// cfg.tol, or cfg.max_iters sweeps are spent. `converged` reports the
/// certificate, not the sweep cap.
///
/// Warns (stderr) when M has a slightly negative smallest eigenvalue in
/// [-1e-10, 0); genuinely indefinite M will simply fail to converge.
OracleResult solve_nnen(const SynapticState& state, const Hyperparams& hyper,
                        const Vector& x, const SolverConfig& cfg,
                        const SweepObserver& observer = {});

/// Drive-form entry point used by benchmark code: c = Wx - alpha b.
OracleResult solve_nnen_drive(const Vector& drive, const Matrix& M,
                              const Hyperparams& hyper, const SolverConfig& cfg,
                              const SweepObserver& observer = {});

/// First-order optimality residual of y >= 0 for the subproblem. With
/// g_i = -2 c_i + 2 (My)_i + 2 lambda1 + 2 lambda2 y_i, returns the max of
/// |g_i| over active coordinates (y_i > 0) and max(0, -g_i) over zero ones.
double kkt_residual(const SynapticState& state, const Hyperparams& hyper,
                    const Vector& x, const Vector& y);

double kkt_residual_drive(const Vector& drive, const Matrix& M,
                          const Hyperparams& hyper, const Vector& y);

}  // namespace snsm
