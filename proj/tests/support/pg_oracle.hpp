#pragma once

// Second opinion on the per-sample subproblem: plain projected gradient with
// a conservative fixed step, sharing no code with the coordinate-descent
// solver it cross-checks.

#include "snsm/types.hpp"

namespace testsupport {

inline snsm::Vector pg_solve(const snsm::SynapticState& state,
                             const snsm::Hyperparams& hyper, const snsm::Vector& x,
                             long iterations = 100000) {
  using namespace snsm;
  const Vector c = state.W * x - hyper.alpha * state.b;
  const Matrix& M = state.M;
  const Matrix Mbar = state.lateral();
  const double lip = 2.0 * (hyper.lambda2 + M.diagonal().maxCoeff() +
                            Mbar.cwiseAbs().rowwise().sum().maxCoeff());
  const double step = 1.0 / lip;
  Vector y = Vector::Zero(c.size());
  for (long it = 0; it < iterations; ++it) {
    const Vector grad = -2.0 * c + 2.0 * (M * y) +
                        Vector::Constant(c.size(), 2.0 * hyper.lambda1) +
                        2.0 * hyper.lambda2 * y;
    y = (y - step * grad).cwiseMax(0.0);
  }
  return y;
}

}  // namespace testsupport
