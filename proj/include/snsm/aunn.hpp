#pragma once

#include <vector>

#include "snsm/types.hpp"

namespace snsm {

/// Final state of a rate-dynamics run, plus the optionally sampled objective
/// series (one entry per recorded step, first entry at tau = 0).
struct AunnTrace {
  Vector u;
  Vector y;
  std::vector<double> h_series;
  double tau_end = 0.0;  // actual simulated horizon (steps * dtau)
};

/// Leaky integration of the internal variables with instantaneous activation:
///   du/dtau = -u + Wx - alpha b - Mbar y,   y_i = g_i(u_i),
/// integrated by first-order Euler from u(0) = 0 to cfg.tau_end. The fixed
/// point is the minimizer of the per-sample objective h.
///
/// Each Euler step updates u first and recomputes y from the new u. With
/// cfg.record_h_series set, h is sampled every cfg.record_stride steps.
/// Throws DivergenceError when any |u_i| exceeds 1e12.
AunnTrace run_aunn(const SynapticState& state, const Hyperparams& hyper,
                   const Vector& x, const SolverConfig& cfg);

/// Max-norm of du/dtau at the trace's final state; near zero certifies that
/// the dynamics has settled.
double aunn_fixed_point_residual(const SynapticState& state, const Hyperparams& hyper,
                                 const Vector& x, const AunnTrace& trace);

}  // namespace snsm
