#include "snsm/aunn.hpp"

#include "snsm/core.hpp"

#include <cmath>

namespace snsm {

namespace {
constexpr double kDivergenceGuard = 1e12;
}

AunnTrace run_aunn(const SynapticState& state, const Hyperparams& hyper,
                   const Vector& x, const SolverConfig& cfg) {
  cfg.validate();
  state.validate(hyper.lambda2);
  if (x.size() != state.n()) throw DimensionError("run_aunn: x dimension mismatch");

  const Index k = state.k();
  const Vector drive = state.W * x - hyper.alpha * state.b;
  const Matrix Mbar = state.lateral();
  const Vector inv_denom = state.thresholds(hyper.lambda2).cwiseInverse();

  const long steps = std::llround(cfg.tau_end / cfg.dtau);

  AunnTrace trace;
  trace.u = Vector::Zero(k);
  trace.y = Vector::Zero(k);
  trace.tau_end = static_cast<double>(steps) * cfg.dtau;

  auto refresh_y = [&] {
    trace.y = (trace.u.array() - hyper.lambda1).cwiseMax(0.0) * inv_denom.array();
  };
  refresh_y();

  if (cfg.record_h_series) {
    trace.h_series.push_back(eval_h_drive(drive, state.M, hyper, trace.y));
  }

  Vector rhs(k);
  for (long step = 1; step <= steps; ++step) {
    rhs.noalias() = drive - trace.u - Mbar * trace.y;
    trace.u += cfg.dtau * rhs;
    refresh_y();
    if (trace.u.cwiseAbs().maxCoeff() > kDivergenceGuard) {
      throw DivergenceError("run_aunn: internal state exceeded 1e12", step);
    }
    if (cfg.record_h_series &&
        (step % cfg.record_stride == 0 || step == steps)) {
      trace.h_series.push_back(eval_h_drive(drive, state.M, hyper, trace.y));
    }
  }
  return trace;
}

double aunn_fixed_point_residual(const SynapticState& state, const Hyperparams& hyper,
                                 const Vector& x, const AunnTrace& trace) {
  if (x.size() != state.n() || trace.u.size() != state.k()) {
    throw DimensionError("aunn_fixed_point_residual: dimension mismatch");
  }
  const Vector drive = state.W * x - hyper.alpha * state.b;
  const Vector rhs = drive - trace.u - state.lateral() * trace.y;
  return rhs.cwiseAbs().maxCoeff();
}

}  // namespace snsm
