#include "snsm/snn.hpp"

#include <algorithm>
#include <cmath>

namespace snsm {

namespace {
constexpr double kDivergenceGuard = 1e12;
}

SnnTrace run_snn(const SynapticState& state, const Hyperparams& hyper,
                 const Vector& x, const SolverConfig& cfg,
                 const SnnStepObserver& observer) {
  cfg.validate();
  state.validate(hyper.lambda2);
  if (x.size() != state.n()) throw DimensionError("run_snn: x dimension mismatch");

  const Index k = state.k();
  const Vector thresholds = state.thresholds(hyper.lambda2);
  const Matrix Mbar = state.lateral();
  const Vector drive =
      (state.W * x - hyper.alpha * state.b).array() - hyper.lambda1;

  const long total_steps = std::llround(cfg.tau_end / cfg.dtau);

  SnnTrace trace;
  trace.record.spike_counts.assign(k, 0);
  if (cfg.record_spike_times) trace.record.spike_times.resize(k);
  trace.V_final = Vector::Zero(k);
  trace.I_final = drive;

  Vector& V = trace.V_final;
  Vector& I = trace.I_final;
  std::vector<char> spiked(k, 0);

  // Early-stop bookkeeping (optional): spike counts at window boundaries.
  const long window_steps =
      cfg.early_stop_window > 0.0 ? std::llround(cfg.early_stop_window / cfg.dtau) : 0;
  std::vector<long> counts_prev2(k, 0), counts_prev(k, 0);

  long step = 1;
  long steps_done = total_steps;
  for (; step <= total_steps; ++step) {
    I += cfg.dtau * (drive - I);
    for (Index j = 0; j < k; ++j) {
      if (spiked[j]) I -= Mbar.col(j);
    }
    if (I.cwiseAbs().maxCoeff() > kDivergenceGuard) {
      throw DivergenceError("run_snn: synaptic current exceeded 1e12", step);
    }
    V += cfg.dtau * I;

    const double tau_now = static_cast<double>(step) * cfg.dtau;
    std::fill(spiked.begin(), spiked.end(), 0);
    for (Index i = 0; i < k; ++i) {
      if (V(i) >= thresholds(i)) {
        spiked[i] = 1;
        ++trace.record.spike_counts[i];
        if (cfg.record_spike_times) trace.record.spike_times[i].push_back(tau_now);
      }
    }
    if (observer) observer(step, V, I, spiked);
    for (Index i = 0; i < k; ++i) {
      if (spiked[i]) V(i) = 0.0;
    }

    if (window_steps > 0 && step % window_steps == 0) {
      if (step >= 2 * window_steps) {
        double worst = 0.0;
        for (Index i = 0; i < k; ++i) {
          const long last = trace.record.spike_counts[i] - counts_prev[i];
          const long before = counts_prev[i] - counts_prev2[i];
          worst = std::max(worst, std::abs(static_cast<double>(last - before)) /
                                      cfg.early_stop_window);
        }
        if (worst < cfg.early_stop_tol) {
          steps_done = step;
          break;
        }
      }
      counts_prev2 = counts_prev;
      std::copy(trace.record.spike_counts.begin(), trace.record.spike_counts.end(),
                counts_prev.begin());
    }
  }

  trace.record.tau_end = static_cast<double>(steps_done) * cfg.dtau;
  trace.y_tilde = Vector(k);
  for (Index i = 0; i < k; ++i) {
    trace.y_tilde(i) =
        static_cast<double>(trace.record.spike_counts[i]) / trace.record.tau_end;
  }
  return trace;
}

double rate_stability(const SpikeRecord& record, double window) {
  if (!(window > 0.0) || !(window < record.tau_end / 2.0)) {
    throw InvalidStateError("rate_stability: window must lie in (0, tau_end/2)");
  }
  if (record.spike_times.size() != record.spike_counts.size()) {
    throw InvalidStateError("rate_stability: spike times were not recorded");
  }
  const double t1 = record.tau_end - window;       // last window start
  const double t0 = record.tau_end - 2.0 * window; // preceding window start
  double worst = 0.0;
  for (const auto& times : record.spike_times) {
    long last = 0, before = 0;
    for (double t : times) {
      if (t > t1) ++last;
      else if (t > t0) ++before;
    }
    worst = std::max(worst, std::abs(static_cast<double>(last - before)) / window);
  }
  return worst;
}

}  // namespace snsm
