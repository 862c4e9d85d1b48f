#pragma once

#include <functional>
#include <vector>

#include "snsm/types.hpp"

namespace snsm {

/// Spike bookkeeping for one simulation: per-unit counts and (optionally)
/// ordered spike times in (0, tau_end].
struct SpikeRecord {
  std::vector<long> spike_counts;
  std::vector<std::vector<double>> spike_times;  // empty when not recorded
  double tau_end = 0.0;
};

struct SnnTrace {
  SpikeRecord record;
  Vector y_tilde;  // spike_counts / tau_end
  Vector V_final;
  Vector I_final;
};

/// Called once per Euler step with membrane potentials (as integrated, before
/// the reset is applied), currents and the spike flags raised on this step.
using SnnStepObserver =
    std::function<void(long step, const Vector& V, const Vector& I,
                       const std::vector<char>& spiked)>;

/// Integrate-and-fire simulation. Units are perfect integrators with
/// thresholds lambda2 + M_ii; lateral spikes arrive as impulses that subtract
/// the full weight Mbar_ij from the postsynaptic current on the step after
/// the presynaptic spike. Per Euler step, in order:
///   1. I += dtau * (Wx - alpha b - lambda1 - I)
///   2. I -= Mbar * s_prev            (impulses, undiluted by dtau)
///   3. V += dtau * I
///   4. V_i >= threshold_i: record spike at the step's end time, V_i = 0
/// Initial conditions: V = 0, I = Wx - lambda1 - alpha b, no pending spikes.
///
/// The time-averaged spike train y_tilde = counts / tau_end estimates the
/// minimizer of the per-sample objective. Throws InvalidStateError on
/// non-positive thresholds and DivergenceError when any |I_i| exceeds 1e12.
SnnTrace run_snn(const SynapticState& state, const Hyperparams& hyper,
                 const Vector& x, const SolverConfig& cfg,
                 const SnnStepObserver& observer = {});

/// Convergence diagnostic for time-averaged rates: max over units of the
/// difference between the firing rate in the last `window` of the run and
/// the rate in the window before it. Requires window < tau_end / 2 and
/// recorded spike times.
double rate_stability(const SpikeRecord& record, double window);

}  // namespace snsm
