#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snsm/types.hpp"

namespace snsm {

enum class SolverKind { oracle, aunn, snn };

SolverKind solver_kind_from_string(const std::string& name);
std::string to_string(SolverKind kind);

/// Piecewise-constant learning-rate schedule: `segments` are consumed in
/// order, then `final_eta` applies forever.
struct LearningSchedule {
  struct Segment {
    long steps;
    double eta;
  };
  std::vector<Segment> segments;
  double final_eta = 1e-5;

  /// Learning rate for 1-based training step `step`.
  double eta_at(long step) const;
  void validate() const;
};

/// Per-checkpoint training metrics. `nsm_cost` and `active_fraction` are
/// measured on a fixed probe subset of the dataset.
struct TrainLog {
  struct Checkpoint {
    long step;
    double nsm_cost;
    double active_fraction;
    double eta;
  };
  std::vector<Checkpoint> checkpoints;
};

struct TrainOptions {
  SolverKind solver = SolverKind::oracle;
  long steps = 1;
  int probe_size = 500;        // capped at the dataset size
  long checkpoint_every = 0;   // 0 -> steps / 10, at least 1
  double active_threshold = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  SynapticState state;
  TrainLog log;
};

/// One local plasticity step with rate 0 < eta <= 1:
///   W_ij  += eta (y_i x_j - W_ij)        Hebbian feedforward
///   M_ij  += eta (y_i y_j - M_ij), i!=j  anti-Hebbian lateral
///   M_ii  += eta (y_i^2  - M_ii)         homeostatic threshold/gain
///   b_i   += eta (alpha y_i - b_i)       anti-Hebbian bias
/// The diagonal and off-diagonal rules coincide entrywise, so the update is
/// applied as one rank-one blend, which preserves symmetry exactly. At
/// eta = 1 the parameters are replaced by the outer products exactly.
void apply_updates_inplace(SynapticState& state, const Vector& y, const Vector& x,
                           double eta, double alpha);

SynapticState apply_updates(SynapticState state, const Vector& y, const Vector& x,
                            double eta, double alpha);

/// Online training loop: per step, draw a uniformly random sample (seeded,
/// with replacement), solve for y with the selected solver, apply the
/// plasticity update with the scheduled rate. Probe metrics are logged at
/// step 0, every `checkpoint_every` steps and at the final step; probe
/// outputs are always computed with the oracle solver.
TrainResult train(const Dataset& data, const Hyperparams& hyper,
                  const LearningSchedule& schedule, const SynapticState& init,
                  const SolverConfig& cfg, const TrainOptions& opts);

/// Fraction of (sample, unit) entries strictly above `threshold`.
double active_fraction(const std::vector<Vector>& Y, double threshold);

/// All activity values in ascending order, the support of the empirical CDF.
std::vector<double> activity_values(const std::vector<Vector>& Y);

}  // namespace snsm
