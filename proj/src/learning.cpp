#include "snsm/learning.hpp"

#include <algorithm>
#include <cmath>

#include "snsm/aunn.hpp"
#include "snsm/core.hpp"
#include "snsm/oracle.hpp"
#include "snsm/rng.hpp"
#include "snsm/snn.hpp"

namespace snsm {

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "oracle") return SolverKind::oracle;
  if (name == "aunn") return SolverKind::aunn;
  if (name == "snn") return SolverKind::snn;
  throw ConfigError("unknown solver '" + name + "' (expected snn|aunn|oracle)");
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::oracle: return "oracle";
    case SolverKind::aunn: return "aunn";
    case SolverKind::snn: return "snn";
  }
  return "?";
}

double LearningSchedule::eta_at(long step) const {
  long consumed = 0;
  for (const auto& seg : segments) {
    consumed += seg.steps;
    if (step <= consumed) return seg.eta;
  }
  return final_eta;
}

void LearningSchedule::validate() const {
  for (const auto& seg : segments) {
    if (seg.steps < 1) throw InvalidStateError("schedule segment needs steps >= 1");
    if (!(seg.eta > 0.0 && seg.eta <= 1.0)) {
      throw InvalidStateError("schedule eta must lie in (0, 1]");
    }
  }
  if (!(final_eta > 0.0 && final_eta <= 1.0)) {
    throw InvalidStateError("final_eta must lie in (0, 1]");
  }
}

void TrainOptions::validate() const {
  if (steps < 1) throw InvalidStateError("train: steps must be >= 1");
  if (probe_size < 1) throw InvalidStateError("train: probe_size must be >= 1");
  if (checkpoint_every < 0) throw InvalidStateError("train: negative checkpoint_every");
}

void apply_updates_inplace(SynapticState& state, const Vector& y, const Vector& x,
                           double eta, double alpha) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw InvalidStateError("apply_updates: eta must lie in (0, 1]");
  }
  if (y.size() != state.k() || x.size() != state.n()) {
    throw DimensionError("apply_updates: dimension mismatch");
  }
  const double keep = 1.0 - eta;
  // The outer product is materialized before scaling; folding eta into one
  // factor would round (eta y_i) y_j and (eta y_j) y_i differently and let
  // M drift off exact symmetry.
  const Matrix outer = y * y.transpose();
  state.W = keep * state.W + eta * (y * x.transpose());
  state.M = keep * state.M + eta * outer;
  state.b = keep * state.b + (eta * alpha) * y;
}

SynapticState apply_updates(SynapticState state, const Vector& y, const Vector& x,
                            double eta, double alpha) {
  apply_updates_inplace(state, y, x, eta, alpha);
  return state;
}

namespace {

Vector solve_output(SolverKind kind, const SynapticState& state,
                    const Hyperparams& hyper, const Vector& x,
                    const SolverConfig& cfg) {
  switch (kind) {
    case SolverKind::oracle: return solve_nnen(state, hyper, x, cfg).y;
    case SolverKind::aunn: return run_aunn(state, hyper, x, cfg).y;
    case SolverKind::snn: return run_snn(state, hyper, x, cfg).y_tilde;
  }
  throw Error("unreachable solver kind");
}

/// Evenly spaced probe indices: deterministic, covers the dataset.
std::vector<Index> probe_indices(Index T, int probe_size) {
  const Index P = std::min<Index>(T, probe_size);
  std::vector<Index> idx(P);
  for (Index j = 0; j < P; ++j) idx[j] = j * T / P;
  return idx;
}

}  // namespace

TrainResult train(const Dataset& data, const Hyperparams& hyper,
                  const LearningSchedule& schedule, const SynapticState& init,
                  const SolverConfig& cfg, const TrainOptions& opts) {
  data.validate();
  hyper.validate();
  schedule.validate();
  cfg.validate();
  opts.validate();
  init.validate(hyper.lambda2);
  if (init.n() != data.dim()) throw DimensionError("train: state/dataset dimension mismatch");

  const Index T = data.size();
  const auto probe = probe_indices(T, opts.probe_size);
  const long every = opts.checkpoint_every > 0
                         ? opts.checkpoint_every
                         : std::max<long>(1, opts.steps / 10);

  // Inner solves skip spike-time recording; only rates feed the updates.
  SolverConfig inner = cfg;
  inner.record_spike_times = false;
  inner.record_h_series = false;
  SolverConfig probe_cfg = inner;

  TrainResult result;
  result.state = init;

  auto checkpoint = [&](long step) {
    Matrix Yp(static_cast<Index>(probe.size()), result.state.k());
    std::vector<Vector> outputs;
    outputs.reserve(probe.size());
    Dataset probe_data;
    probe_data.X.resize(static_cast<Index>(probe.size()), data.dim());
    for (std::size_t j = 0; j < probe.size(); ++j) {
      const Vector x = data.sample(probe[j]);
      const Vector y = solve_nnen(result.state, hyper, x, probe_cfg).y;
      Yp.row(static_cast<Index>(j)) = y.transpose();
      probe_data.X.row(static_cast<Index>(j)) = x.transpose();
      outputs.push_back(y);
    }
    TrainLog::Checkpoint cp;
    cp.step = step;
    cp.nsm_cost = eval_nsm_cost(probe_data, Yp, hyper);
    cp.active_fraction = active_fraction(outputs, opts.active_threshold);
    cp.eta = schedule.eta_at(std::max<long>(step, 1));
    result.log.checkpoints.push_back(cp);
  };

  checkpoint(0);

  auto sampler = rng::make_engine(opts.seed);
  for (long step = 1; step <= opts.steps; ++step) {
    const Index t =
        static_cast<Index>(rng::uniform_index(sampler, static_cast<std::uint64_t>(T)));
    const Vector x = data.sample(t);
    Vector y;
    try {
      y = solve_output(opts.solver, result.state, hyper, x, inner);
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string("train: inner solver diverged: ") + e.what(),
                            step);
    }
    apply_updates_inplace(result.state, y, x, schedule.eta_at(step), hyper.alpha);
    for (Index i = 0; i < result.state.k(); ++i) {
      if (!(hyper.lambda2 + result.state.M(i, i) > 0.0)) {
        throw InvalidStateError("train: threshold invariant violated after step " +
                                std::to_string(step));
      }
    }
    if (step % every == 0 || step == opts.steps) checkpoint(step);
  }
  return result;
}

double active_fraction(const std::vector<Vector>& Y, double threshold) {
  long active = 0, total = 0;
  for (const auto& y : Y) {
    total += y.size();
    active += (y.array() > threshold).count();
  }
  return total == 0 ? 0.0 : static_cast<double>(active) / static_cast<double>(total);
}

std::vector<double> activity_values(const std::vector<Vector>& Y) {
  std::vector<double> vals;
  for (const auto& y : Y) {
    vals.insert(vals.end(), y.data(), y.data() + y.size());
  }
  std::sort(vals.begin(), vals.end());
  return vals;
}

}  // namespace snsm
