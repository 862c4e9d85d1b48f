#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace snsm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A state or argument invariant is broken (non-positive firing threshold,
/// negative rate, zero reference norm, ...).
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Numerical blow-up inside a solver; `step` is the Euler step (or training
/// step) at which the guard tripped.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step_)
      : Error(what + " (step " + std::to_string(step_) + ")"), step(step_) {}
  long step;
};

/// Malformed input file (IDX images, state files); message names the offset.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration: unknown or missing key, value out of range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Domain types

/// Cost-function constants. All three must be nonnegative and finite.
struct Hyperparams {
  double alpha = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  void validate() const;
};

/// Learned parameters: feedforward weights W (k x n), lateral weights M
/// (k x k, diagonal included) and bias weights b (k).
///
/// The effective firing threshold of unit i is lambda2 + M(i,i); every solver
/// checks that all thresholds are strictly positive before running.
struct SynapticState {
  Matrix W;
  Matrix M;
  Vector b;

  Index k() const { return M.rows(); }
  Index n() const { return W.cols(); }

  /// Lateral matrix with the diagonal zeroed. Recomputed on demand; M is the
  /// single source of truth.
  Matrix lateral() const;

  /// Thresholds lambda2 + M_ii as a vector.
  Vector thresholds(double lambda2) const;

  /// Checks shape consistency, symmetry of M (to 1e-12) and strictly
  /// positive thresholds. Throws InvalidStateError / DimensionError.
  void validate(double lambda2) const;
};

/// Ordered collection of input samples, one per row of X (T x n).
struct Dataset {
  Matrix X;

  Index size() const { return X.rows(); }
  Index dim() const { return X.cols(); }
  Vector sample(Index t) const { return X.row(t).transpose(); }

  void validate() const;
};

/// Shared solver knobs: simulation horizon, Euler step, sweep caps and
/// tolerances. The recording flags control optional trace payloads.
struct SolverConfig {
  double tau_end = 500.0;
  double dtau = 0.01;
  int max_iters = 10000;
  double tol = 1e-10;
  std::uint64_t seed = 0;

  // Optional payloads and diagnostics.
  bool record_h_series = false;   // AUNN objective series
  int record_stride = 100;        // sampling stride for the h series
  bool record_spike_times = true; // SNN per-unit spike times
  double early_stop_window = 0.0; // SNN rate-stability early stop; 0 = off
  double early_stop_tol = 0.0;

  void validate() const;
};

}  // namespace snsm
