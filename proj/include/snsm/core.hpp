#pragma once

#include "snsm/types.hpp"

namespace snsm {

/// Piecewise-linear rectifying activation: 0 for u <= lambda1, otherwise
/// (u - lambda1) / (lambda2 + m_ii). The denominator is the unit's firing
/// threshold and must be strictly positive.
double activation(double u, double lambda1, double lambda2, double m_ii);

/// Per-sample objective
///   h = -2 y'(Wx - alpha b) + y'My + 2 lambda1 |y|_1 + lambda2 |y|_2^2.
double eval_h(const SynapticState& state, const Hyperparams& hyper,
              const Vector& x, const Vector& y);

/// Same objective with the input drive c = Wx - alpha b precomputed.
/// Solvers use this form internally; eval_h routes through it.
double eval_h_drive(const Vector& drive, const Matrix& M,
                    const Hyperparams& hyper, const Vector& y);

/// Per-sample term of the dual objective:
///   l = Tr W'W - 1/2 Tr M'M - |b|^2 + h(y_opt),
/// evaluated at a minimizer y_opt of h.
double eval_l(const SynapticState& state, const Hyperparams& hyper,
              const Vector& x, const Vector& y_opt);

/// Similarity-matching cost over a dataset. Y holds one output per row,
/// aligned with the rows of X.
///
///   (1/2T^2) sum_{t,t'} (x_t'x_{t'} - y_t'y_{t'} - alpha^2)^2
///   + (2 lambda1 / T) sum_t |y_t|_1 + (lambda2 / T) sum_t |y_t|_2^2
double eval_nsm_cost(const Dataset& X, const Matrix& Y, const Hyperparams& hyper);

/// Closed-form optima of the dual objective for fixed outputs:
///   W* = Y'X / T,  M* = Y'Y / T,  b* = alpha Y'1 / T.
SynapticState batch_optima(const Dataset& X, const Matrix& Y, double alpha);

/// |y - y_ref|_2 / |y_ref|_2. Throws InvalidStateError when the reference
/// norm is zero; callers are expected to discard such instances.
double relative_error(const Vector& y, const Vector& y_ref);

}  // namespace snsm
