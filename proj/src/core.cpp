#include "snsm/core.hpp"

#include <cmath>

namespace snsm {

void Hyperparams::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha) ||
      !(lambda1 >= 0.0) || !std::isfinite(lambda1) ||
      !(lambda2 >= 0.0) || !std::isfinite(lambda2)) {
    throw InvalidStateError("hyperparameters must be nonnegative and finite");
  }
}

Matrix SynapticState::lateral() const {
  Matrix Mbar = M;
  Mbar.diagonal().setZero();
  return Mbar;
}

Vector SynapticState::thresholds(double lambda2) const {
  return M.diagonal().array() + lambda2;
}

void SynapticState::validate(double lambda2) const {
  if (M.rows() != M.cols()) throw DimensionError("M must be square");
  if (W.rows() != M.rows()) throw DimensionError("W row count must equal k");
  if (b.size() != M.rows()) throw DimensionError("b size must equal k");
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) {
    throw InvalidStateError("M asymmetric beyond 1e-12 (max |M - M'| = " +
                            std::to_string(asym) + ")");
  }
  for (Index i = 0; i < M.rows(); ++i) {
    if (!(lambda2 + M(i, i) > 0.0)) {
      throw InvalidStateError("non-positive firing threshold at unit " +
                              std::to_string(i));
    }
  }
}

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1) {
    throw InvalidStateError("dataset must hold at least one sample of dimension >= 1");
  }
  if (!X.allFinite()) throw InvalidStateError("dataset contains non-finite entries");
}

void SolverConfig::validate() const {
  if (!(tau_end > 0.0)) throw InvalidStateError("tau_end must be positive");
  if (!(dtau > 0.0)) throw InvalidStateError("dtau must be positive");
  if (!(dtau < tau_end)) throw InvalidStateError("dtau must be smaller than tau_end");
  if (max_iters < 1) throw InvalidStateError("max_iters must be >= 1");
  if (!(tol > 0.0)) throw InvalidStateError("tol must be positive");
  if (record_stride < 1) throw InvalidStateError("record_stride must be >= 1");
}

double activation(double u, double lambda1, double lambda2, double m_ii) {
  const double denom = lambda2 + m_ii;
  if (!(denom > 0.0)) {
    throw InvalidStateError("activation: non-positive threshold denominator");
  }
  return u <= lambda1 ? 0.0 : (u - lambda1) / denom;
}

double eval_h_drive(const Vector& drive, const Matrix& M,
                    const Hyperparams& hyper, const Vector& y) {
  if (y.size() != drive.size() || M.rows() != y.size()) {
    throw DimensionError("eval_h: inconsistent dimensions");
  }
  return -2.0 * y.dot(drive) + y.dot(M * y) +
         2.0 * hyper.lambda1 * y.cwiseAbs().sum() +
         hyper.lambda2 * y.squaredNorm();
}

double eval_h(const SynapticState& state, const Hyperparams& hyper,
              const Vector& x, const Vector& y) {
  if (x.size() != state.n()) throw DimensionError("eval_h: x dimension mismatch");
  const Vector drive = state.W * x - hyper.alpha * state.b;
  return eval_h_drive(drive, state.M, hyper, y);
}

double eval_l(const SynapticState& state, const Hyperparams& hyper,
              const Vector& x, const Vector& y_opt) {
  return state.W.squaredNorm() - 0.5 * state.M.squaredNorm() -
         state.b.squaredNorm() + eval_h(state, hyper, x, y_opt);
}

double eval_nsm_cost(const Dataset& X, const Matrix& Y, const Hyperparams& hyper) {
  const Index T = X.size();
  if (Y.rows() != T) throw DimensionError("eval_nsm_cost: |Y| != |X|");
  const double Td = static_cast<double>(T);
  const Matrix Gx = X.X * X.X.transpose();
  const Matrix Gy = Y * Y.transpose();
  const double a2 = hyper.alpha * hyper.alpha;
  double quad = 0.0;
  for (Index t = 0; t < T; ++t) {
    for (Index s = 0; s < T; ++s) {
      const double d = Gx(t, s) - Gy(t, s) - a2;
      quad += d * d;
    }
  }
  const double l1 = Y.cwiseAbs().sum();
  const double l2 = Y.squaredNorm();
  return quad / (2.0 * Td * Td) + 2.0 * hyper.lambda1 * l1 / Td +
         hyper.lambda2 * l2 / Td;
}

SynapticState batch_optima(const Dataset& X, const Matrix& Y, double alpha) {
  const Index T = X.size();
  if (T < 1) throw InvalidStateError("batch_optima: empty dataset");
  if (Y.rows() != T) throw DimensionError("batch_optima: |Y| != |X|");
  const double Td = static_cast<double>(T);
  SynapticState s;
  s.W = (Y.transpose() * X.X) / Td;
  s.M = (Y.transpose() * Y) / Td;
  s.b = (alpha / Td) * Y.colwise().sum().transpose();
  return s;
}

double relative_error(const Vector& y, const Vector& y_ref) {
  if (y.size() != y_ref.size()) throw DimensionError("relative_error: size mismatch");
  const double ref = y_ref.norm();
  if (ref == 0.0) throw InvalidStateError("relative_error: zero reference norm");
  return (y - y_ref).norm() / ref;
}

}  // namespace snsm
