#include "snsm/bench.hpp"

#include <algorithm>
#include <cmath>

#include "snsm/rng.hpp"

namespace snsm::bench {

Hyperparams protocol_hyperparams() {
  Hyperparams hyper;
  hyper.alpha = 0.3;
  hyper.lambda1 = 0.3;
  hyper.lambda2 = 0.1;
  return hyper;
}

Instance sample_instance(int k, std::mt19937_64& gen) {
  if (k < 1) throw InvalidStateError("sample_instance: k must be >= 1");
  Instance inst;
  inst.state.b.resize(k);
  for (int i = 0; i < k; ++i) inst.state.b(i) = rng::uniform01(gen);
  inst.state.W.resize(k, 1);
  for (int i = 0; i < k; ++i) inst.state.W(i, 0) = rng::uniform(gen, 0.0, 5.0);
  Matrix V(k, k);
  const double hi = 1.0 / std::sqrt(static_cast<double>(k));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) V(i, j) = rng::uniform(gen, 0.0, hi);
  }
  inst.state.M = V * V.transpose();
  inst.x = Vector::Ones(1);
  return inst;
}

Accepted sample_accepted(int k, std::mt19937_64& gen, const SolverConfig& cfg,
                         int retry_cap) {
  const Hyperparams hyper = protocol_hyperparams();
  for (int attempt = 1; attempt <= retry_cap; ++attempt) {
    Accepted acc;
    acc.instance = sample_instance(k, gen);
    acc.oracle = solve_nnen(acc.instance.state, hyper, acc.instance.x, cfg);
    acc.attempts = attempt;
    if (acc.oracle.y.norm() > 0.01) return acc;
  }
  throw Error("sample_accepted: no accepted instance for k = " + std::to_string(k) +
              " within " + std::to_string(retry_cap) +
              " attempts; sampling protocol parameters look wrong");
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidStateError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

BoxStats box_stats(const std::vector<double>& values) {
  BoxStats s;
  s.median = quantile(values, 0.5);
  s.q25 = quantile(values, 0.25);
  s.q75 = quantile(values, 0.75);
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

}  // namespace snsm::bench
