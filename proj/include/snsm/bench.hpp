#pragma once

#include <random>
#include <vector>

#include "snsm/oracle.hpp"
#include "snsm/types.hpp"

namespace snsm::bench {

// Random-instance protocol for the convergence benchmark: alpha = 0.3,
// lambda1 = 0.3, lambda2 = 0.1, b_i ~ U[0,1], drive (Wx)_i ~ U[0,5]
// (realized as a k x 1 weight column against x = [1]), M = V V' with
// V_ij ~ U[0, 1/sqrt(k)].
Hyperparams protocol_hyperparams();

struct Instance {
  SynapticState state;
  Vector x;
};

// Consumes 2k + k^2 uniform draws: b, then the drive, then V row-major.
Instance sample_instance(int k, std::mt19937_64& gen);

struct Accepted {
  Instance instance;
  OracleResult oracle;
  int attempts = 0;  // instances sampled until one was accepted
};

// Samples until the oracle minimizer has l2-norm > 0.01, which screens out
// near-zero minima that the relative-error metric cannot score. Throws after
// retry_cap rejected attempts.
Accepted sample_accepted(int k, std::mt19937_64& gen, const SolverConfig& cfg,
                         int retry_cap = 100);

struct BoxStats {
  double median = 0, q25 = 0, q75 = 0, min = 0, max = 0;
};

// Linear-interpolation quantile (the common spreadsheet definition,
// h = (m - 1) p); values need not be sorted.
double quantile(std::vector<double> values, double p);
BoxStats box_stats(const std::vector<double>& values);

}  // namespace snsm::bench
