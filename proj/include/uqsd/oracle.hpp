#pragma once

// Independent numerical minimizer of the failure probability over all
// unambiguous detection operators.
//
// Pi1 = V alpha V^dagger lives on the perpendicular subspace of rho1's support
// and Pi2 = Rbar beta Rbar^dagger + P2_prime on the complement plus residual
// subspace, so the no-error conditions hold by construction. The remaining
// constraint Pi0 >= 0 together with alpha, beta >= 0 is handled by a
// log-barrier; the barrier problem is solved by damped Newton steps while the
// barrier weight is driven to zero. Each restart begins at a seeded random
// interior point alpha = A^dagger A, beta = B^dagger B.
//
// The search assumes no eigenvector of Pi0 lies in the residual subspace
// P2_prime. optimize_unrestricted() drops that assumption (Pi1 and Pi2 range
// over the full kernels of rho2 and rho1) and is used to audit it.

#include <cstdint>

#include "uqsd/povm.hpp"
#include "uqsd/subspace.hpp"

namespace uqsd {

struct OracleSettings {
  int restarts = 16;
  int max_iterations = 500;       // Newton steps per restart
  double step_tolerance = 1e-12;  // Newton decrement at which a centering stage stops
  double gap_tolerance = 1e-11;   // barrier stops once the duality-gap bound is below this
  std::uint64_t seed = 0x5eed5eedULL;
};

struct OracleResult {
  Povm povm;
  double q = 1.0;
  bool certified_feasible = false;
  int iterations_used = 0;
  int best_restart = 0;
  double restart_spread = 0.0;  // max - min failure probability over restarts
};

OracleResult optimize(const DiscriminationProblem& problem, const SubspaceDecomposition& decomp,
                      const OracleSettings& settings = {});

OracleResult optimize_unrestricted(const DiscriminationProblem& problem,
                                   const OracleSettings& settings = {});

/// SplitMix64 step; derives the seed of restart `index` from the base seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace uqsd
