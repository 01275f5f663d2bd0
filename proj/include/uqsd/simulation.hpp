#pragma once

// Monte Carlo sampling of measurement outcomes.
//
// Random numbers come from std::mt19937_64 seeded through SplitMix64
// (derive_seed); uniforms use the top 53 bits of each draw. Runs are
// reproducible for a given seed, and the statistics (not the exact stream)
// are the cross-implementation contract.

#include <array>
#include <cstdint>

#include "uqsd/povm.hpp"

namespace uqsd {

enum class Outcome { Infer1 = 0, Infer2 = 1, Inconclusive = 2 };

struct SimulationResult {
  std::int64_t trials = 0;
  /// counts[true_state][outcome], true_state 0 -> rho1, 1 -> rho2.
  std::array<std::array<std::int64_t, 3>, 2> counts{};
  double empirical_failure = 0.0;
  double empirical_error = 0.0;
  std::uint64_t seed = 0;

  std::int64_t state_trials(int state) const;
  std::int64_t inconclusive() const;
  /// (true = 1, infer 2) plus (true = 2, infer 1).
  std::int64_t errors() const;
};

/// Outcome probabilities {Tr(rho Pi1), Tr(rho Pi2), Tr(rho Pi0)}; negative
/// values and values below 1e-12 are set to zero and the rest renormalized.
/// Throws InvalidPovm if the raw total is off by more than 1e-6.
std::array<double, 3> outcome_distribution(const DensityOperator& rho, const Povm& povm);

SimulationResult simulate(const DiscriminationProblem& problem, const Povm& povm,
                          std::int64_t trials, std::uint64_t seed);

}  // namespace uqsd
