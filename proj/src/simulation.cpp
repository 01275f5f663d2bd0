#include "uqsd/simulation.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "uqsd/oracle.hpp"

namespace uqsd {

std::int64_t SimulationResult::state_trials(int state) const {
  const auto& c = counts[static_cast<std::size_t>(state)];
  return c[0] + c[1] + c[2];
}

std::int64_t SimulationResult::inconclusive() const { return counts[0][2] + counts[1][2]; }

std::int64_t SimulationResult::errors() const { return counts[0][1] + counts[1][0]; }

std::array<double, 3> outcome_distribution(const DensityOperator& rho, const Povm& povm) {
  if (rho.dim() != povm.dim()) throw DimensionError("outcome_distribution: dimension mismatch");
  std::array<double, 3> p{trace_product(rho.matrix(), povm.Pi1.matrix()),
                          trace_product(rho.matrix(), povm.Pi2.matrix()),
                          trace_product(rho.matrix(), povm.Pi0.matrix())};
  const double raw = p[0] + p[1] + p[2];
  if (std::abs(raw - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "outcome probabilities sum to " << raw;
    throw InvalidPovm(os.str());
  }
  double total = 0.0;
  for (double& x : p) {
    if (x < 1e-12) x = 0.0;
    total += x;
  }
  for (double& x : p) x /= total;
  return p;
}

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Outcome draw(const std::array<double, 3>& p, double u) {
  if (u < p[0]) return Outcome::Infer1;
  if (u < p[0] + p[1]) return Outcome::Infer2;
  // Zero-probability outcomes must never be drawn, even at u close to 1.
  if (p[2] == 0.0) return p[1] > 0.0 ? Outcome::Infer2 : Outcome::Infer1;
  return Outcome::Inconclusive;
}

}  // namespace

SimulationResult simulate(const DiscriminationProblem& problem, const Povm& povm,
                          std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidProblem("simulate: trials must be positive");
  if (povm.dim() != problem.dim()) throw DimensionError("simulate: dimension mismatch");
  const std::array<std::array<double, 3>, 2> law{outcome_distribution(problem.rho1(), povm),
                                                 outcome_distribution(problem.rho2(), povm)};

  std::mt19937_64 rng(derive_seed(seed, 0));
  SimulationResult r;
  r.trials = trials;
  r.seed = seed;
  for (std::int64_t i = 0; i < trials; ++i) {
    const int state = uniform01(rng) < problem.eta1() ? 0 : 1;
    const Outcome o = draw(law[static_cast<std::size_t>(state)], uniform01(rng));
    ++r.counts[static_cast<std::size_t>(state)][static_cast<std::size_t>(o)];
  }
  r.empirical_failure = static_cast<double>(r.inconclusive()) / static_cast<double>(trials);
  r.empirical_error = static_cast<double>(r.errors()) / static_cast<double>(trials);
  return r;
}

}  // namespace uqsd
