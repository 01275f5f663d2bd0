#pragma once

#include <optional>
#include <string_view>

#include "uqsd/oracle.hpp"
#include "uqsd/povm.hpp"
#include "uqsd/subspace.hpp"

namespace uqsd {

/// Slack used when testing whether the prior ratio lies inside a window, so
/// that exact window edges survive rounding.
inline constexpr double kWindowTolerance = 1e-9;

struct StrategyResult {
  Povm povm;
  double q = 1.0;
};

struct VonNeumannSet {
  StrategyResult n1;      // Pi0 = P1
  StrategyResult n1_par;  // Pi0 = P1_par
  StrategyResult n2;      // Pi0 = P2
  StrategyResult n2_par;  // Pi0 = P2_par
};

VonNeumannSet von_neumann_strategies(const DiscriminationProblem& problem,
                                     const SubspaceDecomposition& decomp);

/// Interval of sqrt(eta2/eta1) in which the fidelity bound can be reached,
/// together with the older prior-independent bound.
struct ReachabilityWindow {
  double lower = 0.0;  // Tr(P2 rho1) / F
  double upper = 0.0;  // F / Tr(P1 rho2); +inf when the denominator vanishes
  double ratio = 1.0;  // sqrt(eta2 / eta1) of the problem
  bool contains_ratio = false;
  bool nonempty = false;
  double rudolph_lower_bound = 0.0;
  double rudolph_lower = 0.0;  // F
  double rudolph_upper = 0.0;  // 1/F
};

ReachabilityWindow fidelity_bound_window(const OverlapStats& stats,
                                         const DiscriminationProblem& problem);

/// 2 sqrt(eta1 eta2) F.
double fidelity_bound(const DiscriminationProblem& problem, double F);

enum class SpecialCase { None, Filtering, SingleOverlap, RankD2D };

std::string_view to_string(SpecialCase c);

/// Checks, in priority order: one state pure (Filtering); a single overlapping
/// pair of eigenvectors (SingleOverlap); two rank-d states with equal spectra
/// filling 2d dimensions with |<r_i|s_j>| = delta_ij / sqrt(2) (RankD2D).
SpecialCase recognize_special_case(const DiscriminationProblem& problem,
                                   const SubspaceDecomposition& decomp, const OverlapStats& stats);

/// Geometry of the single-overlap case: <r_l|s_m> vanishes except for one
/// pair of eigenvectors (r1, s1).
struct SingleOverlapStructure {
  Vector r1_vec;
  Vector s1_vec;
  double r1 = 0.0;
  double s1 = 0.0;
  Complex a;  // <s1|r1>
};

/// With `allow_zero`, orthogonal supports are accepted with a = 0.
std::optional<SingleOverlapStructure> detect_single_overlap(const DiscriminationProblem& problem,
                                                            bool allow_zero = false);

bool is_rank_d_2d(const DiscriminationProblem& problem, const SubspaceDecomposition& decomp);

/// Pi1 = alpha P1_perp, Pi2 = beta P2_perp with alpha = 2 - sqrt(2 eta2/eta1),
/// beta = 2 - sqrt(2 eta1/eta2). Requires equal spectra.
StrategyResult solve_rank_d_2d(const DiscriminationProblem& problem,
                               const SubspaceDecomposition& decomp);

StrategyResult solve_single_overlap(const DiscriminationProblem& problem,
                                    const SubspaceDecomposition& decomp);

/// rho1 must be pure.
StrategyResult solve_state_filtering(const DiscriminationProblem& problem,
                                     const SubspaceDecomposition& decomp);

struct AnalyzeOptions {
  bool run_oracle = true;
  OracleSettings oracle;
};

struct DecompositionDims {
  int d1 = 0, d2 = 0;
  int d1_par = 0, d1_perp = 0, d1_bar = 0, d2_prime = 0;
  int d2_par = 0, d2_perp = 0, d2_bar = 0, d1_prime = 0;
};

DecompositionDims dims_of(const SubspaceDecomposition& decomp);

struct AnalysisReport {
  DiscriminationProblem problem;
  DecompositionDims dims;
  OverlapStats stats;
  ReachabilityWindow window;
  VonNeumannSet von_neumann;
  double q0 = 0.0;
  /// min(Q_N1par, Q_N2par): always achievable, not certified optimal.
  double q_upper = 1.0;
  bool indiscriminable = false;
  SpecialCase special_case = SpecialCase::None;
  std::optional<StrategyResult> optimal{};  // certified closed form
  std::optional<OracleResult> oracle{};
};

AnalysisReport analyze(const DiscriminationProblem& problem, const AnalyzeOptions& options = {});

/// rho1 = (|psi1 psi1><..| + |psi2 psi2><..|)/2, rho2 = (|psi1 psi2><..| + |psi2 psi1><..|)/2,
/// eta1 = p1^2 + p2^2.
DiscriminationProblem comparison_problem(const Vector& psi1, const Vector& psi2, double p1);

struct ComparisonReport {
  AnalysisReport analysis;
  double overlap = 0.0;  // |<psi1|psi2>|
  double q_opt = 1.0;    // closed form
  int branch = 1;        // 1: fidelity bound reached, 2: von Neumann branch
  StrategyResult measurement{};
};

ComparisonReport solve_state_comparison(const Vector& psi1, const Vector& psi2, double p1,
                                        const AnalyzeOptions& options = {});

}  // namespace uqsd
