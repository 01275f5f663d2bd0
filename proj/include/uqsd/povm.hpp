#pragma once

#include <map>
#include <string>
#include <string_view>

#include "uqsd/hermitian.hpp"

namespace uqsd {

/// Which construction produced a detection-operator triple.
enum class Provenance {
  N1,
  N1Parallel,
  N2,
  N2Parallel,
  RankD2D,
  SingleOverlap,
  Comparison,
  Filtering,
  Oracle,
};

std::string_view to_string(Provenance p);

/// Detection operators: Pi1 infers rho1, Pi2 infers rho2, Pi0 is inconclusive.
struct Povm {
  HermitianMatrix Pi0;
  HermitianMatrix Pi1;
  HermitianMatrix Pi2;
  Provenance provenance = Provenance::Oracle;
  std::map<std::string, double> parameters;

  Eigen::Index dim() const { return Pi0.dim(); }

  /// Completes the triple with Pi0 = I - Pi1 - Pi2.
  static Povm from_conclusive(HermitianMatrix pi1, HermitianMatrix pi2, Provenance provenance);
  /// Exchanges the roles of Pi1 and Pi2 (for results computed on a swapped problem).
  Povm swapped() const;
};

/// eta1 Tr(rho1 Pi0) + eta2 Tr(rho2 Pi0), clipped to [0, 1].
double failure_probability(const Povm& povm, const DiscriminationProblem& problem);

struct PovmVerdict {
  bool complete = false;
  bool psd = false;
  bool unambiguous = false;
  double failure_prob = 1.0;

  double completeness_defect = 0.0;  // max |Pi0 + Pi1 + Pi2 - I|
  double min_eigenvalue = 0.0;       // smallest eigenvalue over Pi0, Pi1, Pi2
  double ambiguity = 0.0;            // max(max |rho1 Pi2|, max |rho2 Pi1|)

  bool ok() const { return complete && psd && unambiguous; }
};

/// Checks completeness, positivity and the no-error conditions
/// rho1 Pi2 = rho2 Pi1 = 0, each against `tol`.
PovmVerdict verify_povm(const Povm& povm, const DiscriminationProblem& problem, double tol = 1e-8);

}  // namespace uqsd
