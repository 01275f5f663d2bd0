#include "uqsd/povm.hpp"

#include <algorithm>

namespace uqsd {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::N1: return "N1";
    case Provenance::N1Parallel: return "N1_PAR";
    case Provenance::N2: return "N2";
    case Provenance::N2Parallel: return "N2_PAR";
    case Provenance::RankD2D: return "RANK_D_2D";
    case Provenance::SingleOverlap: return "SINGLE_OVERLAP";
    case Provenance::Comparison: return "COMPARISON";
    case Provenance::Filtering: return "FILTERING";
    case Provenance::Oracle: return "ORACLE";
  }
  return "UNKNOWN";
}

Povm Povm::from_conclusive(HermitianMatrix pi1, HermitianMatrix pi2, Provenance provenance) {
  if (pi1.dim() != pi2.dim()) throw DimensionError("Povm: Pi1 and Pi2 differ in dimension");
  Povm p;
  p.Pi0 = HermitianMatrix::identity(pi1.dim()) - pi1 - pi2;
  p.Pi1 = std::move(pi1);
  p.Pi2 = std::move(pi2);
  p.provenance = provenance;
  return p;
}

Povm Povm::swapped() const {
  Povm p = *this;
  std::swap(p.Pi1, p.Pi2);
  return p;
}

double failure_probability(const Povm& povm, const DiscriminationProblem& problem) {
  if (povm.dim() != problem.dim())
    throw DimensionError("failure_probability: POVM and problem dimensions differ");
  const double q = problem.eta1() * trace_product(problem.rho1().matrix(), povm.Pi0.matrix()) +
                   problem.eta2() * trace_product(problem.rho2().matrix(), povm.Pi0.matrix());
  return std::clamp(q, 0.0, 1.0);
}

PovmVerdict verify_povm(const Povm& povm, const DiscriminationProblem& problem, double tol) {
  PovmVerdict v;
  const Eigen::Index n = problem.dim();
  if (povm.Pi0.dim() != n || povm.Pi1.dim() != n || povm.Pi2.dim() != n) return v;

  const Matrix sum = povm.Pi0.matrix() + povm.Pi1.matrix() + povm.Pi2.matrix();
  v.completeness_defect = max_abs(sum - Matrix::Identity(n, n));
  v.complete = v.completeness_defect <= tol;

  v.min_eigenvalue = std::min({spectral_decompose(povm.Pi0).eigenvalues.minCoeff(),
                               spectral_decompose(povm.Pi1).eigenvalues.minCoeff(),
                               spectral_decompose(povm.Pi2).eigenvalues.minCoeff()});
  v.psd = v.min_eigenvalue >= -tol;

  v.ambiguity = std::max(max_abs(problem.rho1().matrix() * povm.Pi2.matrix()),
                         max_abs(problem.rho2().matrix() * povm.Pi1.matrix()));
  v.unambiguous = v.ambiguity <= tol;

  v.failure_prob = failure_probability(povm, problem);
  return v;
}

}  // namespace uqsd
