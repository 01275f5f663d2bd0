#include "uqsd/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace uqsd {

namespace {

constexpr double kStructureTolerance = 1e-9;

StrategyResult make_result(Povm povm, const DiscriminationProblem& problem) {
  const double q = failure_probability(povm, problem);
  return {std::move(povm), q};
}

HermitianMatrix outer(const Vector& v, double weight) {
  return HermitianMatrix::symmetrize(weight * v * v.adjoint());
}

double unit_clamp(double x) { return std::clamp(x, 0.0, 1.0); }

void require_window(const ReachabilityWindow& w, const char* who) {
  if (!w.contains_ratio) {
    std::ostringstream os;
    os << who << ": sqrt(eta2/eta1) = " << w.ratio << " outside [" << w.lower << ", " << w.upper
       << "]";
    throw PriorsOutsideWindow(os.str());
  }
}

}  // namespace

VonNeumannSet von_neumann_strategies(const DiscriminationProblem& problem,
                                     const SubspaceDecomposition& decomp) {
  if (decomp.dim != problem.dim())
    throw DimensionError("von_neumann_strategies: decomposition dimension mismatch");
  const auto n = problem.dim();
  const auto zero = HermitianMatrix::zero(n);
  VonNeumannSet s;
  s.n1 = make_result(Povm::from_conclusive(zero, decomp.P1_bar() + decomp.P2_prime(), Provenance::N1),
                     problem);
  s.n1_par = make_result(
      Povm::from_conclusive(decomp.P1_perp(), decomp.P2_prime(), Provenance::N1Parallel), problem);
  s.n2 = make_result(Povm::from_conclusive(decomp.P2_bar() + decomp.P1_prime(), zero, Provenance::N2),
                     problem);
  s.n2_par = make_result(
      Povm::from_conclusive(decomp.P1_prime(), decomp.P2_perp(), Provenance::N2Parallel), problem);
  return s;
}

double fidelity_bound(const DiscriminationProblem& problem, double F) {
  return 2.0 * std::sqrt(problem.eta1() * problem.eta2()) * F;
}

ReachabilityWindow fidelity_bound_window(const OverlapStats& stats,
                                         const DiscriminationProblem& problem) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  ReachabilityWindow w;
  const double eta1 = problem.eta1();
  const double eta2 = problem.eta2();
  w.ratio = std::sqrt(eta2 / eta1);
  const double F = stats.F;

  if (F > 0.0) {
    w.lower = stats.t_p2_r1 / F;
    w.upper = stats.t_p1_r2 > 0.0 ? F / stats.t_p1_r2 : inf;
    w.rudolph_lower = F;
    w.rudolph_upper = 1.0 / F;
    const double prior_ratio = std::sqrt(eta1 / eta2);
    if (F <= prior_ratio + kWindowTolerance && prior_ratio <= 1.0 / F + kWindowTolerance)
      w.rudolph_lower_bound = 2.0 * std::sqrt(eta1 * eta2) * F;
    else
      w.rudolph_lower_bound = std::min(eta1, eta2) + std::max(eta1, eta2) * F * F;
  } else {
    w.lower = 0.0;
    w.upper = inf;
    w.rudolph_lower = 0.0;
    w.rudolph_upper = inf;
    w.rudolph_lower_bound = 0.0;
  }
  w.nonempty = stats.t_p2_r1 * stats.t_p1_r2 <= F * F + kWindowTolerance;
  w.contains_ratio = w.lower <= w.ratio + kWindowTolerance && w.ratio <= w.upper + kWindowTolerance;
  return w;
}

std::string_view to_string(SpecialCase c) {
  switch (c) {
    case SpecialCase::None: return "NONE";
    case SpecialCase::Filtering: return "FILTERING";
    case SpecialCase::SingleOverlap: return "SINGLE_OVERLAP";
    case SpecialCase::RankD2D: return "RANK_D_2D";
  }
  return "UNKNOWN";
}

std::optional<SingleOverlapStructure> detect_single_overlap(const DiscriminationProblem& problem,
                                                            bool allow_zero) {
  const Matrix R = problem.rho1().support_basis();
  const Matrix S = problem.rho2().support_basis();
  const RealVector r = problem.rho1().support_eigenvalues();
  const RealVector s = problem.rho2().support_eigenvalues();
  const Matrix gram = R.adjoint() * S;

  Eigen::JacobiSVD<Matrix> svd(gram, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sigma = svd.singularValues();
  const auto nonzero = (sigma.array() > kStructureTolerance).count();
  if (nonzero > 1) return std::nullopt;
  if (nonzero == 0 && !allow_zero) return std::nullopt;

  SingleOverlapStructure out;
  if (nonzero == 0) {
    out.r1_vec = R.col(0);
    out.s1_vec = S.col(0);
    out.r1 = r(0);
    out.s1 = s(0);
    out.a = Complex(0.0, 0.0);
    return out;
  }

  // The overlapping directions must be eigenvectors of their states, so that
  // every other eigenvector pair is orthogonal.
  const Vector u = svd.matrixU().col(0);
  const Vector w = svd.matrixV().col(0);
  const double ru = (u.adjoint() * r.cast<Complex>().asDiagonal() * u)(0, 0).real();
  const double sw = (w.adjoint() * s.cast<Complex>().asDiagonal() * w)(0, 0).real();
  const double r_resid = (r.cast<Complex>().asDiagonal() * u - ru * u).norm();
  const double s_resid = (s.cast<Complex>().asDiagonal() * w - sw * w).norm();
  if (r_resid > kStructureTolerance || s_resid > kStructureTolerance) return std::nullopt;

  out.r1_vec = R * u;
  out.s1_vec = S * w;
  out.r1 = ru;
  out.s1 = sw;
  out.a = out.s1_vec.dot(out.r1_vec);
  if (std::abs(out.a) >= 1.0 - kStructureTolerance) return std::nullopt;
  return out;
}

bool is_rank_d_2d(const DiscriminationProblem& problem, const SubspaceDecomposition& decomp) {
  const int d = problem.rho1().rank();
  if (d < 1 || problem.rho2().rank() != d || problem.dim() != 2 * d) return false;
  if (decomp.first.residual_dim != 0) return false;
  const RealVector r = problem.rho1().support_eigenvalues();
  const RealVector s = problem.rho2().support_eigenvalues();
  if ((r - s).cwiseAbs().maxCoeff() > kStructureTolerance) return false;

  // |<r_i|s_j>| = delta_ij / sqrt(2) up to a unitary rotation inside each
  // degenerate eigenspace: G G^dagger = I/2 and G maps eigenspaces onto
  // eigenspaces with the same eigenvalue.
  const Matrix gram = problem.rho1().support_basis().adjoint() * problem.rho2().support_basis();
  const Matrix half = 0.5 * Matrix::Identity(d, d);
  if (max_abs(gram * gram.adjoint() - half) > kStructureTolerance) return false;
  const Matrix commutator =
      r.cast<Complex>().asDiagonal() * gram - gram * s.cast<Complex>().asDiagonal();
  return max_abs(commutator) <= kStructureTolerance;
}

SpecialCase recognize_special_case(const DiscriminationProblem& problem,
                                   const SubspaceDecomposition& decomp, const OverlapStats&) {
  if (problem.rho1().rank() == 1 || problem.rho2().rank() == 1) return SpecialCase::Filtering;
  if (detect_single_overlap(problem)) return SpecialCase::SingleOverlap;
  if (is_rank_d_2d(problem, decomp)) return SpecialCase::RankD2D;
  return SpecialCase::None;
}

StrategyResult solve_rank_d_2d(const DiscriminationProblem& problem,
                               const SubspaceDecomposition& decomp) {
  if (!is_rank_d_2d(problem, decomp))
    throw StructureMismatch("solve_rank_d_2d: states are not two equal-spectrum rank-d operators "
                            "with |<r_i|s_j>| = delta_ij/sqrt(2) in 2d dimensions");
  const auto stats = overlap_stats(decomp, problem.rho1(), problem.rho2());
  require_window(fidelity_bound_window(stats, problem), "solve_rank_d_2d");

  const double eta1 = problem.eta1();
  const double eta2 = problem.eta2();
  const double alpha = unit_clamp(2.0 - std::sqrt(2.0 * eta2 / eta1));
  const double beta = unit_clamp(2.0 - std::sqrt(2.0 * eta1 / eta2));
  Povm povm = Povm::from_conclusive(alpha * decomp.P1_perp(), beta * decomp.P2_perp(),
                                    Provenance::RankD2D);
  povm.parameters = {{"alpha", alpha}, {"beta", beta}, {"lambda1", 2.0 - alpha - beta}};
  return make_result(std::move(povm), problem);
}

StrategyResult solve_single_overlap(const DiscriminationProblem& problem,
                                    const SubspaceDecomposition& decomp) {
  const auto structure = detect_single_overlap(problem, /*allow_zero=*/true);
  if (!structure)
    throw StructureMismatch("solve_single_overlap: more than one pair of eigenvectors overlaps");
  const auto stats = overlap_stats(decomp, problem.rho1(), problem.rho2());
  require_window(fidelity_bound_window(stats, problem), "solve_single_overlap");

  const auto& st = *structure;
  const double eta1 = problem.eta1();
  const double eta2 = problem.eta2();
  const double F = stats.F;
  const double a2 = std::norm(st.a);
  const double norm = (1.0 - a2) * (1.0 - a2);
  const double c1 = unit_clamp(1.0 - std::sqrt(eta2 / eta1) * F / st.r1);
  const double c2 = unit_clamp(1.0 - std::sqrt(eta1 / eta2) * F / st.s1);

  const Vector v_tilde = st.r1_vec - st.a * st.s1_vec;
  const Vector rbar_tilde = st.s1_vec - std::conj(st.a) * st.r1_vec;
  const HermitianMatrix pi1 = outer(v_tilde, c1 / norm) + (decomp.P1() - outer(st.r1_vec, 1.0));
  const HermitianMatrix pi2 =
      outer(rbar_tilde, c2 / norm) + (decomp.P2() - outer(st.s1_vec, 1.0));

  Povm povm = Povm::from_conclusive(pi1, pi2, Provenance::SingleOverlap);
  povm.parameters = {{"c1", c1}, {"c2", c2}, {"abs_a", std::sqrt(a2)}, {"r1", st.r1}, {"s1", st.s1}};
  return make_result(std::move(povm), problem);
}

StrategyResult solve_state_filtering(const DiscriminationProblem& problem,
                                     const SubspaceDecomposition& decomp) {
  if (problem.rho1().rank() != 1)
    throw StructureMismatch("solve_state_filtering: rho1 must be a pure state");
  const auto stats = overlap_stats(decomp, problem.rho1(), problem.rho2());
  require_window(fidelity_bound_window(stats, problem), "solve_state_filtering");

  const double eta1 = problem.eta1();
  const double eta2 = problem.eta2();
  const double F = stats.F;
  const double p = stats.t_p2_r1;  // |P2 r1|^2
  const auto& side = decomp.first;
  const auto n = problem.dim();

  double c1 = 0.0;
  double c2 = 0.0;
  HermitianMatrix pi1 = HermitianMatrix::zero(n);
  HermitianMatrix pi2 = decomp.P2_prime();
  if (side.perpendicular_dim == 1) {
    c1 = unit_clamp(1.0 - std::sqrt(eta2 / eta1) * F);
    pi1 = outer(side.perpendicular_basis.col(0), std::min(c1 / (1.0 - p), 1.0));
  }
  if (side.complement_dim == 1 && F > 0.0) {
    c2 = unit_clamp(1.0 - std::sqrt(eta1 / eta2) * p / F);
    pi2 = outer(side.complement_basis.col(0), std::min(c2 / (1.0 - p), 1.0)) + pi2;
  }
  Povm povm = Povm::from_conclusive(pi1, pi2, Provenance::Filtering);
  povm.parameters = {{"c1", c1}, {"c2", c2}, {"p", p}};
  return make_result(std::move(povm), problem);
}

DecompositionDims dims_of(const SubspaceDecomposition& d) {
  DecompositionDims out;
  out.d1 = d.first.rank;
  out.d2 = d.second.rank;
  out.d1_par = d.first.parallel_dim;
  out.d1_perp = d.first.perpendicular_dim;
  out.d1_bar = d.first.complement_dim;
  out.d2_prime = d.first.residual_dim;
  out.d2_par = d.second.parallel_dim;
  out.d2_perp = d.second.perpendicular_dim;
  out.d2_bar = d.second.complement_dim;
  out.d1_prime = d.second.residual_dim;
  return out;
}

AnalysisReport analyze(const DiscriminationProblem& problem, const AnalyzeOptions& options) {
  const auto decomp = decompose(problem.rho1(), problem.rho2());
  const auto stats = overlap_stats(decomp, problem.rho1(), problem.rho2());
  AnalysisReport report{problem,
                        dims_of(decomp),
                        stats,
                        fidelity_bound_window(stats, problem),
                        von_neumann_strategies(problem, decomp),
                        fidelity_bound(problem, stats.F)};
  report.q_upper = std::min(report.von_neumann.n1_par.q, report.von_neumann.n2_par.q);
  report.indiscriminable = decomp.indiscriminable();
  report.special_case = recognize_special_case(problem, decomp, stats);

  try {
    switch (report.special_case) {
      case SpecialCase::Filtering:
        if (problem.rho1().rank() == 1) {
          report.optimal = solve_state_filtering(problem, decomp);
        } else {
          auto mirrored = solve_state_filtering(problem.swapped(), decomp.mirrored());
          mirrored.povm = mirrored.povm.swapped();
          mirrored.q = failure_probability(mirrored.povm, problem);
          report.optimal = std::move(mirrored);
        }
        break;
      case SpecialCase::SingleOverlap:
        report.optimal = solve_single_overlap(problem, decomp);
        break;
      case SpecialCase::RankD2D:
        report.optimal = solve_rank_d_2d(problem, decomp);
        break;
      case SpecialCase::None:
        break;
    }
  } catch (const PriorsOutsideWindow&) {
    report.optimal.reset();
  }

  if (options.run_oracle) report.oracle = optimize(problem, decomp, options.oracle);
  return report;
}

DiscriminationProblem comparison_problem(const Vector& psi1, const Vector& psi2, double p1) {
  if (psi1.size() == 0 || psi1.size() != psi2.size())
    throw DimensionError("comparison: psi1 and psi2 must be non-empty and of equal dimension");
  for (const Vector* psi : {&psi1, &psi2}) {
    if (std::abs(psi->squaredNorm() - 1.0) > kDefaultTolerances.trace)
      throw InvalidProblem("comparison: input vectors must be normalized");
  }
  if (!(p1 > 0.0 && p1 < 1.0)) throw InvalidProblem("comparison: p1 must lie in (0, 1)");

  auto product = [](const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
  };
  Matrix same(psi1.size() * psi1.size(), 2);
  same << product(psi1, psi1), product(psi2, psi2);
  Matrix different(psi1.size() * psi1.size(), 2);
  different << product(psi1, psi2), product(psi2, psi1);
  const double halves[] = {0.5, 0.5};

  const double p2 = 1.0 - p1;
  return DiscriminationProblem(assert_density(mixture(halves, same)),
                               assert_density(mixture(halves, different)), p1 * p1 + p2 * p2);
}

ComparisonReport solve_state_comparison(const Vector& psi1, const Vector& psi2, double p1,
                                        const AnalyzeOptions& options) {
  const DiscriminationProblem problem = comparison_problem(psi1, psi2, p1);
  ComparisonReport out{analyze(problem, options)};

  const double F = std::min(std::abs(psi1.dot(psi2)), 1.0);
  const double eta1 = problem.eta1();
  const double eta2 = problem.eta2();
  const double eta_min = std::min(eta1, eta2);
  const double eta_max = std::max(eta1, eta2);
  out.overlap = F;
  if (std::sqrt(eta_min / eta_max) + kWindowTolerance >= 2.0 * F / (1.0 + F * F)) {
    out.branch = 1;
    out.q_opt = 2.0 * std::sqrt(eta1 * eta2) * F;
  } else {
    out.branch = 2;
    out.q_opt = eta_max * 2.0 * F * F / (1.0 + F * F) + eta_min * (1.0 + F * F) / 2.0;
  }

  const auto& vn = out.analysis.von_neumann;
  if (out.analysis.optimal)
    out.measurement = *out.analysis.optimal;
  else
    out.measurement = vn.n1_par.q <= vn.n2_par.q ? vn.n1_par : vn.n2_par;
  out.measurement.povm.provenance = Provenance::Comparison;
  return out;
}

}  // namespace uqsd
