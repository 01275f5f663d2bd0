#pragma once

// Projector family built from the supports of two density operators:
// support projectors, the parallel/perpendicular split of each support with
// respect to the other, the complement inside H10 and the residual subspace.

#include "uqsd/hermitian.hpp"

namespace uqsd {

/// Projectors seen from one state's side. For the first state these are
/// P1, P1_par, P1_perp, P1_bar and P2_prime; the second side holds the
/// mirrored set P2, P2_par, P2_perp, P2_bar and P1_prime.
struct SideFamily {
  HermitianMatrix support;        // P_k
  HermitianMatrix parallel;       // projector onto span{P_other |r_l>}
  HermitianMatrix perpendicular;  // projector onto span{(I - P_other) |r_l>}
  HermitianMatrix complement;     // parallel + perpendicular - support
  HermitianMatrix residual;       // I - parallel - perpendicular

  Matrix support_basis;
  Matrix parallel_basis;
  Matrix perpendicular_basis;
  Matrix complement_basis;
  Matrix residual_basis;

  int rank = 0;
  int parallel_dim = 0;
  int perpendicular_dim = 0;
  int complement_dim = 0;
  int residual_dim = 0;
};

struct SubspaceDecomposition {
  SideFamily first;   // built from rho1's eigenvectors
  SideFamily second;  // built from rho2's eigenvectors
  Eigen::Index dim = 0;

  const HermitianMatrix& P1() const { return first.support; }
  const HermitianMatrix& P2() const { return second.support; }
  const HermitianMatrix& P1_par() const { return first.parallel; }
  const HermitianMatrix& P1_perp() const { return first.perpendicular; }
  const HermitianMatrix& P1_bar() const { return first.complement; }
  const HermitianMatrix& P2_prime() const { return first.residual; }
  const HermitianMatrix& P2_par() const { return second.parallel; }
  const HermitianMatrix& P2_perp() const { return second.perpendicular; }
  const HermitianMatrix& P2_bar() const { return second.complement; }
  const HermitianMatrix& P1_prime() const { return second.residual; }

  /// Decomposition of the swapped problem (rho2, rho1).
  SubspaceDecomposition mirrored() const;
  /// No perpendicular component on either side: unambiguous discrimination
  /// is impossible.
  bool indiscriminable() const { return first.perpendicular_dim == 0 && second.perpendicular_dim == 0; }
};

/// The five scalars that govern the optimum.
struct OverlapStats {
  double F = 0.0;
  double t_p1_r2 = 0.0;     // Tr(P1 rho2)
  double t_p2_r1 = 0.0;     // Tr(P2 rho1)
  double t_p1par_r2 = 0.0;  // Tr(P1_par rho2)
  double t_p2par_r1 = 0.0;  // Tr(P2_par rho1)
};

struct SupportProjector {
  HermitianMatrix projector;
  int rank = 0;
};

SupportProjector support_projector(const DensityOperator& rho);

/// Orthonormalizes `candidates` column by column with classical Gram-Schmidt
/// applied twice. Columns whose norm after deflation is at most `drop_tol`
/// are discarded.
Matrix gram_schmidt(const Matrix& candidates, double drop_tol = kDefaultTolerances.rank);

/// Orthonormal basis {|h_k>} of the span of P2 |r_l>.
Matrix parallel_basis(const DensityOperator& rho1, const HermitianMatrix& P2);

/// Orthonormal basis {|v_i>} of the span of (I - P2) |r_l>.
Matrix perpendicular_basis(const DensityOperator& rho1, const HermitianMatrix& P2);

SubspaceDecomposition decompose(const DensityOperator& rho1, const DensityOperator& rho2);

OverlapStats overlap_stats(const SubspaceDecomposition& decomp, const DensityOperator& rho1,
                           const DensityOperator& rho2);

/// Numerical rank of a Hermitian matrix: eigenvalues above tol * max(1, |lambda_max|).
int numerical_rank(const HermitianMatrix& h, double tol);

}  // namespace uqsd
