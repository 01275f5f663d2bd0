#pragma once

// Complex Hermitian matrix primitives: validation, spectral decomposition,
// PSD square root, fidelity and trace functionals.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uqsd/errors.hpp"

namespace uqsd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Numerical tolerances used throughout. The rank threshold is relative to
/// the largest eigenvalue; every other value is absolute.
struct Tolerances {
  double herm = 1e-10;
  double psd = 1e-9;
  double trace = 1e-9;
  double rank = 1e-10;
  double orth = 1e-10;
  double recon = 1e-9;
};

inline constexpr Tolerances kDefaultTolerances{};

/// Largest absolute entry of a matrix (0 for an empty matrix).
double max_abs(const Matrix& m);

/// Throws InvalidMatrix unless `m` is square, non-empty and finite.
void require_square_finite(const Matrix& m, const char* what);

/// Hermitian matrix stored in exactly symmetrized form (H + H^dagger) / 2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  /// Validates `m` against `tol_herm` and symmetrizes it.
  static HermitianMatrix from(const Matrix& m, double tol_herm = kDefaultTolerances.herm);
  /// Symmetrizes without checking; for operators that are Hermitian by construction.
  static HermitianMatrix symmetrize(const Matrix& m);
  static HermitianMatrix identity(Eigen::Index dim);
  static HermitianMatrix zero(Eigen::Index dim);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  /// max |H - H^dagger| of the matrix before symmetrization.
  double hermiticity_defect() const { return defect_; }

  double trace() const { return m_.trace().real(); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b);
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b);
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a);

 private:
  Matrix m_;
  double defect_ = 0.0;
};

struct SpectralDecomposition {
  RealVector eigenvalues;  // descending
  Matrix eigenvectors;     // columns, unitary
};

/// H = V diag(lambda) V^dagger with eigenvalues sorted descending.
SpectralDecomposition spectral_decompose(const HermitianMatrix& h);

/// PSD square root. Eigenvalues in [-tol_psd, 0) are clamped to zero.
HermitianMatrix psd_sqrt(const HermitianMatrix& h, double tol_psd = kDefaultTolerances.psd);

/// Orthogonal projector onto the span of the given orthonormal columns.
HermitianMatrix projector_from_basis(const Matrix& basis);

/// Orthonormal basis of the eigenspace of a projector-like operator with
/// eigenvalue above 1/2.
Matrix range_basis(const HermitianMatrix& projector);

/// Trace-one PSD Hermitian operator with cached spectral data.
class DensityOperator {
 public:
  DensityOperator() = default;

  const HermitianMatrix& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  Eigen::Index dim() const { return op_.dim(); }
  /// All eigenvalues, descending.
  const RealVector& eigenvalues() const { return eigenvalues_; }
  /// Unitary matrix of eigenvectors, columns ordered like eigenvalues().
  const Matrix& eigenvectors() const { return eigenvectors_; }
  /// Number of eigenvalues above tol_rank relative to the largest one.
  int rank() const { return rank_; }

  /// Retained (nonzero) eigenvalues r_l, descending.
  RealVector support_eigenvalues() const { return eigenvalues_.head(rank_); }
  /// Orthonormal eigenvectors |r_l> spanning the support.
  Matrix support_basis() const { return eigenvectors_.leftCols(rank_); }

  friend DensityOperator assert_density(const Matrix& m, const Tolerances& tol);

 private:
  HermitianMatrix op_;
  RealVector eigenvalues_;
  Matrix eigenvectors_;
  int rank_ = 0;
};

/// Validates a candidate density matrix: Hermitian within tol.herm, no
/// eigenvalue below -tol.psd, |Tr - 1| <= tol.trace (renormalized to one).
DensityOperator assert_density(const Matrix& m, const Tolerances& tol = kDefaultTolerances);

/// Pure state |psi><psi|; `psi` must be a unit vector within tol.trace.
DensityOperator pure_state(const Vector& psi, const Tolerances& tol = kDefaultTolerances);

/// sum_i weights[i] |v_i><v_i| for the given columns.
Matrix mixture(std::span<const double> weights, const Matrix& vectors);

/// Tr[(sqrt(rho2) rho1 sqrt(rho2))^(1/2)], clipped to [0, 1].
double fidelity(const DensityOperator& rho1, const DensityOperator& rho2);

/// Re Tr(a b) for Hermitian arguments.
double trace_product(const Matrix& a, const Matrix& b);

/// Two states with prior probabilities; eta2 is always 1 - eta1.
class DiscriminationProblem {
 public:
  DiscriminationProblem(DensityOperator rho1, DensityOperator rho2, double eta1);

  const DensityOperator& rho1() const { return rho1_; }
  const DensityOperator& rho2() const { return rho2_; }
  double eta1() const { return eta1_; }
  double eta2() const { return 1.0 - eta1_; }
  Eigen::Index dim() const { return rho1_.dim(); }

  /// The same problem with the roles of the two states exchanged.
  DiscriminationProblem swapped() const;

 private:
  DensityOperator rho1_;
  DensityOperator rho2_;
  double eta1_;
};

}  // namespace uqsd
