#include "uqsd/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace uqsd {

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

void require_square_finite(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw InvalidMatrix(os.str());
  }
  if (!m.allFinite()) throw InvalidMatrix(std::string(what) + ": matrix has non-finite entries");
}

HermitianMatrix HermitianMatrix::from(const Matrix& m, double tol_herm) {
  require_square_finite(m, "HermitianMatrix");
  const double defect = max_abs(m - m.adjoint());
  if (defect > tol_herm) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max |H - H^dagger| = " << defect << " > " << tol_herm;
    throw NotHermitian(os.str());
  }
  HermitianMatrix h;
  h.m_ = 0.5 * (m + m.adjoint());
  h.defect_ = defect;
  return h;
}

HermitianMatrix HermitianMatrix::symmetrize(const Matrix& m) {
  HermitianMatrix h;
  h.m_ = 0.5 * (m + m.adjoint());
  h.defect_ = max_abs(m - m.adjoint());
  return h;
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  HermitianMatrix h;
  h.m_ = Matrix::Identity(dim, dim);
  return h;
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index dim) {
  HermitianMatrix h;
  h.m_ = Matrix::Zero(dim, dim);
  return h;
}

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("HermitianMatrix +: dimension mismatch");
  return HermitianMatrix::symmetrize(a.m_ + b.m_);
}

HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("HermitianMatrix -: dimension mismatch");
  return HermitianMatrix::symmetrize(a.m_ - b.m_);
}

HermitianMatrix operator*(double s, const HermitianMatrix& a) {
  HermitianMatrix h;
  h.m_ = s * a.m_;
  return h;
}

SpectralDecomposition spectral_decompose(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver failed to converge (dim=" << h.dim() << ", frobenius=" << h.matrix().norm()
       << ", trace=" << h.trace() << ")";
    throw ConvergenceError(os.str());
  }
  // Eigen sorts ascending; reverse to descending.
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

HermitianMatrix psd_sqrt(const HermitianMatrix& h, double tol_psd) {
  const auto spec = spectral_decompose(h);
  const double lowest = spec.eigenvalues.size() ? spec.eigenvalues.minCoeff() : 0.0;
  if (lowest < -tol_psd) {
    std::ostringstream os;
    os << "psd_sqrt: eigenvalue " << lowest << " below -" << tol_psd;
    throw NotPositiveSemidefinite(os.str());
  }
  const RealVector roots = spec.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return HermitianMatrix::symmetrize(spec.eigenvectors * roots.asDiagonal() *
                                     spec.eigenvectors.adjoint());
}

HermitianMatrix projector_from_basis(const Matrix& basis) {
  return HermitianMatrix::symmetrize(basis * basis.adjoint());
}

Matrix range_basis(const HermitianMatrix& projector) {
  const auto spec = spectral_decompose(projector);
  Eigen::Index count = 0;
  while (count < spec.eigenvalues.size() && spec.eigenvalues(count) > 0.5) ++count;
  return spec.eigenvectors.leftCols(count);
}

DensityOperator assert_density(const Matrix& m, const Tolerances& tol) {
  require_square_finite(m, "density operator");
  HermitianMatrix h = HermitianMatrix::from(m, tol.herm);

  auto spec = spectral_decompose(h);
  const double lowest = spec.eigenvalues.minCoeff();
  if (lowest < -tol.psd) {
    std::ostringstream os;
    os << "density operator has eigenvalue " << lowest << " below -" << tol.psd;
    throw NotPositiveSemidefinite(os.str());
  }

  const double tr = h.trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    std::ostringstream os;
    os << "density operator trace is " << tr << ", |Tr - 1| > " << tol.trace;
    throw TraceDefect(os.str());
  }
  h = (1.0 / tr) * h;
  spec.eigenvalues /= tr;

  const double largest = spec.eigenvalues(0);
  int rank = 0;
  while (rank < spec.eigenvalues.size() && spec.eigenvalues(rank) > tol.rank * largest) ++rank;

  DensityOperator rho;
  rho.op_ = std::move(h);
  rho.eigenvalues_ = std::move(spec.eigenvalues);
  rho.eigenvectors_ = std::move(spec.eigenvectors);
  rho.rank_ = rank;
  return rho;
}

DensityOperator pure_state(const Vector& psi, const Tolerances& tol) {
  if (psi.size() == 0) throw InvalidMatrix("pure_state: empty vector");
  const double norm2 = psi.squaredNorm();
  if (std::abs(norm2 - 1.0) > tol.trace) {
    std::ostringstream os;
    os << "pure_state: vector norm^2 is " << norm2 << ", expected 1";
    throw TraceDefect(os.str());
  }
  return assert_density(psi * psi.adjoint(), tol);
}

Matrix mixture(std::span<const double> weights, const Matrix& vectors) {
  if (static_cast<Eigen::Index>(weights.size()) != vectors.cols())
    throw DimensionError("mixture: weight count does not match vector count");
  Matrix out = Matrix::Zero(vectors.rows(), vectors.rows());
  for (Eigen::Index i = 0; i < vectors.cols(); ++i)
    out += weights[static_cast<std::size_t>(i)] * vectors.col(i) * vectors.col(i).adjoint();
  return out;
}

double fidelity(const DensityOperator& rho1, const DensityOperator& rho2) {
  if (rho1.dim() != rho2.dim()) throw DimensionError("fidelity: dimension mismatch");
  // Tr sqrt(sqrt(rho2) rho1 sqrt(rho2)) is the trace norm of sqrt(rho1) sqrt(rho2),
  // whose singular values are those of diag(sqrt r) R^dagger S diag(sqrt s).
  // Taking singular values avoids square roots of rounding-level eigenvalues.
  const RealVector r = rho1.support_eigenvalues().cwiseSqrt();
  const RealVector s = rho2.support_eigenvalues().cwiseSqrt();
  const Matrix core =
      r.cast<Complex>().asDiagonal() * (rho1.support_basis().adjoint() * rho2.support_basis()) *
      s.cast<Complex>().asDiagonal();
  const double f = Eigen::JacobiSVD<Matrix>(core).singularValues().sum();
  return std::clamp(f, 0.0, 1.0);
}

double trace_product(const Matrix& a, const Matrix& b) {
  return (a.transpose().cwiseProduct(b)).sum().real();
}

DiscriminationProblem::DiscriminationProblem(DensityOperator rho1, DensityOperator rho2,
                                             double eta1)
    : rho1_(std::move(rho1)), rho2_(std::move(rho2)), eta1_(eta1) {
  if (rho1_.dim() != rho2_.dim()) {
    std::ostringstream os;
    os << "states have different dimensions (" << rho1_.dim() << " vs " << rho2_.dim() << ")";
    throw DimensionError(os.str());
  }
  if (!(eta1_ > 0.0 && eta1_ < 1.0)) {
    std::ostringstream os;
    os << "prior eta1 = " << eta1_ << " must lie in (0, 1)";
    throw InvalidProblem(os.str());
  }
}

DiscriminationProblem DiscriminationProblem::swapped() const {
  return DiscriminationProblem(rho2_, rho1_, eta2());
}

}  // namespace uqsd
