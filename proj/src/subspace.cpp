#include "uqsd/subspace.hpp"

#include <algorithm>
#include <utility>

namespace uqsd {

SupportProjector support_projector(const DensityOperator& rho) {
  return {projector_from_basis(rho.support_basis()), rho.rank()};
}

Matrix gram_schmidt(const Matrix& candidates, double drop_tol) {
  Matrix basis(candidates.rows(), candidates.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index k = 0; k < candidates.cols(); ++k) {
    Vector v = candidates.col(k);
    for (int pass = 0; pass < 2; ++pass) {
      if (kept > 0) v -= basis.leftCols(kept) * (basis.leftCols(kept).adjoint() * v);
    }
    const double norm = v.norm();
    if (norm <= drop_tol) continue;
    basis.col(kept++) = v / norm;
  }
  return basis.leftCols(kept);
}

Matrix parallel_basis(const DensityOperator& rho1, const HermitianMatrix& P2) {
  if (rho1.dim() != P2.dim()) throw DimensionError("parallel_basis: dimension mismatch");
  return gram_schmidt(P2.matrix() * rho1.support_basis());
}

Matrix perpendicular_basis(const DensityOperator& rho1, const HermitianMatrix& P2) {
  if (rho1.dim() != P2.dim()) throw DimensionError("perpendicular_basis: dimension mismatch");
  const Matrix complement = Matrix::Identity(P2.dim(), P2.dim()) - P2.matrix();
  return gram_schmidt(complement * rho1.support_basis());
}

namespace {

SideFamily build_side(const DensityOperator& own, const HermitianMatrix& other_support) {
  const Eigen::Index n = own.dim();
  SideFamily side;
  side.support_basis = own.support_basis();
  side.support = projector_from_basis(side.support_basis);
  side.rank = own.rank();

  side.parallel_basis = parallel_basis(own, other_support);
  side.perpendicular_basis = perpendicular_basis(own, other_support);
  side.parallel = projector_from_basis(side.parallel_basis);
  side.perpendicular = projector_from_basis(side.perpendicular_basis);
  side.parallel_dim = static_cast<int>(side.parallel_basis.cols());
  side.perpendicular_dim = static_cast<int>(side.perpendicular_basis.cols());

  side.complement = side.parallel + side.perpendicular - side.support;
  side.complement_basis = range_basis(side.complement);
  side.complement_dim = side.parallel_dim + side.perpendicular_dim - side.rank;

  side.residual = HermitianMatrix::identity(n) - side.parallel - side.perpendicular;
  side.residual_basis = range_basis(side.residual);
  side.residual_dim = static_cast<int>(side.residual_basis.cols());
  return side;
}

}  // namespace

SubspaceDecomposition decompose(const DensityOperator& rho1, const DensityOperator& rho2) {
  if (rho1.dim() != rho2.dim()) throw DimensionError("decompose: dimension mismatch");
  SubspaceDecomposition d;
  d.dim = rho1.dim();
  const auto p1 = support_projector(rho1);
  const auto p2 = support_projector(rho2);
  d.first = build_side(rho1, p2.projector);
  d.second = build_side(rho2, p1.projector);
  return d;
}

SubspaceDecomposition SubspaceDecomposition::mirrored() const {
  SubspaceDecomposition d = *this;
  std::swap(d.first, d.second);
  return d;
}

OverlapStats overlap_stats(const SubspaceDecomposition& decomp, const DensityOperator& rho1,
                           const DensityOperator& rho2) {
  if (decomp.dim != rho1.dim() || decomp.dim != rho2.dim())
    throw DimensionError("overlap_stats: dimension mismatch");
  auto unit = [](double x) { return std::clamp(x, 0.0, 1.0); };
  OverlapStats s;
  s.F = fidelity(rho1, rho2);
  s.t_p1_r2 = unit(trace_product(decomp.P1().matrix(), rho2.matrix()));
  s.t_p2_r1 = unit(trace_product(decomp.P2().matrix(), rho1.matrix()));
  s.t_p1par_r2 = unit(trace_product(decomp.P1_par().matrix(), rho2.matrix()));
  s.t_p2par_r1 = unit(trace_product(decomp.P2_par().matrix(), rho1.matrix()));
  return s;
}

int numerical_rank(const HermitianMatrix& h, double tol) {
  const auto spec = spectral_decompose(h);
  const double scale = std::max(1.0, spec.eigenvalues.cwiseAbs().maxCoeff());
  return static_cast<int>((spec.eigenvalues.array().abs() > tol * scale).count());
}

}  // namespace uqsd
