#include "uqsd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

namespace uqsd {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

// Orthonormal basis of k x k Hermitian matrices under <A, B> = Tr(AB).
std::vector<Matrix> hermitian_basis(Eigen::Index k) {
  std::vector<Matrix> out;
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < k; ++i) {
    Matrix e = Matrix::Zero(k, k);
    e(i, i) = 1.0;
    out.push_back(e);
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      Matrix re = Matrix::Zero(k, k);
      re(i, j) = s;
      re(j, i) = s;
      out.push_back(re);
      Matrix im = Matrix::Zero(k, k);
      im(i, j) = Complex(0.0, -s);
      im(j, i) = Complex(0.0, s);
      out.push_back(im);
    }
  }
  return out;
}

// One PSD coefficient block: the operator is K X K^dagger with X >= 0.
struct Block {
  Matrix K;     // n x k, orthonormal columns
  Matrix C;     // m x k, K expressed in the constraint basis
  Matrix G;     // k x k, prior-weighted state compressed onto K
  std::vector<Matrix> basis;
  std::vector<Matrix> embedded;  // C E_p C^dagger

  Eigen::Index k() const { return K.cols(); }
};

// Everything the barrier needs: maximize Tr(G1 alpha) + Tr(G2 beta) subject to
// alpha, beta >= 0 and I_m - C1 alpha C1^dagger - C2 beta C2^dagger >= 0.
struct Program {
  Block b1;
  Block b2;
  Matrix fixed_pi2;  // n x n, part of Pi2 that is not optimized
  Eigen::Index m = 0;
  Eigen::Index n = 0;
};

Block make_block(const Matrix& K, const Matrix& Y, const Matrix& weighted_rho) {
  Block b;
  b.K = K;
  b.C = Y.adjoint() * K;
  b.G = K.adjoint() * weighted_rho * K;
  b.G = 0.5 * (b.G + b.G.adjoint()).eval();
  b.basis = hermitian_basis(K.cols());
  for (const auto& e : b.basis) b.embedded.push_back(b.C * e * b.C.adjoint());
  return b;
}

std::optional<double> log_det_pd(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double d = llt.matrixLLT()(i, i).real();
    if (!(d > 0.0)) return std::nullopt;
    acc += 2.0 * std::log(d);
  }
  return acc;
}

Matrix slack(const Program& p, const Matrix& alpha, const Matrix& beta) {
  Matrix s = Matrix::Identity(p.m, p.m);
  if (p.b1.k()) s -= p.b1.C * alpha * p.b1.C.adjoint();
  if (p.b2.k()) s -= p.b2.C * beta * p.b2.C.adjoint();
  return 0.5 * (s + s.adjoint());
}

double objective(const Program& p, const Matrix& alpha, const Matrix& beta) {
  double v = 0.0;
  if (p.b1.k()) v += trace_product(p.b1.G, alpha);
  if (p.b2.k()) v += trace_product(p.b2.G, beta);
  return v;
}

std::optional<double> barrier_value(const Program& p, double t, const Matrix& alpha,
                                    const Matrix& beta) {
  const auto la = log_det_pd(alpha);
  const auto lb = log_det_pd(beta);
  const auto ls = log_det_pd(slack(p, alpha, beta));
  if (!la || !lb || !ls) return std::nullopt;
  return -t * objective(p, alpha, beta) - *la - *lb - *ls;
}

struct BarrierRun {
  Matrix alpha;
  Matrix beta;
  int iterations = 0;
};

constexpr int kMaxCenteringSteps = 40;

BarrierRun run_barrier(const Program& p, Matrix alpha, Matrix beta, const OracleSettings& settings) {
  const Eigen::Index k1 = p.b1.k();
  const Eigen::Index k2 = p.b2.k();
  const Eigen::Index n1 = static_cast<Eigen::Index>(p.b1.basis.size());
  const Eigen::Index n2 = static_cast<Eigen::Index>(p.b2.basis.size());
  const Eigen::Index nvar = n1 + n2;
  const double nu = static_cast<double>(k1 + k2 + p.m);

  BarrierRun run;
  double t = 1.0;
  std::vector<Matrix> za(static_cast<std::size_t>(nvar));
  std::vector<Matrix> zs(static_cast<std::size_t>(nvar));

  while (run.iterations < settings.max_iterations) {
    // Centering for the current weight. At large t rounding keeps the Newton
    // decrement from reaching the tolerance, so each stage is capped.
    const int stage_end = run.iterations + kMaxCenteringSteps;
    while (run.iterations < std::min(stage_end, settings.max_iterations)) {
      const Matrix s_inv = slack(p, alpha, beta).inverse();
      const Matrix a_inv = k1 ? Matrix(alpha.inverse()) : Matrix();
      const Matrix b_inv = k2 ? Matrix(beta.inverse()) : Matrix();

      Eigen::VectorXd grad(nvar);
      for (Eigen::Index q = 0; q < nvar; ++q) {
        const bool first = q < n1;
        const Block& blk = first ? p.b1 : p.b2;
        const auto idx = static_cast<std::size_t>(first ? q : q - n1);
        const Matrix& e = blk.basis[idx];
        za[static_cast<std::size_t>(q)] = (first ? a_inv : b_inv) * e;
        zs[static_cast<std::size_t>(q)] = s_inv * blk.embedded[idx];
        grad(q) = -t * trace_product(blk.G, e) - za[static_cast<std::size_t>(q)].trace().real() +
                  zs[static_cast<std::size_t>(q)].trace().real();
      }
      Eigen::MatrixXd hess(nvar, nvar);
      for (Eigen::Index q = 0; q < nvar; ++q) {
        for (Eigen::Index r = q; r < nvar; ++r) {
          double h = trace_product(zs[static_cast<std::size_t>(q)], zs[static_cast<std::size_t>(r)]);
          if ((q < n1) == (r < n1))
            h += trace_product(za[static_cast<std::size_t>(q)], za[static_cast<std::size_t>(r)]);
          hess(q, r) = h;
          hess(r, q) = h;
        }
      }
      const Eigen::VectorXd step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      ++run.iterations;
      if (!std::isfinite(decrement) || decrement / 2.0 <= settings.step_tolerance) break;

      Matrix d_alpha = Matrix::Zero(k1, k1);
      Matrix d_beta = Matrix::Zero(k2, k2);
      for (Eigen::Index q = 0; q < n1; ++q) d_alpha += step(q) * p.b1.basis[static_cast<std::size_t>(q)];
      for (Eigen::Index q = 0; q < n2; ++q)
        d_beta += step(n1 + q) * p.b2.basis[static_cast<std::size_t>(q)];

      const double current = *barrier_value(p, t, alpha, beta);
      double s = 1.0;
      bool moved = false;
      while (s > 1e-14) {
        const Matrix a_try = alpha + s * d_alpha;
        const Matrix b_try = beta + s * d_beta;
        const auto value = barrier_value(p, t, a_try, b_try);
        if (value && *value <= current - 0.25 * s * decrement) {
          alpha = a_try;
          beta = b_try;
          moved = true;
          break;
        }
        s *= 0.5;
      }
      if (!moved) break;
    }
    if (nu / t < settings.gap_tolerance) break;
    t *= 10.0;
  }
  run.alpha = std::move(alpha);
  run.beta = std::move(beta);
  return run;
}

Matrix random_psd(Eigen::Index k, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  Matrix x = a.adjoint() * a + 1e-3 * Matrix::Identity(k, k);
  return 0.5 * (x + x.adjoint());
}

double largest_eigenvalue(const Matrix& h) {
  if (h.rows() == 0) return 0.0;
  return spectral_decompose(HermitianMatrix::symmetrize(h)).eigenvalues(0);
}

// Clips negative coefficient eigenvalues, then shrinks Pi1 and Pi2 together
// until Pi0 is PSD.
Povm project_feasible(const Program& p, Matrix alpha, Matrix beta) {
  auto clip = [](const Matrix& x) -> Matrix {
    if (x.rows() == 0) return x;
    const auto spec = spectral_decompose(HermitianMatrix::symmetrize(x));
    return spec.eigenvectors * spec.eigenvalues.cwiseMax(0.0).asDiagonal() *
           spec.eigenvectors.adjoint();
  };
  alpha = clip(alpha);
  beta = clip(beta);
  Matrix load = Matrix::Zero(p.m, p.m);
  if (p.b1.k()) load += p.b1.C * alpha * p.b1.C.adjoint();
  if (p.b2.k()) load += p.b2.C * beta * p.b2.C.adjoint();
  const double top = largest_eigenvalue(load);
  if (top > 1.0) {
    alpha /= top;
    beta /= top;
  }
  Matrix pi1 = Matrix::Zero(p.n, p.n);
  Matrix pi2 = p.fixed_pi2;
  if (p.b1.k()) pi1 += p.b1.K * alpha * p.b1.K.adjoint();
  if (p.b2.k()) pi2 += p.b2.K * beta * p.b2.K.adjoint();
  return Povm::from_conclusive(HermitianMatrix::symmetrize(pi1), HermitianMatrix::symmetrize(pi2),
                               Provenance::Oracle);
}

OracleResult solve_program(const Program& p, const DiscriminationProblem& problem,
                           const OracleSettings& settings) {
  if (settings.restarts < 1 || settings.max_iterations < 1 || !(settings.step_tolerance > 0.0) ||
      !(settings.gap_tolerance > 0.0))
    throw InvalidProblem("oracle settings must all be positive");

  auto finish = [&](Povm povm, int iterations, int restart) {
    const auto verdict = verify_povm(povm, problem, 1e-7);
    if (!verdict.ok()) {
      std::ostringstream os;
      os << "oracle iterate failed verification after projection (completeness "
         << verdict.completeness_defect << ", min eigenvalue " << verdict.min_eigenvalue
         << ", ambiguity " << verdict.ambiguity << ")";
      throw InfeasibleProjection(os.str());
    }
    OracleResult r;
    r.q = verdict.failure_prob;
    r.povm = std::move(povm);
    r.certified_feasible = true;
    r.iterations_used = iterations;
    r.best_restart = restart;
    return r;
  };

  if (p.b1.k() == 0 && p.b2.k() == 0)
    return finish(project_feasible(p, Matrix(), Matrix()), 0, 0);

  std::optional<OracleResult> best;
  double worst_q = -std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < settings.restarts; ++restart) {
    std::mt19937_64 rng(derive_seed(settings.seed, static_cast<std::uint64_t>(restart)));
    Matrix alpha = random_psd(p.b1.k(), rng);
    Matrix beta = random_psd(p.b2.k(), rng);
    Matrix load = Matrix::Zero(p.m, p.m);
    if (p.b1.k()) load += p.b1.C * alpha * p.b1.C.adjoint();
    if (p.b2.k()) load += p.b2.C * beta * p.b2.C.adjoint();
    const double scale = 0.5 / std::max(largest_eigenvalue(load), 1e-300);
    alpha *= scale;
    beta *= scale;

    BarrierRun run = run_barrier(p, std::move(alpha), std::move(beta), settings);
    OracleResult r = finish(project_feasible(p, run.alpha, run.beta), run.iterations, restart);
    worst_q = std::max(worst_q, r.q);
    if (!best || r.q < best->q) best = std::move(r);
  }
  best->restart_spread = worst_q - best->q;
  return *best;
}

Matrix kernel_basis(const DensityOperator& rho) {
  return rho.eigenvectors().rightCols(rho.dim() - rho.rank());
}

}  // namespace

OracleResult optimize(const DiscriminationProblem& problem, const SubspaceDecomposition& decomp,
                      const OracleSettings& settings) {
  if (decomp.dim != problem.dim()) throw DimensionError("optimize: decomposition dimension mismatch");
  const auto& side = decomp.first;
  Program p;
  p.n = problem.dim();
  Matrix y(p.n, side.parallel_dim + side.perpendicular_dim);
  y << side.parallel_basis, side.perpendicular_basis;
  p.m = y.cols();
  p.b1 = make_block(side.perpendicular_basis, y, problem.eta1() * problem.rho1().matrix());
  p.b2 = make_block(side.complement_basis, y, problem.eta2() * problem.rho2().matrix());
  p.fixed_pi2 = side.residual.matrix();
  return solve_program(p, problem, settings);
}

OracleResult optimize_unrestricted(const DiscriminationProblem& problem,
                                   const OracleSettings& settings) {
  Program p;
  p.n = problem.dim();
  p.m = p.n;
  const Matrix y = Matrix::Identity(p.n, p.n);
  p.b1 = make_block(kernel_basis(problem.rho2()), y, problem.eta1() * problem.rho1().matrix());
  p.b2 = make_block(kernel_basis(problem.rho1()), y, problem.eta2() * problem.rho2().matrix());
  p.fixed_pi2 = Matrix::Zero(p.n, p.n);
  return solve_program(p, problem, settings);
}

}  // namespace uqsd
