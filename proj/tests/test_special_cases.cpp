#include <doctest.h>

#include <cmath>

#include "support/test_support.hpp"
#include "uqsd/strategies.hpp"

using namespace uqsd;
using namespace uqsd::testing;

namespace {

struct Solved {
  DiscriminationProblem problem;
  SubspaceDecomposition decomp;
  OverlapStats stats;
};

Solved prepare(const Instance& inst) {
  auto p = to_problem(inst);
  auto d = decompose(p.rho1(), p.rho2());
  auto st = overlap_stats(d, p.rho1(), p.rho2());
  return {std::move(p), std::move(d), st};
}

/// Optimality conditions every closed-form optimum inside its window must meet.
void check_optimal(const Solved& s, const StrategyResult& r) {
  const auto& p = s.problem;
  const double eta1 = p.eta1();
  const double eta2 = p.eta2();
  const double F = ref_fidelity(p.rho1().matrix(), p.rho2().matrix());
  const double target = std::sqrt(eta1 * eta2) * F;
  const Matrix& pi0 = r.povm.Pi0.matrix();

  CHECK(verify_povm(r.povm, p, 1e-8).ok());
  CHECK(std::abs(r.q - 2.0 * target) < 1e-9);
  CHECK(std::abs(eta1 * ref_trace(p.rho1().matrix(), pi0) - target) < 1e-8);
  CHECK(std::abs(eta2 * ref_trace(p.rho2().matrix(), pi0) - target) < 1e-8);
  const Matrix root = ref_sqrt(pi0);
  const Matrix residual =
      root * (eta2 * p.rho2().matrix() - eta1 * p.rho1().matrix()) * root;
  CHECK(max_entry(residual) < 1e-8);
}

OracleSettings quick_oracle() {
  OracleSettings s;
  s.restarts = 4;
  return s;
}

}  // namespace

TEST_CASE("rank-d/2d at equal priors") {
  const auto s = prepare(rank_d_2d({0.5, 0.5}, Matrix::Identity(4, 4)));
  const auto r = solve_rank_d_2d(s.problem, s.decomp);
  const double alpha = 2.0 - std::sqrt(2.0);
  CHECK(std::abs(r.povm.parameters.at("alpha") - alpha) < 1e-12);
  CHECK(std::abs(r.povm.parameters.at("beta") - alpha) < 1e-12);
  CHECK(std::abs(r.povm.parameters.at("lambda1") - (2.0 * std::sqrt(2.0) - 2.0)) < 1e-12);
  CHECK(std::abs(r.q - 1.0 / std::sqrt(2.0)) < 1e-12);
  check_optimal(s, r);

  const auto oracle = optimize(s.problem, s.decomp, quick_oracle());
  CHECK(std::abs(oracle.q - r.q) < 1e-6);
}

TEST_CASE("rank-d/2d window edges collapse to von Neumann measurements") {
  Instance inst = rank_d_2d({0.5, 0.5}, Matrix::Identity(4, 4));
  inst.eta1 = 1.0 / 3.0;  // eta2/eta1 = 2
  auto s = prepare(inst);
  auto r = solve_rank_d_2d(s.problem, s.decomp);
  auto vn = von_neumann_strategies(s.problem, s.decomp);
  CHECK(std::abs(r.povm.parameters.at("alpha")) < 1e-9);
  CHECK(std::abs(r.povm.parameters.at("beta") - 1.0) < 1e-9);
  CHECK(std::abs(r.q - vn.n2_par.q) < 1e-9);

  inst.eta1 = 2.0 / 3.0;  // eta2/eta1 = 1/2
  s = prepare(inst);
  r = solve_rank_d_2d(s.problem, s.decomp);
  vn = von_neumann_strategies(s.problem, s.decomp);
  CHECK(std::abs(r.povm.parameters.at("beta")) < 1e-9);
  CHECK(std::abs(r.q - vn.n1_par.q) < 1e-9);

  inst.eta1 = 0.2;
  s = prepare(inst);
  CHECK_THROWS_AS(solve_rank_d_2d(s.problem, s.decomp), PriorsOutsideWindow);
}

TEST_CASE("rank-d/2d with unequal weights r = (0.7, 0.3)") {
  const auto s = prepare(rank_d_2d({0.7, 0.3}, Matrix::Identity(4, 4)));
  CHECK(std::abs(s.stats.F - 1.0 / std::sqrt(2.0)) < 1e-12);
  const auto r = solve_rank_d_2d(s.problem, s.decomp);
  check_optimal(s, r);
  CHECK(std::abs(optimize(s.problem, s.decomp, quick_oracle()).q - r.q) < 1e-6);
}

TEST_CASE("single overlap: equal priors and the lower window edge") {
  const Instance inst = single_overlap({0.6, 0.4}, {0.7, 0.3}, 0.5);
  auto s = prepare(inst);
  const double F = 0.5 * std::sqrt(0.42);
  auto r = solve_single_overlap(s.problem, s.decomp);
  CHECK(std::abs(r.q - F) < 1e-12);
  check_optimal(s, r);
  CHECK(std::abs(optimize(s.problem, s.decomp, quick_oracle()).q - r.q) < 1e-6);

  Instance edge = inst;
  edge.eta1 = eta1_from_ratio(0.15 / F);
  s = prepare(edge);
  r = solve_single_overlap(s.problem, s.decomp);
  const auto vn = von_neumann_strategies(s.problem, s.decomp);
  const double q0 = 2.0 * std::sqrt(edge.eta1 * (1.0 - edge.eta1)) * F;
  CHECK(std::abs(q0 - vn.n1_par.q) < 1e-9);
  CHECK(std::abs(r.q - vn.n1_par.q) < 1e-9);
  CHECK(std::abs(r.q - 0.24705882352941178) < 1e-9);

  Instance outside = inst;
  outside.eta1 = 0.95;
  s = prepare(outside);
  CHECK_THROWS_AS(solve_single_overlap(s.problem, s.decomp), PriorsOutsideWindow);
}

TEST_CASE("single overlap with a = 0 separates the states perfectly") {
  const auto s = prepare(single_overlap({0.6, 0.4}, {0.7, 0.3}, 0.0));
  const auto r = solve_single_overlap(s.problem, s.decomp);
  CHECK(std::abs(r.q) < 1e-12);
  CHECK(verify_povm(r.povm, s.problem).ok());
}

TEST_CASE("state comparison values") {
  const Vector e0 = Matrix::Identity(2, 2).col(0);
  const Vector e1 = Matrix::Identity(2, 2).col(1);
  AnalyzeOptions opts;
  opts.oracle = quick_oracle();

  const auto orth = solve_state_comparison(e0, e1, 0.3, opts);
  CHECK(std::abs(orth.q_opt) < 1e-12);

  const Vector psi = 0.6 * e0 + 0.8 * e1;
  const auto half = solve_state_comparison(e0, psi, 0.5, opts);
  CHECK(half.branch == 1);
  CHECK(std::abs(half.q_opt - 0.6) < 1e-12);
  CHECK(std::abs(half.measurement.q - 0.6) < 1e-9);
  REQUIRE(half.analysis.oracle.has_value());
  CHECK(std::abs(half.analysis.oracle->q - 0.6) < 1e-6);

  const auto skew = solve_state_comparison(e0, psi, 0.9, opts);
  CHECK(skew.branch == 2);
  CHECK(std::abs(skew.analysis.problem.eta1() - 0.82) < 1e-12);
  CHECK(std::abs(skew.q_opt - 0.5565176470588235) < 1e-12);
  CHECK(std::abs(skew.measurement.q - skew.q_opt) < 1e-9);
  REQUIRE(skew.analysis.oracle.has_value());
  CHECK(std::abs(skew.analysis.oracle->q - skew.q_opt) < 1e-6);

  CHECK_THROWS(solve_state_comparison(e0, 2.0 * psi, 0.5, opts));
  CHECK_THROWS(solve_state_comparison(e0, psi, 1.0, opts));
}

TEST_CASE("property: comparison formula against the oracle for random overlaps and priors") {
  Rng rng(31);
  AnalyzeOptions opts;
  opts.oracle = quick_oracle();
  for (int trial = 0; trial < 12; ++trial) {
    const int n = rng.integer(2, 3);
    const Vector a = random_unit_vector(rng, n);
    const Vector b = random_unit_vector(rng, n);
    const double p1 = rng.uniform(0.05, 0.95);
    const auto c = solve_state_comparison(a, b, p1, opts);
    const double F = std::abs(a.dot(b));
    CHECK(std::abs(c.q_opt - comparison_q(F, p1)) < 1e-12);
    REQUIRE(c.analysis.oracle.has_value());
    CHECK(std::abs(c.analysis.oracle->q - c.q_opt) < 1e-6);
    CHECK(verify_povm(c.measurement.povm, c.analysis.problem, 1e-8).ok());
    CHECK(std::abs(c.measurement.q - c.q_opt) < 1e-6);
  }
}

TEST_CASE("filtering: two pure states and the dimension-3 example") {
  for (double c : {0.1, 0.5, 0.9}) {
    const Vector e0 = Matrix::Identity(2, 2).col(0);
    const Vector e1 = Matrix::Identity(2, 2).col(1);
    const Vector phi = c * e0 + std::sqrt(1.0 - c * c) * e1;
    const auto s = prepare({ket_bra(e0), ket_bra(phi), 0.5});
    const auto r = solve_state_filtering(s.problem, s.decomp);
    CHECK(std::abs(r.q - c) < 1e-12);
    check_optimal(s, r);
  }

  const Matrix I3 = Matrix::Identity(3, 3);
  const Vector plus = (I3.col(0) + I3.col(1)) / std::sqrt(2.0);
  const auto s = prepare({ket_bra(I3.col(0)), 0.5 * ket_bra(plus) + 0.5 * ket_bra(I3.col(2)), 0.5});
  CHECK(std::abs(s.stats.F - 0.5) < 1e-12);
  const auto r = solve_state_filtering(s.problem, s.decomp);
  CHECK(std::abs(r.q - 0.5) < 1e-12);
  check_optimal(s, r);
  CHECK(std::abs(optimize(s.problem, s.decomp, quick_oracle()).q - 0.5) < 1e-6);

  const auto orth = prepare({ket_bra(I3.col(0)), ket_bra(I3.col(1)), 0.5});
  CHECK(std::abs(solve_state_filtering(orth.problem, orth.decomp).q) < 1e-12);
}

TEST_CASE("filtering outside the window and with the pure state second") {
  const Vector e0 = Matrix::Identity(2, 2).col(0);
  const Vector e1 = Matrix::Identity(2, 2).col(1);
  const Vector phi = 0.5 * e0 + std::sqrt(0.75) * e1;
  const auto s = prepare({ket_bra(e0), ket_bra(phi), 0.05});
  CHECK_THROWS_AS(solve_state_filtering(s.problem, s.decomp), PriorsOutsideWindow);
  const auto report = analyze(s.problem);
  CHECK_FALSE(report.optimal.has_value());
  REQUIRE(report.oracle.has_value());
  CHECK(std::abs(report.oracle->q - two_pure_q(0.5, 0.05)) < 1e-6);

  Rng rng(32);
  const Instance mixed_first{random_density(rng, 3, 2), ket_bra(random_unit_vector(rng, 3)), 0.5};
  const auto p = to_problem(mixed_first);
  const auto rep = analyze(p);
  CHECK(rep.special_case == SpecialCase::Filtering);
  if (rep.window.contains_ratio) {
    REQUIRE(rep.optimal.has_value());
    check_optimal(prepare(mixed_first), *rep.optimal);
    CHECK(std::abs(rep.oracle->q - rep.optimal->q) < 1e-6);
  }
}

TEST_CASE("property: closed forms inside their windows meet the optimality conditions") {
  Rng rng(33);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Instance inst;
    switch (trial % 3) {
      case 0: {
        const int d = rng.integer(1, 3);
        std::vector<double> r = random_weights(rng, d);
        inst = rank_d_2d(r, random_unitary(rng, 2 * d), &rng);
        inst.eta1 = eta1_from_ratio(rng.uniform(1.0 / std::sqrt(2.0), std::sqrt(2.0)));
        break;
      }
      case 1: {
        const int d1 = rng.integer(1, 3);
        const int d2 = rng.integer(1, 3);
        const int extra = rng.integer(0, 2);
        const Matrix u = random_unitary(rng, d1 + d2 + extra);
        const double a = rng.uniform(0.1, 0.95);
        const auto rw = random_weights(rng, d1);
        const auto sw = random_weights(rng, d2);
        inst = single_overlap(rw, sw, std::polar(a, rng.phase()), extra, &u);
        const double lo = a * std::sqrt(rw[0] / sw[0]);
        const double hi = std::sqrt(rw[0] / sw[0]) / a;
        inst.eta1 = eta1_from_ratio(rng.uniform(lo, hi));
        break;
      }
      default: {
        const int n = rng.integer(2, 5);
        const Vector psi = random_unit_vector(rng, n);
        inst = {ket_bra(psi), random_density(rng, n, rng.integer(1, n - 1)), 0.5};
        const double p = ref_trace(ref_range_projector(inst.rho2), inst.rho1);
        const double F = ref_fidelity(inst.rho1, inst.rho2);
        inst.eta1 = eta1_from_ratio(rng.uniform(p / F, 1.0 / F));
        break;
      }
    }
    const auto s = prepare(inst);
    const auto report = analyze(s.problem, AnalyzeOptions{false, {}});
    REQUIRE(report.special_case != SpecialCase::None);
    REQUIRE(report.optimal.has_value());
    check_optimal(s, *report.optimal);
    const auto& vn = report.von_neumann;
    CHECK(report.optimal->q <= std::min(vn.n1_par.q, vn.n2_par.q) + 1e-9);
    ++solved;
  }
  CHECK(solved == 60);
}
