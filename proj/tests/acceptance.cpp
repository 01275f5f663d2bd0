// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "support/test_support.hpp"
#include "uqsd/simulation.hpp"
#include "uqsd/strategies.hpp"

using namespace uqsd;
using namespace uqsd::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int digits = 10) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

struct Certified {
  Instance instance;
  StrategyResult result;
  std::string label;
};

/// Conditions that characterize an optimum reaching the fidelity bound.
double optimality_defect(const Instance& inst, const StrategyResult& r) {
  const double eta1 = inst.eta1;
  const double eta2 = 1.0 - eta1;
  const double target = std::sqrt(eta1 * eta2) * ref_fidelity(inst.rho1, inst.rho2);
  const Matrix& pi0 = r.povm.Pi0.matrix();
  const Matrix root = ref_sqrt(pi0);
  double defect = std::abs(eta1 * ref_trace(inst.rho1, pi0) - target);
  defect = std::max(defect, std::abs(eta2 * ref_trace(inst.rho2, pi0) - target));
  defect = std::max(defect, max_entry(root * (eta2 * inst.rho2 - eta1 * inst.rho1) * root));
  return defect;
}

/// Special-case instances with priors drawn inside the reachability window.
std::vector<Instance> special_instances(int per_family, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Instance> out;
  for (int k = 0; k < per_family; ++k) {
    const int d = rng.integer(2, 4);
    Instance rd = rank_d_2d(random_weights(rng, d), random_unitary(rng, 2 * d), &rng);
    rd.eta1 = eta1_from_ratio(rng.uniform(1.0 / std::sqrt(2.0), std::sqrt(2.0)));
    out.push_back(rd);

    const int d1 = rng.integer(2, 3);
    const int d2 = rng.integer(2, 3);
    const int extra = rng.integer(0, 8 - d1 - d2);
    const Matrix u = random_unitary(rng, d1 + d2 + extra);
    const auto rw = random_weights(rng, d1);
    const auto sw = random_weights(rng, d2);
    const double a = rng.uniform(0.1, 0.95);
    Instance so = single_overlap(rw, sw, std::polar(a, rng.phase()), extra, &u);
    so.eta1 = eta1_from_ratio(
        rng.uniform(a * std::sqrt(rw[0] / sw[0]), std::sqrt(rw[0] / sw[0]) / a));
    out.push_back(so);

    const int n = rng.integer(2, 8);
    Instance fi{ket_bra(random_unit_vector(rng, n)),
                random_density(rng, n, rng.integer(1, n - 1)), 0.5};
    const double p = ref_trace(ref_range_projector(fi.rho2), fi.rho1);
    const double F = ref_fidelity(fi.rho1, fi.rho2);
    fi.eta1 = eta1_from_ratio(rng.uniform(p / F, 1.0 / F));
    if (k % 2) std::swap(fi.rho1, fi.rho2), fi.eta1 = 1.0 - fi.eta1;
    out.push_back(fi);
  }
  return out;
}

std::vector<Certified> g_certified;

Verdict criterion1() {
  Verdict o;
  const Instance inst = rank_d_2d({0.5, 0.5}, Matrix::Identity(4, 4));
  const auto t0 = Clock::now();
  const auto report = analyze(to_problem(inst));
  const double elapsed = seconds_since(t0);
  const double F = report.stats.F;
  o.require(std::abs(F - 1.0 / std::sqrt(2.0)) <= 1e-6, "F = 1/sqrt(2)");
  o.require(report.optimal.has_value(), "certified optimum present");
  if (report.optimal) {
    o.require(std::abs(report.optimal->q - 0.7071067811865476) <= 1e-6, "Q_opt = 0.707107");
    o.require(std::abs(report.optimal->q - 2.0 * 0.5 * F) <= 1e-6, "Q_opt = 2 sqrt(eta1 eta2) F");
    const auto ev = spectral_decompose(report.optimal->povm.Pi0).eigenvalues;
    const double lam = 2.0 * std::sqrt(2.0) - 2.0;
    o.require(std::abs(ev(0) - lam) <= 1e-8 && std::abs(ev(1) - lam) <= 1e-8 &&
                  std::abs(ev(2)) <= 1e-8 && std::abs(ev(3)) <= 1e-8,
              "Pi0 spectrum {0, 0, 2sqrt2-2, 2sqrt2-2}");
    o.detail << "F=" << fmt(F) << " Q_opt=" << fmt(report.optimal->q) << " Pi0 eig=("
             << fmt(ev(0)) << ", " << fmt(ev(1)) << ", " << fmt(ev(2), 3) << ", " << fmt(ev(3), 3)
             << ") ";
  }
  o.require(elapsed < 1.0, "runtime < 1 s");
  o.detail << "analyze " << fmt(elapsed, 3) << " s";
  return o;
}

Verdict criterion2() {
  Verdict o;
  Instance inst = rank_d_2d({0.5, 0.5}, Matrix::Identity(4, 4));
  inst.eta1 = 1.0 / 3.0;
  auto p = to_problem(inst);
  auto d = decompose(p.rho1(), p.rho2());
  auto r = solve_rank_d_2d(p, d);
  auto vn = von_neumann_strategies(p, d);
  const double alpha = r.povm.parameters.at("alpha");
  o.require(std::abs(alpha) <= 1e-9, "alpha = 0 at eta2/eta1 = 2");
  o.require(std::abs(r.q - vn.n2_par.q) <= 1e-9, "Q_opt = Q_N2par");
  o.detail << "eta2/eta1=2: alpha=" << fmt(alpha, 3) << " Q=" << fmt(r.q) << " Q_N2par="
           << fmt(vn.n2_par.q) << "; ";

  inst.eta1 = 2.0 / 3.0;
  p = to_problem(inst);
  d = decompose(p.rho1(), p.rho2());
  r = solve_rank_d_2d(p, d);
  vn = von_neumann_strategies(p, d);
  const double beta = r.povm.parameters.at("beta");
  o.require(std::abs(beta) <= 1e-9, "beta = 0 at eta2/eta1 = 1/2");
  o.require(std::abs(r.q - vn.n1_par.q) <= 1e-9, "Q_opt = Q_N1par");
  o.detail << "eta2/eta1=1/2: beta=" << fmt(beta, 3) << " Q=" << fmt(r.q)
           << " Q_N1par=" << fmt(vn.n1_par.q);
  return o;
}

Verdict criterion3() {
  Verdict o;
  const auto t0 = Clock::now();
  const auto instances = special_instances(20, 0xacce97);
  int count[4] = {0, 0, 0, 0};
  double worst = 0.0;
  for (const auto& inst : instances) {
    const auto report = analyze(to_problem(inst));
    if (!report.optimal || !report.oracle) {
      o.require(false, std::string("no certified optimum for ") +
                           std::string(to_string(report.special_case)));
      continue;
    }
    ++count[static_cast<int>(report.special_case)];
    const double diff = std::abs(report.oracle->q - report.optimal->q);
    worst = std::max(worst, diff);
    o.require(diff <= 1e-5, "oracle vs closed form within 1e-5");
    g_certified.push_back({inst, *report.optimal, std::string(to_string(report.special_case))});
  }
  const double elapsed = seconds_since(t0);
  const int total = count[1] + count[2] + count[3];
  o.require(total >= 50, ">= 50 instances");
  o.require(count[1] > 0 && count[2] > 0 && count[3] > 0, "all three solvers exercised");
  o.require(elapsed < 60.0, "runtime < 60 s");
  o.detail << total << " instances (filtering " << count[1] << ", single-overlap " << count[2]
           << ", rank-d/2d " << count[3] << "), max |dQ|=" << fmt(worst, 3) << ", "
           << fmt(elapsed, 3) << " s";
  return o;
}

Verdict criterion4() {
  Verdict o;
  Rng rng(0x1e9);
  int povms = 0;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = rng.integer(2, 6);
    const Instance inst{random_density(rng, n, rng.integer(1, std::min(3, n))),
                        random_density(rng, n, rng.integer(1, std::min(3, n))),
                        rng.uniform(0.02, 0.98)};
    const auto p = to_problem(inst);
    const auto report = analyze(p, AnalyzeOptions{false, {}});
    const auto& vn = report.von_neumann;
    const auto& st = report.stats;
    const double F2 = st.F * st.F;
    o.require(vn.n2_par.q <= vn.n1.q + 1e-9, "Q_N2par <= Q_N1");
    o.require(vn.n1_par.q <= vn.n2.q + 1e-9, "Q_N1par <= Q_N2");
    o.require(st.t_p2_r1 * st.t_p1par_r2 >= F2 - 1e-8, "Tr(P2 rho1) Tr(P1par rho2) >= F^2");
    o.require(st.t_p1_r2 * st.t_p2par_r1 >= F2 - 1e-8, "Tr(P1 rho2) Tr(P2par rho1) >= F^2");
    worst_gap = std::min({worst_gap, st.t_p2_r1 * st.t_p1par_r2 - F2,
                          st.t_p1_r2 * st.t_p2par_r1 - F2});
    if (st.F > 0.0) {
      o.require(report.window.lower >= st.F - 1e-9, "window lower >= F");
      o.require(report.window.upper <= 1.0 / st.F + 1e-9, "window upper <= 1/F");
    }
    for (const StrategyResult* s : {&vn.n1, &vn.n1_par, &vn.n2, &vn.n2_par}) {
      o.require(verify_povm(s->povm, p, 1e-8).ok(), "von Neumann POVM verifies");
      ++povms;
    }
    if (report.optimal) {
      o.require(verify_povm(report.optimal->povm, p, 1e-8).ok(), "closed-form POVM verifies");
      ++povms;
      g_certified.push_back({inst, *report.optimal, "random"});
    }
  }
  o.detail << "500 problems, " << povms << " POVMs verified, min inequality slack "
           << fmt(worst_gap, 3);
  return o;
}

Verdict criterion5() {
  Verdict o;
  double worst = 0.0;
  for (const auto& c : g_certified) {
    const double defect = optimality_defect(c.instance, c.result);
    worst = std::max(worst, defect);
    o.require(defect <= 1e-8, "optimality conditions for " + c.label);
  }
  o.require(!g_certified.empty(), "certified optima available");
  o.detail << g_certified.size() << " certified optima, max defect " << fmt(worst, 3);
  return o;
}

Verdict criterion6() {
  Verdict o;
  const Vector e0 = Matrix::Identity(2, 2).col(0);
  const Vector psi = 0.6 * e0 + 0.8 * Vector(Matrix::Identity(2, 2).col(1));
  const auto half = solve_state_comparison(e0, psi, 0.5);
  const auto skew = solve_state_comparison(e0, psi, 0.9);
  o.require(std::abs(half.q_opt - 0.6) <= 1e-6, "Q_opt(0.6, 1/2) = 0.6");
  o.require(std::abs(skew.q_opt - 0.556588) <= 1e-4, "Q_opt(0.6, 0.9) = 0.556588 +- 1e-4");
  o.require(std::abs(skew.q_opt - 0.556517647) <= 1e-9, "frozen regression constant");
  o.require(skew.branch == 2, "second branch");
  const bool oracles = half.analysis.oracle && skew.analysis.oracle;
  o.require(oracles, "oracle ran");
  if (oracles) {
    o.require(std::abs(half.analysis.oracle->q - half.q_opt) <= 1e-6, "oracle agrees at p1 = 1/2");
    o.require(std::abs(skew.analysis.oracle->q - skew.q_opt) <= 1e-6, "oracle agrees at p1 = 0.9");
    o.detail << "p1=0.5: " << fmt(half.q_opt) << " (oracle " << fmt(half.analysis.oracle->q)
             << "); p1=0.9: " << fmt(skew.q_opt) << " (oracle " << fmt(skew.analysis.oracle->q)
             << ")";
  }
  return o;
}

Verdict criterion7() {
  Verdict o;
  Rng rng(7);
  for (double c : {0.1, 0.5, 0.9}) {
    // |<psi|phi>| = c with a random complex phase, embedded in dimension 3.
    const Matrix u = random_unitary(rng, 3);
    const Vector psi = u.col(0);
    const Vector phi = std::polar(c, rng.phase()) * u.col(0) + std::sqrt(1.0 - c * c) * u.col(1);
    const auto p = to_problem({ket_bra(psi), ket_bra(phi), 0.5});
    const auto d = decompose(p.rho1(), p.rho2());
    const double q_filter = solve_state_filtering(p, d).q;
    const double q_oracle = optimize(p, d).q;
    o.require(std::abs(q_filter - c) <= 1e-6, "filtering gives |c|");
    o.require(std::abs(q_oracle - c) <= 1e-6, "oracle gives |c|");
    o.detail << "c=" << c << ": filtering " << fmt(q_filter) << ", oracle " << fmt(q_oracle)
             << "; ";
  }
  return o;
}

Verdict criterion8() {
  Verdict o;
  std::vector<Certified> cases;
  cases.push_back({rank_d_2d({0.5, 0.5}, Matrix::Identity(4, 4)), {}, "rank-d/2d"});
  cases.push_back({single_overlap({0.6, 0.4}, {0.7, 0.3}, 0.5), {}, "single-overlap"});
  const Matrix I3 = Matrix::Identity(3, 3);
  const Vector plus = (I3.col(0) + I3.col(1)) / std::sqrt(2.0);
  cases.push_back({{ket_bra(I3.col(0)), 0.5 * ket_bra(plus) + 0.5 * ket_bra(I3.col(2)), 0.5},
                   {},
                   "filtering"});
  const std::int64_t trials = 100000;
  for (auto& c : cases) {
    const auto p = to_problem(c.instance);
    const auto report = analyze(p, AnalyzeOptions{false, {}});
    if (!report.optimal) {
      o.require(false, "certified optimum for " + c.label);
      continue;
    }
    const auto a = simulate(p, report.optimal->povm, trials, 0xfeed);
    const auto b = simulate(p, report.optimal->povm, trials, 0xfeed);
    const double q = report.optimal->q;
    const double sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
    const double z = (a.empirical_failure - q) / sigma;
    o.require(a.errors() == 0, "zero cross-inference errors (" + c.label + ")");
    o.require(std::abs(z) <= 3.0, "within 3 sigma (" + c.label + ")");
    o.require(a.counts == b.counts, "deterministic (" + c.label + ")");
    o.detail << c.label << ": rate " << fmt(a.empirical_failure, 6) << " vs " << fmt(q, 6)
             << " (z=" << fmt(z, 3) << ", errors " << a.errors() << "); ";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 fidelity-bound reproduction (rank-d/2d)", criterion1},
      {"2 window-edge collapse", criterion2},
      {"3 oracle vs closed-form agreement", criterion3},
      {"4 inequality suite", criterion4},
      {"5 necessary-and-sufficient conditions", criterion5},
      {"6 state comparison", criterion6},
      {"7 two-pure-state bound", criterion7},
      {"8 simulation consistency", criterion8},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = Clock::now();
    Verdict o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double elapsed = seconds_since(t0);
    std::printf("[%s] %s | %s | %.3f s\n", o.pass ? "PASS" : "FAIL", name.c_str(),
                o.detail.str().c_str(), elapsed);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
