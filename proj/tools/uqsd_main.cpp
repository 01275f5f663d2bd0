// uqsd: command-line front-end for unambiguous discrimination of two mixed states.
//
// Exit codes: 0 success, 1 I/O error, 2 validation or usage error, 3 internal error.
// Data goes to stdout (or --out FILE); diagnostics go to stderr.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "uqsd/problem_io.hpp"
#include "uqsd/simulation.hpp"
#include "uqsd/strategies.hpp"

namespace {

using namespace uqsd;

constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInternal = 3;

struct OutputOptions {
  std::string format = "text";
  std::string out;
};

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

void emit(const OutputOptions& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(opt.out);
  if (!f) throw IoError("cannot write '" + opt.out + "'");
  f << text;
}

void add_output_flags(CLI::App* cmd, OutputOptions& opt) {
  cmd->add_option("--format", opt.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  cmd->add_option("--out", opt.out, "Write output to FILE instead of stdout");
}

// Rows of (key, value) shared by the text and CSV renderings.
using Rows = std::vector<std::pair<std::string, std::string>>;

std::string render(const Rows& rows, const std::string& format) {
  std::ostringstream os;
  if (format == "csv") {
    os << "key,value\n";
    for (const auto& [k, v] : rows) os << k << ',' << v << '\n';
  } else {
    for (const auto& [k, v] : rows) os << std::left << std::setw(22) << k << v << '\n';
  }
  return os.str();
}

std::string interval(double lo, double hi) { return "[" + num(lo) + ", " + num(hi) + "]"; }

Rows report_rows(const AnalysisReport& r) {
  const auto& d = r.dims;
  Rows rows{
      {"dim", std::to_string(r.problem.dim())},
      {"eta1", num(r.problem.eta1())},
      {"eta2", num(r.problem.eta2())},
      {"ranks", std::to_string(d.d1) + " " + std::to_string(d.d2)},
      {"d1_par d1_perp d1_bar", std::to_string(d.d1_par) + " " + std::to_string(d.d1_perp) + " " +
                                    std::to_string(d.d1_bar)},
      {"d2_par d2_perp d2_bar", std::to_string(d.d2_par) + " " + std::to_string(d.d2_perp) + " " +
                                    std::to_string(d.d2_bar)},
      {"F", num(r.stats.F)},
      {"Tr(P1 rho2)", num(r.stats.t_p1_r2)},
      {"Tr(P2 rho1)", num(r.stats.t_p2_r1)},
      {"Tr(P1par rho2)", num(r.stats.t_p1par_r2)},
      {"Tr(P2par rho1)", num(r.stats.t_p2par_r1)},
      {"Q_N1", num(r.von_neumann.n1.q)},
      {"Q_N1par", num(r.von_neumann.n1_par.q)},
      {"Q_N2", num(r.von_neumann.n2.q)},
      {"Q_N2par", num(r.von_neumann.n2_par.q)},
      {"Q0", num(r.q0)},
      {"window", interval(r.window.lower, r.window.upper)},
      {"sqrt(eta2/eta1)", num(r.window.ratio) + (r.window.contains_ratio ? " (inside)" : " (outside)")},
      {"rudolph_window", interval(r.window.rudolph_lower, r.window.rudolph_upper)},
      {"rudolph_bound", num(r.window.rudolph_lower_bound)},
      {"special_case", std::string(to_string(r.special_case))},
  };
  if (r.indiscriminable) rows.emplace_back("status", "indiscriminable (Q = 1)");
  if (r.optimal) {
    rows.emplace_back("Q_opt", num(r.optimal->q) + " (certified, " +
                                   std::string(to_string(r.optimal->povm.provenance)) + ")");
  } else {
    rows.emplace_back("Q_opt", "not certified");
    rows.emplace_back("Q_upper", num(r.q_upper) + " (min of Q_N1par, Q_N2par)");
  }
  if (r.oracle) rows.emplace_back("Q_oracle", num(r.oracle->q) + " (non-certified numerical)");
  return rows;
}

std::string format_report(const AnalysisReport& r, const std::string& format) {
  if (format == "json") return report_to_json(r).dump(2) + "\n";
  return render(report_rows(r), format);
}

int run_analyze(const std::string& path, const OutputOptions& out, const AnalyzeOptions& options,
                const std::string& dump) {
  const ProblemFile file = load_problem(path);
  if (!dump.empty()) write_json(dump, problem_to_json(file.problem, file.labels));
  emit(out, format_report(analyze(file.problem, options), out.format));
  return 0;
}

int run_optimize(const std::string& path, const OutputOptions& out, const OracleSettings& settings,
                 const std::string& dump_povm, bool unrestricted) {
  const ProblemFile file = load_problem(path);
  const auto& problem = file.problem;
  const OracleResult r =
      unrestricted ? optimize_unrestricted(problem, settings)
                   : optimize(problem, decompose(problem.rho1(), problem.rho2()), settings);
  if (!dump_povm.empty()) write_json(dump_povm, povm_to_json(r.povm));
  if (out.format == "json") {
    emit(out, oracle_to_json(r).dump(2) + "\n");
  } else {
    emit(out, render({{"Q", num(r.q)},
                      {"certified_feasible", r.certified_feasible ? "true" : "false"},
                      {"iterations", std::to_string(r.iterations_used)},
                      {"best_restart", std::to_string(r.best_restart)},
                      {"restart_spread", num(r.restart_spread)},
                      {"seed", std::to_string(settings.seed)}},
                     out.format));
  }
  return 0;
}

int run_simulate(const std::string& path, const OutputOptions& out, const std::string& strategy,
                 std::int64_t trials, const OracleSettings& settings) {
  const ProblemFile file = load_problem(path);
  const auto& problem = file.problem;
  const auto decomp = decompose(problem.rho1(), problem.rho2());
  const auto vn = von_neumann_strategies(problem, decomp);

  Povm povm;
  double analytic_q = 0.0;
  if (strategy == "n1") {
    povm = vn.n1.povm, analytic_q = vn.n1.q;
  } else if (strategy == "n1par") {
    povm = vn.n1_par.povm, analytic_q = vn.n1_par.q;
  } else if (strategy == "n2") {
    povm = vn.n2.povm, analytic_q = vn.n2.q;
  } else if (strategy == "n2par") {
    povm = vn.n2_par.povm, analytic_q = vn.n2_par.q;
  } else if (strategy == "optimal") {
    const auto report = analyze(problem, AnalyzeOptions{false, settings});
    if (!report.optimal)
      throw InvalidProblem("no certified closed-form optimum for this problem; use --strategy oracle");
    povm = report.optimal->povm, analytic_q = report.optimal->q;
  } else {
    const auto r = optimize(problem, decomp, settings);
    povm = r.povm, analytic_q = r.q;
  }

  const SimulationResult sim = simulate(problem, povm, trials, settings.seed);
  if (out.format == "json") {
    Json j = simulation_to_json(sim);
    j["strategy"] = strategy;
    j["analytic_q"] = analytic_q;
    emit(out, j.dump(2) + "\n");
    return 0;
  }
  std::ostringstream os;
  if (out.format == "csv") {
    os << "state,infer1,infer2,inconclusive\n";
    for (int s = 0; s < 2; ++s) {
      const auto& c = sim.counts[static_cast<std::size_t>(s)];
      os << "rho" << s + 1 << ',' << c[0] << ',' << c[1] << ',' << c[2] << '\n';
    }
  } else {
    os << "strategy " << strategy << ", trials " << sim.trials << ", seed " << sim.seed << '\n';
    os << std::left << std::setw(8) << "state" << std::setw(12) << "infer1" << std::setw(12)
       << "infer2" << "inconclusive\n";
    for (int s = 0; s < 2; ++s) {
      const auto& c = sim.counts[static_cast<std::size_t>(s)];
      if (sim.state_trials(s) == 0) continue;
      os << std::setw(8) << ("rho" + std::to_string(s + 1)) << std::setw(12) << c[0]
         << std::setw(12) << c[1] << c[2] << '\n';
    }
    os << "empirical_failure " << num(sim.empirical_failure) << '\n';
    os << "empirical_error   " << num(sim.empirical_error) << '\n';
    os << "analytic_q        " << num(analytic_q) << '\n';
  }
  emit(out, os.str());
  return 0;
}

int run_compare(const std::string& psi1_path, const std::string& psi2_path, double p1,
                const OutputOptions& out, const AnalyzeOptions& options) {
  const Vector psi1 = load_vector(psi1_path);
  const Vector psi2 = load_vector(psi2_path);
  const ComparisonReport c = solve_state_comparison(psi1, psi2, p1, options);
  if (out.format == "json") {
    emit(out, comparison_to_json(c).dump(2) + "\n");
    return 0;
  }
  Rows rows{{"overlap |<psi1|psi2>|", num(c.overlap)},
            {"p1", num(p1)},
            {"eta_same", num(c.analysis.problem.eta1())},
            {"eta_different", num(c.analysis.problem.eta2())},
            {"Q_opt", num(c.q_opt)},
            {"branch", c.branch == 1 ? "first branch (fidelity bound)"
                                     : "second branch (von Neumann)"},
            {"measurement_Q", num(c.measurement.q)}};
  if (c.analysis.oracle) rows.emplace_back("Q_oracle", num(c.analysis.oracle->q));
  emit(out, render(rows, out.format));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unambiguous discrimination of two mixed quantum states"};
  app.require_subcommand(1);

  OutputOptions out;
  AnalyzeOptions analyze_opts;
  OracleSettings& oracle = analyze_opts.oracle;
  std::string problem_path;
  bool no_oracle = false;
  std::string dump;

  auto* analyze_cmd = app.add_subcommand("analyze", "Full analysis of a problem file");
  analyze_cmd->add_option("problem", problem_path, "Problem JSON file")->required();
  analyze_cmd->add_option("--seed", oracle.seed, "Oracle seed");
  analyze_cmd->add_option("--restarts", oracle.restarts, "Oracle restarts")->check(CLI::PositiveNumber);
  analyze_cmd->add_flag("--no-oracle", no_oracle, "Skip the numerical oracle");
  analyze_cmd->add_option("--dump", dump, "Write the validated problem to FILE");
  add_output_flags(analyze_cmd, out);

  std::string dump_povm;
  bool unrestricted = false;
  auto* optimize_cmd = app.add_subcommand("optimize", "Numerical minimum failure probability");
  optimize_cmd->add_option("problem", problem_path, "Problem JSON file")->required();
  optimize_cmd->add_option("--restarts", oracle.restarts, "Restarts")->check(CLI::PositiveNumber);
  optimize_cmd->add_option("--seed", oracle.seed, "Seed");
  optimize_cmd->add_option("--iters", oracle.max_iterations, "Newton steps per restart")
      ->check(CLI::PositiveNumber);
  optimize_cmd->add_option("--dump-povm", dump_povm, "Write the POVM to FILE as JSON");
  optimize_cmd->add_flag("--unrestricted", unrestricted,
                         "Search Pi1, Pi2 over the full kernels (audit mode)");
  add_output_flags(optimize_cmd, out);

  std::string strategy = "optimal";
  std::int64_t trials = 100000;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo measurement statistics");
  simulate_cmd->add_option("problem", problem_path, "Problem JSON file")->required();
  simulate_cmd->add_option("--strategy", strategy, "Measurement to sample")
      ->check(CLI::IsMember({"n1", "n1par", "n2", "n2par", "optimal", "oracle"}));
  simulate_cmd->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", oracle.seed, "Seed");
  add_output_flags(simulate_cmd, out);

  std::string psi1_path, psi2_path;
  double p1 = 0.5;
  auto* compare_cmd = app.add_subcommand("compare", "Unambiguous comparison of two pure states");
  compare_cmd->add_option("--psi1", psi1_path, "Vector JSON file")->required();
  compare_cmd->add_option("--psi2", psi2_path, "Vector JSON file")->required();
  compare_cmd->add_option("--p1", p1, "Prior probability of psi1")->required();
  compare_cmd->add_option("--seed", oracle.seed, "Oracle seed");
  compare_cmd->add_flag("--no-oracle", no_oracle, "Skip the numerical oracle");
  add_output_flags(compare_cmd, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }
  analyze_opts.run_oracle = !no_oracle;

  try {
    if (analyze_cmd->parsed()) return run_analyze(problem_path, out, analyze_opts, dump);
    if (optimize_cmd->parsed())
      return run_optimize(problem_path, out, oracle, dump_povm, unrestricted);
    if (simulate_cmd->parsed()) return run_simulate(problem_path, out, strategy, trials, oracle);
    if (compare_cmd->parsed()) return run_compare(psi1_path, psi2_path, p1, out, analyze_opts);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConvergenceError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const InfeasibleProjection& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
