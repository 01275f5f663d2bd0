#include "uqsd/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace uqsd {

namespace {

Complex complex_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw FormatError(field + ": expected a number or a [re, im] pair");
}

Json complex_to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw FormatError(field + ": expected a non-empty array of rows");
  const auto rows = j.size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_field = field + "[" + std::to_string(i) + "]";
    const Json& row = j[i];
    if (!row.is_array() || row.size() != rows) {
      std::ostringstream os;
      os << row_field << ": expected " << rows << " entries (matrix must be square)";
      throw FormatError(os.str());
    }
    for (std::size_t k = 0; k < rows; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          complex_from_json(row[k], row_field + "[" + std::to_string(k) + "]");
  }
  return m;
}

Vector vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw FormatError(field + ": expected a non-empty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

ProblemFile parse_problem(const Json& j, const Tolerances& tol) {
  if (!j.is_object()) throw FormatError("problem: top level must be an object");
  for (const char* key : {"rho1", "rho2", "eta1"})
    if (!j.contains(key)) throw FormatError(std::string("problem: missing field '") + key + "'");
  if (!j["eta1"].is_number()) throw FormatError("eta1: expected a number");

  const Matrix rho1 = matrix_from_json(j["rho1"], "rho1");
  const Matrix rho2 = matrix_from_json(j["rho2"], "rho2");
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer()) throw FormatError("dim: expected an integer");
    const auto dim = j["dim"].get<long long>();
    if (dim != rho1.rows() || dim != rho2.rows()) {
      std::ostringstream os;
      os << "dim: declared " << dim << " but rho1 is " << rho1.rows() << "x" << rho1.rows()
         << " and rho2 is " << rho2.rows() << "x" << rho2.rows();
      throw FormatError(os.str());
    }
  }

  auto checked = [&](const Matrix& m, const char* field) {
    try {
      return assert_density(m, tol);
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw InvalidProblem(std::string(field) + ": " + e.what());
    }
  };
  ProblemFile out{DiscriminationProblem(checked(rho1, "rho1"), checked(rho2, "rho2"),
                                        j["eta1"].get<double>()),
                  {}};
  if (j.contains("labels")) {
    if (!j["labels"].is_object()) throw FormatError("labels: expected an object");
    for (const auto& [key, value] : j["labels"].items()) {
      if (!value.is_string()) throw FormatError("labels." + key + ": expected a string");
      out.labels[key] = value.get<std::string>();
    }
  }
  return out;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ProblemFile load_problem(const std::filesystem::path& path, const Tolerances& tol) {
  return parse_problem(read_json(path), tol);
}

Json problem_to_json(const DiscriminationProblem& problem,
                     const std::map<std::string, std::string>& labels) {
  Json j;
  j["dim"] = problem.dim();
  j["eta1"] = problem.eta1();
  j["rho1"] = matrix_to_json(problem.rho1().matrix());
  j["rho2"] = matrix_to_json(problem.rho2().matrix());
  if (!labels.empty()) j["labels"] = labels;
  return j;
}

Vector load_vector(const std::filesystem::path& path) {
  const Json j = read_json(path);
  if (j.is_array()) return vector_from_json(j, "psi");
  if (j.is_object() && j.contains("psi")) return vector_from_json(j["psi"], "psi");
  throw FormatError(path.string() + ": expected {\"psi\": [...]} or an array");
}

Json povm_to_json(const Povm& povm) {
  Json j;
  j["provenance"] = std::string(to_string(povm.provenance));
  j["Pi0"] = matrix_to_json(povm.Pi0.matrix());
  j["Pi1"] = matrix_to_json(povm.Pi1.matrix());
  j["Pi2"] = matrix_to_json(povm.Pi2.matrix());
  if (!povm.parameters.empty()) j["parameters"] = povm.parameters;
  return j;
}

Json stats_to_json(const OverlapStats& s) {
  return {{"F", s.F},
          {"tr_P1_rho2", s.t_p1_r2},
          {"tr_P2_rho1", s.t_p2_r1},
          {"tr_P1par_rho2", s.t_p1par_r2},
          {"tr_P2par_rho1", s.t_p2par_r1}};
}

Json window_to_json(const ReachabilityWindow& w) {
  return {{"lower", finite_or_null(w.lower)},
          {"upper", finite_or_null(w.upper)},
          {"ratio", w.ratio},
          {"contains_ratio", w.contains_ratio},
          {"nonempty", w.nonempty},
          {"rudolph_lower_bound", w.rudolph_lower_bound},
          {"rudolph_window", Json::array({finite_or_null(w.rudolph_lower),
                                          finite_or_null(w.rudolph_upper)})}};
}

Json oracle_to_json(const OracleResult& r) {
  return {{"q", r.q},
          {"certified_feasible", r.certified_feasible},
          {"iterations_used", r.iterations_used},
          {"best_restart", r.best_restart},
          {"restart_spread", r.restart_spread}};
}

Json report_to_json(const AnalysisReport& report) {
  Json j;
  j["problem"] = problem_to_json(report.problem);
  const auto& d = report.dims;
  j["dims"] = {{"d1", d.d1},         {"d2", d.d2},         {"d1_par", d.d1_par},
               {"d1_perp", d.d1_perp}, {"d1_bar", d.d1_bar}, {"d2_prime", d.d2_prime},
               {"d2_par", d.d2_par}, {"d2_perp", d.d2_perp}, {"d2_bar", d.d2_bar},
               {"d1_prime", d.d1_prime}};
  j["stats"] = stats_to_json(report.stats);
  j["window"] = window_to_json(report.window);
  j["q_n1"] = report.von_neumann.n1.q;
  j["q_n1_par"] = report.von_neumann.n1_par.q;
  j["q_n2"] = report.von_neumann.n2.q;
  j["q_n2_par"] = report.von_neumann.n2_par.q;
  j["q0"] = report.q0;
  j["q_upper"] = report.q_upper;
  j["indiscriminable"] = report.indiscriminable;
  j["special_case"] = std::string(to_string(report.special_case));
  if (report.optimal) {
    j["optimal"] = {{"q", report.optimal->q}, {"povm", povm_to_json(report.optimal->povm)}};
  } else {
    j["optimal"] = nullptr;
  }
  j["oracle"] = report.oracle ? oracle_to_json(*report.oracle) : Json(nullptr);
  return j;
}

Json simulation_to_json(const SimulationResult& r) {
  auto state = [&](int s) {
    const auto& c = r.counts[static_cast<std::size_t>(s)];
    return Json{{"infer1", c[0]}, {"infer2", c[1]}, {"inconclusive", c[2]}};
  };
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"counts", {{"rho1", state(0)}, {"rho2", state(1)}}},
          {"empirical_failure", r.empirical_failure},
          {"empirical_error", r.empirical_error}};
}

Json comparison_to_json(const ComparisonReport& c) {
  Json j = report_to_json(c.analysis);
  j["comparison"] = {{"overlap", c.overlap},
                     {"q_opt", c.q_opt},
                     {"branch", c.branch},
                     {"measurement_q", c.measurement.q}};
  return j;
}

}  // namespace uqsd
