#pragma once

// JSON problem files and machine-readable reports.
//
// Problem file:
//   {
//     "dim": 4,
//     "eta1": 0.5,
//     "rho1": [[[re, im], ...], ...],   // row-major rows; plain numbers are
//     "rho2": [[[re, im], ...], ...],   // accepted for real entries
//     "labels": {"rho1": "...", "rho2": "..."}   // optional
//   }
// Vector file: {"psi": [[re, im], ...]} (a bare array is accepted too).

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "uqsd/simulation.hpp"
#include "uqsd/strategies.hpp"

namespace uqsd {

using Json = nlohmann::json;

struct ProblemFile {
  DiscriminationProblem problem;
  std::map<std::string, std::string> labels;
};

Matrix matrix_from_json(const Json& j, const std::string& field);
Vector vector_from_json(const Json& j, const std::string& field);
Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);

ProblemFile parse_problem(const Json& j, const Tolerances& tol = kDefaultTolerances);
ProblemFile load_problem(const std::filesystem::path& path,
                         const Tolerances& tol = kDefaultTolerances);
Json problem_to_json(const DiscriminationProblem& problem,
                     const std::map<std::string, std::string>& labels = {});

Vector load_vector(const std::filesystem::path& path);

/// Reads and parses a JSON document; IoError if unreadable, FormatError if malformed.
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

Json povm_to_json(const Povm& povm);
Json stats_to_json(const OverlapStats& s);
Json window_to_json(const ReachabilityWindow& w);
Json report_to_json(const AnalysisReport& report);
Json oracle_to_json(const OracleResult& r);
Json simulation_to_json(const SimulationResult& r);
Json comparison_to_json(const ComparisonReport& c);

}  // namespace uqsd
