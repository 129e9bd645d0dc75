#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ignorance/error.hpp"
#include "ignorance/update.hpp"

namespace ignorance {

enum class QueryKind { Evaluate, Stationary, JointPaths, BayesCheck, Expectation, NoKnowledge };

const char* to_string(QueryKind kind);
QueryKind query_kind_from_string(const std::string& s);

struct Query {
  QueryKind kind = QueryKind::Stationary;
  json params = json::object();

  friend bool operator==(const Query&, const Query&) = default;
};

struct ScenarioScript {
  std::string name;
  std::string description;
  std::vector<UpdateEvent> events;
  std::vector<Query> queries;

  friend bool operator==(const ScenarioScript&, const ScenarioScript&) = default;
};

/// Parses a v1 scenario document. Unknown fields are rejected, or reported in
/// `warnings` and skipped when `lenient` is set. Error messages carry the JSON
/// path of the offending value.
ScenarioScript parse_scenario(const std::string& text, bool lenient = false,
                              std::vector<std::string>* warnings = nullptr);
json to_json(const ScenarioScript& script);

struct RunConfig {
  AssignmentMode mode = AssignmentMode::Anticipation;
  double tolerance = 1e-6;
  bool oracle = false;
};

struct OracleOutcome {
  bool checked = false;
  bool ok = true;
  std::string detail;
};

struct QueryResult {
  std::size_t index = 0;
  QueryKind kind = QueryKind::Stationary;
  json params;
  json result;
  OracleOutcome oracle;
  std::vector<std::string> warnings;
  bool infeasible = false;
  bool infeasibility_expected = false;
};

enum class RunStatus { Ok, OracleMismatch, Infeasible };

struct RunReport {
  std::string name;
  RunConfig config;
  std::size_t events = 0;
  std::string state;
  std::string digest;
  std::vector<QueryResult> queries;
  std::vector<std::string> warnings;
  RunStatus status = RunStatus::Ok;
};

/// Replays the events, then answers the queries against the final session.
/// Engine failures are rethrown as ignorance::Error naming the event or query.
RunReport run(const ScenarioScript& script, const RunConfig& config);
/// The session reached after the script's events.
Session replay(const ScenarioScript& script);

/// 0 success, 4 oracle mismatch, 5 unexpected infeasibility.
int exit_code(const RunReport& report);
/// Exit status for a rejection: 2 for schema errors, 3 for engine errors.
int exit_code(const Error& error);

json to_json(const RunReport& report);
std::string render_json(const RunReport& report);
std::string render_text(const RunReport& report);

/// Names of the embedded scripts, sorted.
std::vector<std::string> list_fixtures();
/// Source text of an embedded script; rejects unknown names.
const std::string& fixture_source(const std::string& name);
/// JSON Schema of the v1 scenario format.
const std::string& scenario_schema();

}  // namespace ignorance
