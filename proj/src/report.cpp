#include <algorithm>

#include <fmt/format.h>

#include "ignorance/scenario.hpp"

namespace ignorance {

namespace {

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Ok: return "ok";
    case RunStatus::OracleMismatch: return "oracle_mismatch";
    case RunStatus::Infeasible: return "infeasible";
  }
  return "ok";
}

json oracle_json(const OracleOutcome& o) {
  if (!o.checked) return o.detail.empty() ? json(nullptr) : json{{"checked", false}, {"detail", o.detail}};
  return {{"checked", true}, {"ok", o.ok}, {"detail", o.detail}};
}

std::string scalar(const json& v) {
  if (v.is_number_float()) return fmt::format("{:.17g}", v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Leaves of `v` as (path, value) rows. Arrays of scalars stay on one row.
void flatten(const json& v, const std::string& path, std::vector<std::pair<std::string, std::string>>& rows) {
  if (v.is_object()) {
    if (v.empty()) rows.emplace_back(path, "{}");
    for (const auto& [k, x] : v.items()) flatten(x, path.empty() ? k : path + "." + k, rows);
    return;
  }
  if (v.is_array()) {
    const bool flat = std::all_of(v.begin(), v.end(), [](const json& x) { return !x.is_structured(); });
    if (flat) {
      std::string joined;
      for (const auto& x : v) joined += (joined.empty() ? "" : " ") + scalar(x);
      rows.emplace_back(path, "[" + joined + "]");
      return;
    }
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], fmt::format("{}[{}]", path, i), rows);
    return;
  }
  rows.emplace_back(path, scalar(v));
}

void table(std::string& out, const std::vector<std::pair<std::string, std::string>>& rows, const char* indent) {
  std::size_t width = 0;
  for (const auto& [k, _] : rows) width = std::max(width, k.size());
  for (const auto& [k, v] : rows) out += fmt::format("{}{:<{}}  {}\n", indent, k, width, v);
}

}  // namespace

json to_json(const RunReport& report) {
  json queries = json::array();
  for (const auto& q : report.queries) {
    json entry{{"index", q.index}, {"kind", to_string(q.kind)}, {"params", q.params}, {"result", q.result}};
    if (q.oracle.checked || !q.oracle.detail.empty()) entry["oracle"] = oracle_json(q.oracle);
    if (!q.warnings.empty()) entry["warnings"] = q.warnings;
    if (q.infeasible || q.infeasibility_expected)
      entry["infeasibility"] = {{"found", q.infeasible}, {"expected", q.infeasibility_expected}};
    queries.push_back(std::move(entry));
  }
  return {{"name", report.name},
          {"config",
           {{"mode", to_string(report.config.mode)},
            {"tolerance", report.config.tolerance},
            {"oracle", report.config.oracle}}},
          {"events", report.events},
          {"state", report.state},
          {"digest", report.digest},
          {"queries", std::move(queries)},
          {"warnings", report.warnings},
          {"status", to_string(report.status)}};
}

std::string render_json(const RunReport& report) { return to_json(report).dump(2) + "\n"; }

std::string render_text(const RunReport& report) {
  std::string out;
  table(out,
        {{"scenario", report.name},
         {"mode", to_string(report.config.mode)},
         {"tolerance", fmt::format("{:.17g}", report.config.tolerance)},
         {"oracle", report.config.oracle ? "on" : "off"},
         {"events", std::to_string(report.events)},
         {"state", report.state},
         {"digest", report.digest},
         {"status", to_string(report.status)}},
        "");
  for (const auto& q : report.queries) {
    std::string verdict = "-";
    if (q.oracle.checked) verdict = q.oracle.ok ? "oracle ok" : "ORACLE MISMATCH";
    out += fmt::format("\n[{}] {}  ({})\n", q.index, to_string(q.kind), verdict);
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(q.result, "", rows);
    table(out, rows, "  ");
    if (!q.oracle.detail.empty()) out += fmt::format("  oracle: {}\n", q.oracle.detail);
    if (q.infeasible || q.infeasibility_expected)
      out += fmt::format("  infeasible: {} (expected: {})\n", q.infeasible ? "yes" : "no",
                         q.infeasibility_expected ? "yes" : "no");
  }
  if (!report.warnings.empty()) {
    out += "\nwarnings\n";
    for (const auto& w : report.warnings) out += "  " + w + "\n";
  }
  return out;
}

}  // namespace ignorance
