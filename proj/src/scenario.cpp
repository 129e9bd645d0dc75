#include "ignorance/scenario.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "embedded.hpp"
#include "ignorance/error.hpp"

namespace ignorance {

const char* to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::Evaluate: return "evaluate";
    case QueryKind::Stationary: return "stationary";
    case QueryKind::JointPaths: return "joint_paths";
    case QueryKind::BayesCheck: return "bayes_check";
    case QueryKind::Expectation: return "expectation";
    case QueryKind::NoKnowledge: return "no_knowledge";
  }
  return "stationary";
}

QueryKind query_kind_from_string(const std::string& s) {
  for (auto k : {QueryKind::Evaluate, QueryKind::Stationary, QueryKind::JointPaths, QueryKind::BayesCheck,
                 QueryKind::Expectation, QueryKind::NoKnowledge})
    if (s == to_string(k)) return k;
  reject(ErrorCode::Schema, fmt::format("unknown query kind '{}'", s));
}

namespace {

enum class Type { Number, Integer, Bool, String, StringPair, NumberList, NumberMap, Overrides, NullableNumber };

struct Rule {
  const char* name;
  Type type;
  bool required = false;
};

const std::vector<Rule>& rules_for(QueryKind kind) {
  static const std::vector<Rule> evaluate{{"assignment", Type::NumberMap}, {"collapse", Type::Bool}};
  static const std::vector<Rule> stationary{};
  static const std::vector<Rule> joint{
      {"depth", Type::Integer, true}, {"targets", Type::StringPair, true}, {"permutations", Type::Bool}};
  static const std::vector<Rule> bayes{{"pair", Type::StringPair, true},
                                       {"depth", Type::Integer},
                                       {"equalize", Type::Bool},
                                       {"overrides", Type::Overrides},
                                       {"k1", Type::Number},
                                       {"k2", Type::Number},
                                       {"mu_ab", Type::NullableNumber},
                                       {"mu_ba", Type::NullableNumber},
                                       {"target", Type::Number}};
  static const std::vector<Rule> expectation{{"k", Type::Number},
                                             {"beta", Type::Number},
                                             {"x", Type::Integer},
                                             {"mu", Type::Number},
                                             {"enforce_normalization", Type::Bool},
                                             {"expect_infeasible", Type::Bool}};
  static const std::vector<Rule> no_knowledge{{"lambdas", Type::NumberList}};
  switch (kind) {
    case QueryKind::Evaluate: return evaluate;
    case QueryKind::Stationary: return stationary;
    case QueryKind::JointPaths: return joint;
    case QueryKind::BayesCheck: return bayes;
    case QueryKind::Expectation: return expectation;
    case QueryKind::NoKnowledge: return no_knowledge;
  }
  return stationary;
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  reject(ErrorCode::Schema, fmt::format("{}: {}", path, what));
}

class Checker {
 public:
  Checker(bool lenient, std::vector<std::string>* warnings) : lenient_(lenient), warnings_(warnings) {}

  // Drops (lenient) or rejects (strict) keys outside `allowed`.
  json only(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    json out = json::object();
    for (const auto& [key, value] : obj.items()) {
      if (allowed.count(key)) {
        out[key] = value;
        continue;
      }
      if (!lenient_) schema_error(path + "." + key, "unknown field");
      if (warnings_) warnings_->push_back(fmt::format("{}.{}: unknown field ignored", path, key));
    }
    return out;
  }

 private:
  bool lenient_;
  std::vector<std::string>* warnings_;
};

void check_type(const json& v, Type type, const std::string& path) {
  auto number = [&](const json& x, const std::string& p) {
    if (!x.is_number()) schema_error(p, "expected a number");
  };
  switch (type) {
    case Type::Number: number(v, path); break;
    case Type::NullableNumber:
      if (!v.is_null()) number(v, path);
      break;
    case Type::Integer:
      if (!v.is_number_integer()) schema_error(path, "expected an integer");
      break;
    case Type::Bool:
      if (!v.is_boolean()) schema_error(path, "expected true or false");
      break;
    case Type::String:
      if (!v.is_string()) schema_error(path, "expected a string");
      break;
    case Type::StringPair:
      if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string())
        schema_error(path, "expected two proposition ids");
      break;
    case Type::NumberList:
      if (!v.is_array()) schema_error(path, "expected an array of numbers");
      for (std::size_t i = 0; i < v.size(); ++i) number(v[i], fmt::format("{}[{}]", path, i));
      break;
    case Type::NumberMap:
      if (!v.is_object()) schema_error(path, "expected an object of numbers");
      for (const auto& [k, x] : v.items()) number(x, path + "." + k);
      break;
    case Type::Overrides:
      if (!v.is_array()) schema_error(path, "expected an array of overrides");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto p = fmt::format("{}[{}]", path, i);
        const auto& o = v[i];
        if (!o.is_object()) schema_error(p, "expected an object");
        for (const auto& [k, _] : o.items())
          if (k != "after" && k != "probabilities" && k != "rest") schema_error(p + "." + k, "unknown field");
        if (!o.contains("after") || !o.at("after").is_array()) schema_error(p + ".after", "expected an array of ids");
        for (const auto& id : o.at("after"))
          if (!id.is_string()) schema_error(p + ".after", "expected an array of ids");
        if (o.contains("probabilities")) check_type(o.at("probabilities"), Type::NumberMap, p + ".probabilities");
        if (o.contains("rest")) number(o.at("rest"), p + ".rest");
      }
      break;
  }
}

}  // namespace

ScenarioScript parse_scenario(const std::string& text, bool lenient, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    reject(ErrorCode::Schema, fmt::format("$: not valid JSON ({})", e.what()));
  }
  Checker check(lenient, warnings);
  doc = check.only(doc, "$", {"version", "name", "description", "events", "queries"});

  if (!doc.contains("version")) schema_error("$.version", "missing (expected \"v1\")");
  if (doc.at("version") != "v1") schema_error("$.version", "only \"v1\" is supported");
  if (!doc.contains("name") || !doc.at("name").is_string()) schema_error("$.name", "expected a string");

  ScenarioScript script;
  script.name = doc.at("name").get<std::string>();
  if (doc.contains("description")) {
    check_type(doc.at("description"), Type::String, "$.description");
    script.description = doc.at("description").get<std::string>();
  }

  if (!doc.contains("events") || !doc.at("events").is_array()) schema_error("$.events", "expected an array");
  if (doc.at("events").empty()) schema_error("$.events", "a scenario needs at least one event");
  const auto& events = doc.at("events");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto path = fmt::format("$.events[{}]", i);
    try {
      script.events.push_back(event_from_json(events[i]));
    } catch (const Error& e) {
      schema_error(path, e.what());
    }
  }
  const auto first = script.events.front().kind;
  if (first != EventKind::Assert && first != EventKind::Learn)
    schema_error("$.events[0]", "the first event must be an assert or a learn");

  if (doc.contains("queries")) {
    const auto& queries = doc.at("queries");
    if (!queries.is_array()) schema_error("$.queries", "expected an array");
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto path = fmt::format("$.queries[{}]", i);
      json q = check.only(queries[i], path, {"kind", "params"});
      if (!q.contains("kind") || !q.at("kind").is_string()) schema_error(path + ".kind", "expected a string");
      Query query;
      try {
        query.kind = query_kind_from_string(q.at("kind").get<std::string>());
      } catch (const Error& e) {
        schema_error(path + ".kind", e.what());
      }
      std::set<std::string> allowed;
      for (const auto& r : rules_for(query.kind)) allowed.insert(r.name);
      json params = q.contains("params") ? check.only(q.at("params"), path + ".params", allowed) : json::object();
      for (const auto& r : rules_for(query.kind)) {
        if (!params.contains(r.name)) {
          if (r.required) schema_error(path + ".params." + r.name, "required");
          continue;
        }
        check_type(params.at(r.name), r.type, path + ".params." + r.name);
      }
      query.params = std::move(params);
      script.queries.push_back(std::move(query));
    }
  }
  return script;
}

json to_json(const ScenarioScript& script) {
  json events = json::array(), queries = json::array();
  for (const auto& ev : script.events) events.push_back(to_json(ev));
  for (const auto& q : script.queries) queries.push_back({{"kind", to_string(q.kind)}, {"params", q.params}});
  json out{{"version", "v1"}, {"name", script.name}, {"events", std::move(events)}, {"queries", std::move(queries)}};
  if (!script.description.empty()) out["description"] = script.description;
  return out;
}

std::vector<std::string> list_fixtures() {
  std::vector<std::string> names;
  for (const auto& [name, _] : embedded::fixtures()) names.push_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

const std::string& fixture_source(const std::string& name) {
  const auto& table = embedded::fixtures();
  auto it = table.find(name);
  if (it == table.end()) reject(ErrorCode::Unregistered, fmt::format("no fixture named '{}'", name));
  return it->second;
}

const std::string& scenario_schema() { return embedded::schema(); }

int exit_code(const Error& error) { return error.code() == ErrorCode::Schema ? 2 : 3; }

}  // namespace ignorance
