#include <fmt/format.h>

#include "ignorance/error.hpp"
#include "ignorance/functional.hpp"

namespace ignorance {

const char* to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::Knowledge: return "knowledge";
    case ConstraintKind::Normalization: return "normalization";
    case ConstraintKind::Credence: return "credence";
    case ConstraintKind::Joint: return "joint";
    case ConstraintKind::Souvenir: return "souvenir";
    case ConstraintKind::Doubt: return "doubt";
  }
  return "knowledge";
}

ConstraintKind constraint_kind_from_string(const std::string& s) {
  for (auto k : {ConstraintKind::Knowledge, ConstraintKind::Normalization, ConstraintKind::Credence,
                 ConstraintKind::Joint, ConstraintKind::Souvenir, ConstraintKind::Doubt})
    if (s == to_string(k)) return k;
  reject(ErrorCode::Schema, fmt::format("unknown constraint kind '{}'", s));
}

json to_json(const Multiplier& m) {
  json out{{"id", m.id}, {"symbol", m.symbol}, {"value", m.value ? json(*m.value) : json(nullptr)}};
  if (m.tie) out["tie"] = {{"target", m.tie->target}, {"scale", m.tie->scale}};
  return out;
}

Multiplier multiplier_from_json(const json& j) {
  Multiplier m;
  m.id = j.at("id").get<std::string>();
  m.symbol = j.at("symbol").get<std::string>();
  if (!j.at("value").is_null()) m.value = j.at("value").get<double>();
  if (j.contains("tie"))
    m.tie = Multiplier::Tie{j.at("tie").at("target").get<std::string>(),
                            j.at("tie").at("scale").get<double>()};
  return m;
}

json to_json(const LinearConstraint& c) {
  json coefficients = json::array();
  for (const auto& t : c.coefficients)
    coefficients.push_back({{"slot", t.slot.name}, {"coefficient", t.coefficient}});
  return {{"symbol", c.multiplier.symbol},
          {"multiplier", to_json(c.multiplier)},
          {"coefficients", std::move(coefficients)},
          {"offset", c.offset},
          {"kind", to_string(c.kind)}};
}

LinearConstraint constraint_from_json(const json& j) {
  LinearConstraint c;
  c.multiplier = multiplier_from_json(j.at("multiplier"));
  for (const auto& t : j.at("coefficients"))
    c.coefficients.push_back({SlotId{t.at("slot").get<std::string>()}, t.at("coefficient").get<double>()});
  c.offset = j.at("offset").get<double>();
  c.kind = constraint_kind_from_string(j.at("kind").get<std::string>());
  return c;
}

json to_json(const IgnoranceFunctional& h) {
  json constraints = json::array(), entropies = json::array(), memory = json::array(),
       flagged = json::array();
  for (const auto& c : h.constraints) constraints.push_back(to_json(c));
  for (const auto& c : h.memory) memory.push_back(to_json(c));
  for (const auto& e : h.entropies)
    entropies.push_back({{"slot", e.slot.name}, {"multiplier", to_json(e.multiplier)}});
  for (const auto& s : h.no_knowledge) flagged.push_back(s.name);
  return {{"constraints", std::move(constraints)},
          {"entropies", std::move(entropies)},
          {"memory", std::move(memory)},
          {"no_knowledge", std::move(flagged)}};
}

IgnoranceFunctional functional_from_json(const json& j) {
  IgnoranceFunctional h;
  try {
    for (const auto& c : j.at("constraints")) h.constraints.push_back(constraint_from_json(c));
    for (const auto& c : j.at("memory")) h.memory.push_back(constraint_from_json(c));
    for (const auto& e : j.at("entropies"))
      h.entropies.push_back({multiplier_from_json(e.at("multiplier")), SlotId{e.at("slot").get<std::string>()}});
    if (j.contains("no_knowledge"))
      for (const auto& s : j.at("no_knowledge")) h.no_knowledge.insert(SlotId{s.get<std::string>()});
  } catch (const json::exception& e) {
    reject(ErrorCode::Schema, fmt::format("malformed functional document: {}", e.what()));
  }
  return h;
}

json to_json(const ProbabilityAssignment& a) {
  json values = json::object();
  for (const auto& [slot, v] : a.values()) values[slot.name] = v;
  json flagged = json::array();
  for (const auto& s : a.over_unity()) flagged.push_back(s.name);
  return {{"mode", to_string(a.mode())}, {"values", std::move(values)}, {"over_unity", std::move(flagged)}};
}

ProbabilityAssignment assignment_from_json(const json& j) {
  try {
    ProbabilityAssignment a(assignment_mode_from_string(j.at("mode").get<std::string>()));
    for (const auto& [name, v] : j.at("values").items()) a.set(SlotId{name}, v.get<double>());
    return a;
  } catch (const json::exception& e) {
    reject(ErrorCode::Schema, fmt::format("malformed assignment: {}", e.what()));
  }
}

namespace {
json names(const std::vector<SlotId>& slots) {
  json out = json::array();
  for (const auto& s : slots) out.push_back(s.name);
  return out;
}

json residual_list(const std::vector<std::pair<std::string, double>>& residuals) {
  json out = json::array();
  for (const auto& [id, r] : residuals) out.push_back({{"constraint", id}, {"residual", r}});
  return out;
}
}  // namespace

json to_json(const StationaryResult& r) {
  return {{"assignment", to_json(r.assignment)},
          {"no_ignorance", names(r.no_ignorance)},
          {"fixed_by_constraint", names(r.fixed_by_constraint)},
          {"undetermined", names(r.undetermined)},
          {"over_unity", names(r.over_unity)}};
}

json to_json(const SolveResult& r) {
  json out{{"multipliers", r.multipliers},
           {"residuals", residual_list(r.residuals)},
           {"iterations", r.iterations},
           {"feasible", r.ok()}};
  if (r.infeasible)
    out["infeasibility"] = {{"reason", r.infeasible->reason},
                            {"residuals", residual_list(r.infeasible->residuals)},
                            {"multipliers", r.infeasible->multipliers},
                            {"iterations", r.infeasible->iterations}};
  return out;
}

json to_json(const NoKnowledgeReport& r) {
  json slots = json::array();
  for (const auto& s : r.slots)
    slots.push_back({{"slot", s.slot.name},
                     {"lambda", s.lambda},
                     {"branch", s.no_ignorance ? "no-ignorance" : "p=e^-1"},
                     {"stationary", s.stationary ? json(*s.stationary) : json(nullptr)}});
  return {{"slots", std::move(slots)}, {"fundamental", r.fundamental}};
}

}  // namespace ignorance
