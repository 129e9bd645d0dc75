#include <set>

#include <fmt/format.h>

#include "ignorance/error.hpp"
#include "ignorance/tree.hpp"

namespace ignorance {

const char* to_string(PropositionKind kind) {
  return kind == PropositionKind::Event ? "event" : "residual";
}

const char* to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::Asserted: return "asserted";
    case Provenance::Derived: return "derived";
    case Provenance::Anticipated: return "anticipated";
  }
  return "derived";
}

PropositionKind proposition_kind_from_string(const std::string& s) {
  if (s == "event") return PropositionKind::Event;
  if (s == "residual") return PropositionKind::Residual;
  reject(ErrorCode::Schema, fmt::format("unknown proposition kind '{}'", s));
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "asserted") return Provenance::Asserted;
  if (s == "derived") return Provenance::Derived;
  if (s == "anticipated") return Provenance::Anticipated;
  reject(ErrorCode::Schema, fmt::format("unknown provenance '{}'", s));
}

json to_json(const Proposition& p) {
  return {{"id", p.id}, {"label", p.label}, {"kind", to_string(p.kind)}};
}

json to_json(const ProbabilitySlot& slot) {
  json out{{"provenance", to_string(slot.provenance)}};
  if (slot.is_fixed())
    out["fixed"] = slot.fixed_value();
  else
    out["variable"] = slot.variable().name;
  return out;
}

namespace {

ProbabilitySlot slot_from_json(const json& j) {
  auto prov = provenance_from_string(j.at("provenance").get<std::string>());
  if (j.contains("fixed")) return ProbabilitySlot{j.at("fixed").get<double>(), prov};
  return ProbabilitySlot{SlotId{j.at("variable").get<std::string>()}, prov};
}

json state_to_json(const BeliefTree& tree, const KnowledgeState& s) {
  json children = json::array();
  std::set<std::size_t> via_edge;
  for (const auto& e : s.children) {
    json edge{{"proposition", e.proposition.id},
              {"label", e.proposition.label},
              {"kind", to_string(e.proposition.kind)},
              {"probability", to_json(e.probability)}};
    if (e.next) {
      edge["next"] = state_to_json(tree, tree.state(*e.next));
      via_edge.insert(*e.next);
    }
    children.push_back(std::move(edge));
  }
  json continuations = json::array();
  for (const auto& other : tree.states())
    if (other.parent == s.index && !via_edge.count(other.index))
      continuations.push_back(state_to_json(tree, other));

  json out{{"index", s.index},
           {"context", s.context},
           {"verified", s.verified ? json(*s.verified) : json(nullptr)},
           {"children", std::move(children)}};
  if (!continuations.empty()) out["continuations"] = std::move(continuations);
  return out;
}

void state_from_json(const json& j, std::optional<std::size_t> parent,
                     std::vector<KnowledgeState>& states) {
  KnowledgeState s;
  s.index = j.at("index").get<std::size_t>();
  s.parent = parent;
  s.context = j.at("context").get<std::string>();
  if (!j.at("verified").is_null()) s.verified = j.at("verified").get<std::string>();
  if (s.index >= states.size()) states.resize(s.index + 1);
  for (const auto& e : j.at("children")) {
    Edge edge{{e.at("proposition").get<std::string>(), e.at("label").get<std::string>(),
               proposition_kind_from_string(e.at("kind").get<std::string>())},
              slot_from_json(e.at("probability")),
              std::nullopt};
    if (e.contains("next")) {
      edge.next = e.at("next").at("index").get<std::size_t>();
      state_from_json(e.at("next"), s.index, states);
    }
    s.children.push_back(std::move(edge));
  }
  if (j.contains("continuations"))
    for (const auto& c : j.at("continuations")) state_from_json(c, s.index, states);
  states[s.index] = std::move(s);
}

}  // namespace

json to_json(const BeliefTree& tree) {
  json props = json::array();
  for (const auto& [id, p] : tree.registry()) props.push_back(to_json(p));
  return {{"root", state_to_json(tree, tree.root())},
          {"propositions", std::move(props)},
          {"residual_counter", tree.residual_counter()}};
}

BeliefTree tree_from_json(const json& doc) {
  BeliefTree tree;
  try {
    tree.states_.clear();
    state_from_json(doc.at("root"), std::nullopt, tree.states_);
    for (const auto& p : doc.at("propositions"))
      tree.register_proposition({p.at("id").get<std::string>(), p.at("label").get<std::string>(),
                                 proposition_kind_from_string(p.at("kind").get<std::string>())});
    tree.residual_counter_ = doc.at("residual_counter").get<std::size_t>();
  } catch (const json::exception& e) {
    reject(ErrorCode::Schema, fmt::format("malformed tree document: {}", e.what()));
  }
  for (std::size_t i = 0; i < tree.states_.size(); ++i)
    if (tree.states_[i].index != i) reject(ErrorCode::Schema, "tree document has gaps in state indices");
  return tree;
}

json to_json(const Path& path) {
  json steps = json::array();
  for (const auto& s : path.steps)
    steps.push_back({{"proposition", s.proposition},
                     {"kind", to_string(s.kind)},
                     {"depth", s.depth},
                     {"probability", to_json(s.probability)}});
  return steps;
}

}  // namespace ignorance
