#include <array>
#include <memory>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "ignorance/error.hpp"
#include "ignorance/update.hpp"

namespace ignorance {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Assert: return "assert";
    case EventKind::Learn: return "learn";
    case EventKind::Inform: return "inform";
    case EventKind::Forget: return "forget";
    case EventKind::Doubt: return "doubt";
  }
  return "assert";
}

EventKind event_kind_from_string(const std::string& s) {
  for (auto k : {EventKind::Assert, EventKind::Learn, EventKind::Inform, EventKind::Forget, EventKind::Doubt})
    if (s == to_string(k)) return k;
  reject(ErrorCode::Schema, fmt::format("unknown event kind '{}'", s));
}

namespace {

json proposition_ref(const Proposition& p) { return {{"id", p.id}, {"label", p.label}}; }

Proposition proposition_from(const json& j) {
  if (j.is_string()) {
    auto id = j.get<std::string>();
    return {id, id, PropositionKind::Event};
  }
  for (const auto& [key, _] : j.items())
    if (key != "id" && key != "label") reject(ErrorCode::Schema, fmt::format("unknown proposition field '{}'", key));
  auto id = j.at("id").get<std::string>();
  return {id, j.value("label", id), PropositionKind::Event};
}

}  // namespace

json to_json(const UpdateEvent& ev) {
  json out{{"kind", to_string(ev.kind)}};
  if (ev.sequence) out["seq"] = *ev.sequence;
  switch (ev.kind) {
    case EventKind::Learn: {
      json props = json::array();
      for (const auto& p : ev.propositions) props.push_back(proposition_ref(p));
      out["propositions"] = std::move(props);
      break;
    }
    case EventKind::Inform:
      out["proposition"] = proposition_ref(ev.proposition);
      out["beta"] = ev.beta;
      out["source"] = ev.source;
      if (ev.alpha) out["alpha"] = *ev.alpha;
      break;
    case EventKind::Doubt:
      out["proposition"] = proposition_ref(ev.proposition);
      out["beta"] = ev.beta;
      if (ev.alpha) out["alpha"] = *ev.alpha;
      break;
    case EventKind::Assert:
    case EventKind::Forget:
      out["proposition"] = proposition_ref(ev.proposition);
      break;
  }
  return out;
}

UpdateEvent event_from_json(const json& j) {
  if (!j.is_object()) reject(ErrorCode::Schema, "an event must be an object");
  UpdateEvent ev;
  ev.kind = event_kind_from_string(j.at("kind").get<std::string>());
  std::set<std::string> allowed{"kind", "seq"};
  switch (ev.kind) {
    case EventKind::Learn: allowed.insert("propositions"); break;
    case EventKind::Inform: allowed.insert({"proposition", "beta", "source", "alpha"}); break;
    case EventKind::Doubt: allowed.insert({"proposition", "beta", "alpha"}); break;
    case EventKind::Assert:
    case EventKind::Forget: allowed.insert("proposition"); break;
  }
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key))
      reject(ErrorCode::Schema, fmt::format("field '{}' is not allowed on a {} event", key, to_string(ev.kind)));
  try {
    if (j.contains("seq")) ev.sequence = j.at("seq").get<std::uint64_t>();
    if (ev.kind == EventKind::Learn) {
      for (const auto& p : j.at("propositions")) ev.propositions.push_back(proposition_from(p));
    } else {
      ev.proposition = proposition_from(j.at("proposition"));
    }
    if (ev.kind == EventKind::Inform || ev.kind == EventKind::Doubt) {
      ev.beta = j.at("beta").get<double>();
      if (j.contains("alpha")) ev.alpha = j.at("alpha").get<double>();
    }
    if (ev.kind == EventKind::Inform) ev.source = j.value("source", std::string());
  } catch (const json::exception& e) {
    reject(ErrorCode::Schema, fmt::format("malformed {} event: {}", to_string(ev.kind), e.what()));
  }
  return ev;
}

json to_json(const MemoryLedger& ledger) {
  json souvenirs = json::array(), evolving = json::array();
  for (const auto& s : ledger.souvenirs)
    souvenirs.push_back({{"state", s.state},
                         {"constraint", to_json(s.constraint)},
                         {"satisfied_by", to_json(s.satisfied_by)}});
  for (const auto& c : ledger.evolving) evolving.push_back(to_json(c));
  return {{"current", ledger.current}, {"souvenirs", std::move(souvenirs)}, {"evolving", std::move(evolving)}};
}

MemoryLedger ledger_from_json(const json& j) {
  MemoryLedger ledger;
  try {
    ledger.current = j.at("current").get<std::size_t>();
    for (const auto& s : j.at("souvenirs"))
      ledger.souvenirs.push_back({s.at("state").get<std::size_t>(), constraint_from_json(s.at("constraint")),
                                  assignment_from_json(s.at("satisfied_by"))});
    for (const auto& c : j.at("evolving")) ledger.evolving.push_back(constraint_from_json(c));
  } catch (const json::exception& e) {
    reject(ErrorCode::Schema, fmt::format("malformed ledger: {}", e.what()));
  }
  return ledger;
}

json to_json(const Session& s) {
  json frontier = json::array(), knowledge = json::array(), credences = json::array();
  for (const auto& p : s.frontier_) frontier.push_back(to_json(p));
  for (const auto& k : s.knowledge_)
    knowledge.push_back({{"proposition", k.proposition.id},
                         {"multiplier", k.multiplier},
                         {"asserted_at", state_label(k.asserted_at)},
                         {"forgotten", k.forgotten},
                         {"doubt", k.doubt ? json(*k.doubt) : json(nullptr)},
                         {"doubt_alpha", k.doubt_alpha}});
  for (const auto& c : s.credences_)
    credences.push_back({{"favored", c.favored}, {"beta", c.beta}, {"source", c.source}, {"alpha", c.alpha}});
  return {{"state", s.label()},
          {"sequence", s.sequence_},
          {"tree", to_json(s.tree_)},
          {"frontier", std::move(frontier)},
          {"knowledge", std::move(knowledge)},
          {"credences", std::move(credences)},
          {"functional", to_json(s.functional_)},
          {"ledger", to_json(s.ledger_)}};
}

std::string write_event_log(const std::vector<UpdateEvent>& events) {
  std::string out;
  std::uint64_t seq = 0;
  for (auto ev : events) {
    ev.sequence = ++seq;
    out += to_json(ev).dump();
    out += '\n';
  }
  return out;
}

std::vector<UpdateEvent> read_event_log(const std::string& text) {
  std::vector<UpdateEvent> events;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      events.push_back(event_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      reject(ErrorCode::Schema, fmt::format("event log line {}: {}", number, e.what()));
    }
  }
  return events;
}

Session replay(const std::vector<UpdateEvent>& events) {
  Session s;
  for (const auto& ev : events) s = apply(std::move(s), ev);
  return s;
}

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string digest(const Session& s) { return sha256_hex(to_json(s).dump()); }

}  // namespace ignorance
