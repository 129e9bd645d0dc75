#include "ignorance/update.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include <fmt/format.h>

#include "ignorance/error.hpp"

namespace ignorance {

std::string state_label(std::size_t ordinal) {
  return ordinal == 0 ? std::string("Z") : fmt::format("Z{}", ordinal - 1);
}

std::size_t state_ordinal(const std::string& label) {
  if (label == "Z") return 0;
  std::size_t n = 0;
  const char* first = label.data() + 1;
  const char* last = label.data() + label.size();
  if (label.size() < 2 || label[0] != 'Z' || (label.size() > 2 && label[1] == '0'))
    reject(ErrorCode::InvalidArgument, fmt::format("'{}' is not a state label", label));
  auto [ptr, ec] = std::from_chars(first, last, n);
  if (ec != std::errc() || ptr != last)
    reject(ErrorCode::InvalidArgument, fmt::format("'{}' is not a state label", label));
  return n + 1;
}

UpdateEvent UpdateEvent::assertion(Proposition p) {
  UpdateEvent ev;
  ev.kind = EventKind::Assert;
  ev.proposition = std::move(p);
  return ev;
}

UpdateEvent UpdateEvent::learn(std::vector<Proposition> props) {
  UpdateEvent ev;
  ev.kind = EventKind::Learn;
  ev.propositions = std::move(props);
  return ev;
}

UpdateEvent UpdateEvent::inform(Proposition p, double beta, std::string source, double alpha) {
  UpdateEvent ev;
  ev.kind = EventKind::Inform;
  ev.proposition = std::move(p);
  ev.beta = beta;
  ev.source = std::move(source);
  ev.alpha = alpha;
  return ev;
}

UpdateEvent UpdateEvent::forget(std::string id) {
  UpdateEvent ev;
  ev.kind = EventKind::Forget;
  ev.proposition = {id, id, PropositionKind::Event};
  return ev;
}

UpdateEvent UpdateEvent::doubt(std::string id, double beta) {
  UpdateEvent ev;
  ev.kind = EventKind::Doubt;
  ev.proposition = {id, id, PropositionKind::Event};
  ev.beta = beta;
  return ev;
}

std::vector<LinearConstraint> recall(const MemoryLedger& ledger, std::size_t ordinal) {
  if (ordinal > ledger.current)
    reject(ErrorCode::Precondition,
           fmt::format("cannot recall {}: the current state is {}", state_label(ordinal),
                       state_label(ledger.current)));
  std::vector<LinearConstraint> out;
  for (const auto& s : ledger.souvenirs)
    if (s.state == ordinal) out.push_back(s.constraint);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

SlotId slot_name(const std::string& id, const std::string& label) {
  return SlotId{fmt::format("P({}|{})", id, label)};
}

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    reject(ErrorCode::InvalidArgument, fmt::format("beta must lie in [0,1], got {}", beta));
}

std::string unique_id(const IgnoranceFunctional& h, std::string id) {
  while (h.find_multiplier(id)) id += "'";
  return id;
}

}  // namespace

Renormalization renormalize_after_assert(const std::optional<AssertTrace>& trace) {
  if (!trace) reject(ErrorCode::Precondition, "renormalization needs an Assert immediately before it");

  // Materialize ties first: zeroing mu must not drag lambda = mu along.
  IgnoranceFunctional h = trace->before;
  auto freeze = [&](Multiplier& m) {
    m.value = trace->before.resolve(m);
    m.tie.reset();
  };
  for (auto& c : h.constraints) freeze(c.multiplier);
  for (auto& c : h.memory) freeze(c.multiplier);
  for (auto& e : h.entropies) freeze(e.multiplier);

  auto norm = std::find_if(h.constraints.begin(), h.constraints.end(), [](const LinearConstraint& c) {
    return c.kind == ConstraintKind::Normalization && c.multiplier.value != 0.0;
  });
  if (norm == h.constraints.end()) reject(ErrorCode::Precondition, "no active normalization to clear");
  const double mu = *norm->multiplier.value;
  const std::string mu_id = norm->multiplier.id;
  norm->multiplier.value = 0.0;

  // alpha_c comes from a credence favoring the verified slot, else 1.
  double alpha = 1.0;
  std::string alpha_id = "alpha:" + trace->verified.name;
  for (auto& c : h.constraints) {
    if (c.kind == ConstraintKind::Credence && c.coefficient(trace->verified_before) > 0.0) {
      alpha = *c.multiplier.value;
      alpha_id = c.multiplier.id + "/memory";
      c.multiplier.value = 0.0;
    }
  }
  auto kept = knowledge_constraint(Multiplier::fixed(unique_id(h, alpha_id), "α_c", alpha), trace->verified);
  kept.kind = ConstraintKind::Souvenir;
  h.memory.push_back(std::move(kept));

  const auto stationary = stationary_assignment(trace->before);
  double total = 0.0;
  for (const auto& [pre, post] : trace->frontier) total += stationary.assignment.at(pre);
  if (!(total > 0.0)) reject(ErrorCode::Precondition, "the remaining frontier has no stationary weight");

  Renormalization out;
  std::vector<SlotId> posts;
  for (const auto& [pre, post] : trace->frontier) {
    out.frontier.set(post, stationary.assignment.at(pre) / total);
    posts.push_back(post);
  }
  auto fresh = normalization_constraint(Multiplier::fixed(unique_id(h, mu_id + "'"), "μ", mu), posts);
  for (const auto& [pre, post] : trace->frontier) {
    const auto* e = h.entropy_for(pre);
    const double lambda = e ? *e->multiplier.value : 1.0;
    h.entropies.push_back({Multiplier::fixed(unique_id(h, "lambda:" + post.name), "λ", lambda), post});
  }
  h.constraints.push_back(std::move(fresh));
  out.functional = std::move(h);
  return out;
}

// ---------------------------------------------------------------------------

Session::Session() { ledger_.current = 0; }

std::string Session::naming_label() const {
  return ordinal_ == 0 ? state_label(0) : state_label(ordinal_ - 1);
}

SlotId Session::slot(const std::string& id) const { return slot_name(id, naming_label()); }

std::vector<SlotId> Session::frontier_slots() const {
  std::vector<SlotId> out;
  for (const auto& p : frontier_) out.push_back(slot(p.id));
  return out;
}

ProbabilityAssignment Session::memory_assignment() const {
  ProbabilityAssignment a(AssignmentMode::Normalized);
  for (const auto& s : ledger_.souvenirs)
    for (const auto& [slot, v] : s.satisfied_by.values()) a.set(slot, v);
  return a;
}

const Proposition* Session::on_frontier(const std::string& id) const {
  for (const auto& p : frontier_)
    if (p.id == id) return &p;
  return nullptr;
}

Session::KnowledgeRecord& Session::known(const std::string& id, const char* action) {
  for (auto& k : knowledge_)
    if (k.proposition.id == id) return k;
  reject(ErrorCode::Unregistered, fmt::format("cannot {} '{}': it was never asserted", action, id));
}

IgnoranceFunctional Session::build(const std::string& label) const {
  IgnoranceFunctional h;
  for (const auto& k : knowledge_) {
    const auto& id = k.proposition.id;
    if (k.doubt) {
      h.constraints.push_back(doubt_constraint(
          Multiplier::fixed("alpha_Y:" + id, "α_Y", k.forgotten ? 0.0 : k.doubt_alpha),
          slot_name(id, label), *k.doubt));
      h.entropies.push_back({Multiplier::fixed("lambda_Y:" + id, "λ_Y", 1.0), slot_name(id, label)});
    } else {
      h.constraints.push_back(knowledge_constraint(
          Multiplier::fixed("mu:" + id, "μ_" + id, k.forgotten ? 0.0 : k.multiplier), slot_name(id, label)));
    }
  }
  if (!frontier_.empty()) {
    std::vector<SlotId> slots;
    for (const auto& p : frontier_) slots.push_back(slot_name(p.id, label));
    h.constraints.push_back(normalization_constraint(Multiplier::fixed("mu", "μ", 1.0), slots));
    for (const auto& c : credences_) {
      std::vector<SlotId> others;
      for (const auto& p : frontier_)
        if (p.id != c.favored) others.push_back(slot_name(p.id, label));
      h.constraints.push_back(credence_constraint(Multiplier::fixed("alpha:" + c.favored, "α", c.alpha),
                                                  slot_name(c.favored, label), others, c.beta));
    }
    for (const auto& p : frontier_)
      h.entropies.push_back({Multiplier::fixed("lambda:" + p.id, "λ_" + p.id, 1.0), slot_name(p.id, label)});
  }
  for (const auto& s : ledger_.souvenirs) h.memory.push_back(s.constraint);
  return h;
}

void Session::advance(std::vector<Proposition> next_frontier, const std::optional<std::string>& via) {
  const std::string label = state_label(ordinal_);
  const std::size_t next = via ? tree_.descend(ordinal_, *via) : tree_.append(ordinal_);
  std::vector<Edge> edges;
  for (const auto& p : next_frontier)
    edges.push_back({p, ProbabilitySlot::unknown(slot_name(p.id, label)), std::nullopt});
  tree_.set_children(next, std::move(edges), label);

  frontier_ = std::move(next_frontier);
  ordinal_ = next;
  functional_ = build(label);
  functional_.check_invariants();
  ledger_.current = ordinal_;
  ledger_.evolving.clear();
  for (const auto& c : functional_.constraints)
    if (c.kind == ConstraintKind::Knowledge || c.kind == ConstraintKind::Doubt) ledger_.evolving.push_back(c);
}

void Session::apply_assert(const UpdateEvent& ev) {
  const Proposition& e = ev.proposition;
  if (e.is_residual()) reject(ErrorCode::InvalidArgument, "a residual proposition cannot be asserted");
  for (const auto& k : knowledge_)
    if (k.proposition.id == e.id)
      reject(ErrorCode::Precondition, fmt::format("'{}' has already been asserted", e.id));

  const std::string label = state_label(ordinal_);
  const std::size_t here = ordinal_;
  if (frontier_.empty()) {
    // Nothing anticipated yet: the state is expanded with E and its negation.
    tree_.expand(here, std::span<const Proposition>(&e, 1), label);
    for (const auto& edge : tree_.state(here).children) frontier_.push_back(edge.proposition);
  }
  const std::string pre_label = tree_.state(here).context;
  const IgnoranceFunctional before = build(pre_label);

  // E is either on the frontier or, if never seen, what the residual turned into.
  std::string edge_id = e.id;
  if (!on_frontier(e.id)) {
    if (tree_.registered(e.id))
      reject(ErrorCode::Precondition, fmt::format("'{}' is not on the frontier of {}", e.id, state_label(here)));
    edge_id = frontier_.back().id;
    tree_.register_proposition(e);
  }
  const Proposition old_residual = frontier_.back();

  tree_.mark_verified(here, edge_id);
  tree_.set_probability(here, edge_id, ProbabilitySlot::fixed(1.0, Provenance::Asserted));

  const std::size_t next = here + 1;
  const std::string tag = "@" + state_label(next);
  const SlotId verified_before = slot_name(edge_id, pre_label);
  const SlotId verified = slot_name(e.id, label);

  // Souvenirs: the normalization that was active, and the fresh knowledge.
  for (const auto& c : before.constraints) {
    if (c.kind != ConstraintKind::Normalization) continue;
    Souvenir s{next, c, ProbabilityAssignment(AssignmentMode::Normalized)};
    s.constraint.multiplier.id += tag;
    for (const auto& t : c.coefficients) s.satisfied_by.set(t.slot, t.slot == verified_before ? 1.0 : 0.0);
    ledger_.souvenirs.push_back(std::move(s));
  }
  {
    Souvenir s{next, knowledge_constraint(Multiplier::fixed("mu:" + e.id + tag, "μ_" + e.id, 1.0), verified),
               ProbabilityAssignment(AssignmentMode::Normalized)};
    s.satisfied_by.set(verified, 1.0);
    ledger_.souvenirs.push_back(std::move(s));
  }
  auto credence = std::find_if(credences_.begin(), credences_.end(),
                               [&](const CredenceRecord& c) { return c.favored == edge_id; });
  if (credence != credences_.end()) {
    Souvenir s{next, knowledge_constraint(Multiplier::fixed("alpha:" + e.id + tag, "α_c", credence->alpha), verified),
               ProbabilityAssignment(AssignmentMode::Normalized)};
    s.constraint.kind = ConstraintKind::Souvenir;
    s.satisfied_by.set(verified, 1.0);
    ledger_.souvenirs.push_back(std::move(s));
    credences_.erase(credence);
  }
  knowledge_.push_back({e, 1.0, here, false, std::nullopt, 1.0});

  std::vector<Proposition> next_frontier;
  for (const auto& p : frontier_)
    if (!p.is_residual() && p.id != e.id) next_frontier.push_back(p);
  const Proposition residual = tree_.fresh_residual();
  next_frontier.push_back(residual);

  AssertTrace trace{verified_before, verified, {}, before};
  for (const auto& p : next_frontier) {
    const std::string& pre = p.is_residual() ? old_residual.id : p.id;
    trace.frontier.emplace_back(slot_name(pre, pre_label), slot_name(p.id, label));
  }

  advance(std::move(next_frontier), edge_id);
  last_assert_ = std::move(trace);
}

void Session::apply_learn(const UpdateEvent& ev) {
  if (ev.propositions.empty()) reject(ErrorCode::InvalidArgument, "Learn needs at least one proposition");
  std::set<std::string> seen;
  for (const auto& p : ev.propositions) {
    if (p.is_residual()) reject(ErrorCode::InvalidArgument, "Learn cannot introduce a residual");
    if (tree_.registered(p.id) || !seen.insert(p.id).second)
      reject(ErrorCode::Duplicate, fmt::format("'{}' is not a new proposition", p.id));
  }
  std::vector<Proposition> next_frontier;
  for (const auto& p : frontier_)
    if (!p.is_residual()) next_frontier.push_back(p);
  next_frontier.insert(next_frontier.end(), ev.propositions.begin(), ev.propositions.end());
  next_frontier.push_back(tree_.fresh_residual());
  advance(std::move(next_frontier), std::nullopt);
}

void Session::apply_inform(const UpdateEvent& ev) {
  const std::string& id = ev.proposition.id;
  check_beta(ev.beta);
  for (const auto& k : knowledge_)
    if (k.proposition.id == id)
      reject(ErrorCode::Precondition, fmt::format("'{}' is verified; a credence on it means nothing", id));
  const Proposition* p = on_frontier(id);
  if (!p) reject(ErrorCode::Unregistered, fmt::format("'{}' is not on the frontier", id));
  if (p->is_residual()) reject(ErrorCode::InvalidArgument, "a credence cannot favor the residual");
  CredenceRecord record{id, ev.beta, ev.source, ev.alpha.value_or(1.0)};
  auto it = std::find_if(credences_.begin(), credences_.end(),
                         [&](const CredenceRecord& c) { return c.favored == id; });
  if (it != credences_.end())
    *it = std::move(record);
  else
    credences_.push_back(std::move(record));
  advance(frontier_, std::nullopt);
}

void Session::apply_forget(const UpdateEvent& ev) {
  known(ev.proposition.id, "forget").forgotten = true;
  advance(frontier_, std::nullopt);
}

void Session::apply_doubt(const UpdateEvent& ev) {
  check_beta(ev.beta);
  auto& k = known(ev.proposition.id, "doubt");
  if (k.doubt) reject(ErrorCode::Precondition, fmt::format("'{}' is already doubted", ev.proposition.id));
  k.doubt = ev.beta;
  k.doubt_alpha = ev.alpha.value_or(1.0);
  advance(frontier_, std::nullopt);
}

Session apply(Session session, const UpdateEvent& ev) {
  if (ev.sequence && *ev.sequence != session.sequence_ + 1)
    reject(ErrorCode::Sequence, fmt::format("event #{} arrived when #{} was expected", *ev.sequence,
                                            session.sequence_ + 1));
  switch (ev.kind) {
    case EventKind::Assert: session.apply_assert(ev); break;
    case EventKind::Learn: session.apply_learn(ev); break;
    case EventKind::Inform: session.apply_inform(ev); break;
    case EventKind::Forget: session.apply_forget(ev); break;
    case EventKind::Doubt: session.apply_doubt(ev); break;
  }
  if (ev.kind != EventKind::Assert) session.last_assert_.reset();
  ++session.sequence_;
  return session;
}

}  // namespace ignorance
