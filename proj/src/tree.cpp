#include "ignorance/tree.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "ignorance/error.hpp"

namespace ignorance {

namespace {

std::string slot_name(const std::string& id, const std::string& context) {
  return fmt::format("P({}|{})", id, context);
}

std::string anticipation_context(std::span<const std::string> prefix, const std::string& root) {
  std::string ctx;
  for (const auto& id : prefix) {
    ctx += id;
    ctx += ',';
  }
  return ctx + root;
}

}  // namespace

ProbabilitySlot ProbabilitySlot::fixed(double p, Provenance prov) {
  if (!(p >= 0.0)) reject(ErrorCode::NegativeProbability, fmt::format("probability {} < 0", p));
  if (p > 1.0 && prov != Provenance::Anticipated)
    reject(ErrorCode::InvalidArgument,
           fmt::format("probability {} > 1 is only allowed for anticipated slots", p));
  return ProbabilitySlot{p, prov};
}

ProbabilitySlot ProbabilitySlot::unknown(SlotId id, Provenance prov) {
  return ProbabilitySlot{std::move(id), prov};
}

const Edge* KnowledgeState::edge(const std::string& proposition_id) const {
  auto it = std::find_if(children.begin(), children.end(),
                         [&](const Edge& e) { return e.proposition.id == proposition_id; });
  return it == children.end() ? nullptr : &*it;
}

KnowledgeState expand_state(const KnowledgeState& state, std::span<const Proposition> props,
                            const Proposition& residual, const std::string& context) {
  if (state.expanded())
    reject(ErrorCode::Precondition, fmt::format("state Z{} is already expanded", state.index));
  if (props.empty()) reject(ErrorCode::Precondition, "expansion needs at least one proposition");
  if (!residual.is_residual()) reject(ErrorCode::InvalidArgument, "residual edge must be Residual");

  std::set<std::string> seen{residual.id};
  KnowledgeState out = state;
  out.context = context;
  for (const auto& p : props) {
    if (p.is_residual())
      reject(ErrorCode::InvalidArgument, fmt::format("'{}' is a residual; residuals are implicit", p.id));
    if (!seen.insert(p.id).second)
      reject(ErrorCode::Duplicate, fmt::format("duplicate proposition id '{}'", p.id));
    out.children.push_back({p, ProbabilitySlot::unknown({slot_name(p.id, context)}), std::nullopt});
  }
  out.children.push_back(
      {residual, ProbabilitySlot::unknown({slot_name(residual.id, context)}), std::nullopt});
  return out;
}

// ---------------------------------------------------------------------------

BeliefTree::BeliefTree() {
  KnowledgeState root;
  root.context = "Z0";
  states_.push_back(std::move(root));
}

const KnowledgeState& BeliefTree::state(std::size_t index) const {
  if (index >= states_.size()) reject(ErrorCode::InvalidArgument, fmt::format("no state {}", index));
  return states_[index];
}

KnowledgeState& BeliefTree::mutable_state(std::size_t index) {
  if (index >= states_.size()) reject(ErrorCode::InvalidArgument, fmt::format("no state {}", index));
  return states_[index];
}

void BeliefTree::register_proposition(const Proposition& p) {
  auto [it, inserted] = registry_.emplace(p.id, p);
  if (!inserted && !(it->second == p))
    reject(ErrorCode::Duplicate, fmt::format("proposition id '{}' already registered differently", p.id));
}

const Proposition& BeliefTree::proposition(const std::string& id) const {
  auto it = registry_.find(id);
  if (it == registry_.end()) reject(ErrorCode::Unregistered, fmt::format("unknown proposition '{}'", id));
  return it->second;
}

Proposition BeliefTree::fresh_residual() {
  return {fmt::format("E_M#{}", residual_counter_++), "everything else", PropositionKind::Residual};
}

const KnowledgeState& BeliefTree::expand(std::size_t index, std::span<const Proposition> props,
                                         std::optional<std::string> context) {
  const auto& current = state(index);
  std::string ctx = context.value_or(fmt::format("Z{}", index));
  auto residual = fresh_residual();
  auto expanded = expand_state(current, props, residual, ctx);
  for (const auto& p : props) register_proposition(p);
  register_proposition(residual);
  states_[index] = std::move(expanded);
  return states_[index];
}

const KnowledgeState& BeliefTree::set_children(std::size_t index, std::vector<Edge> edges,
                                               std::optional<std::string> context) {
  auto& s = mutable_state(index);
  if (s.expanded()) reject(ErrorCode::Precondition, fmt::format("state Z{} is already expanded", index));
  std::set<std::string> seen;
  std::size_t residuals = 0;
  for (const auto& e : edges) {
    if (!seen.insert(e.proposition.id).second)
      reject(ErrorCode::Duplicate, fmt::format("duplicate proposition id '{}'", e.proposition.id));
    residuals += e.proposition.is_residual() ? 1 : 0;
  }
  if (residuals != 1) reject(ErrorCode::InvalidArgument, "an expansion needs exactly one residual edge");
  for (const auto& e : edges) register_proposition(e.proposition);
  s.children = std::move(edges);
  if (context) s.context = std::move(*context);
  return s;
}

std::size_t BeliefTree::descend(std::size_t index, const std::string& proposition_id) {
  auto& s = mutable_state(index);
  auto it = std::find_if(s.children.begin(), s.children.end(),
                         [&](const Edge& e) { return e.proposition.id == proposition_id; });
  if (it == s.children.end())
    reject(ErrorCode::Unregistered, fmt::format("Z{} has no edge '{}'", index, proposition_id));
  if (it->next) return *it->next;
  std::size_t child = states_.size();
  it->next = child;
  KnowledgeState next;
  next.index = child;
  next.parent = index;
  next.context = fmt::format("Z{}", child);
  states_.push_back(std::move(next));
  return child;
}

std::size_t BeliefTree::append(std::size_t parent) {
  state(parent);
  KnowledgeState next;
  next.index = states_.size();
  next.parent = parent;
  next.context = fmt::format("Z{}", next.index);
  states_.push_back(std::move(next));
  return states_.back().index;
}

void BeliefTree::mark_verified(std::size_t index, const std::string& proposition_id) {
  auto& s = mutable_state(index);
  if (!s.edge(proposition_id))
    reject(ErrorCode::Unregistered, fmt::format("Z{} has no edge '{}'", index, proposition_id));
  if (s.verified && *s.verified != proposition_id)
    reject(ErrorCode::Precondition,
           fmt::format("Z{} already has verified edge '{}'", index, *s.verified));
  s.verified = proposition_id;
}

void BeliefTree::set_probability(std::size_t index, const std::string& proposition_id,
                                 ProbabilitySlot slot) {
  auto& s = mutable_state(index);
  for (auto& e : s.children) {
    if (e.proposition.id == proposition_id) {
      e.probability = std::move(slot);
      return;
    }
  }
  reject(ErrorCode::Unregistered, fmt::format("Z{} has no edge '{}'", index, proposition_id));
}

// ---------------------------------------------------------------------------

std::vector<std::string> Path::signature() const {
  std::vector<std::string> out;
  out.reserve(steps.size());
  for (const auto& s : steps)
    out.push_back(s.kind == PropositionKind::Residual ? fmt::format("~{}", s.depth) : s.proposition);
  return out;
}

Path Path::concat(const Path& tail) const {
  Path out = *this;
  out.steps.insert(out.steps.end(), tail.steps.begin(), tail.steps.end());
  return out;
}

std::vector<Edge> anticipation_children(std::span<const Proposition> frontier,
                                        std::span<const std::string> prefix,
                                        const std::string& root_context) {
  std::string ctx = anticipation_context(prefix, root_context);
  std::vector<Edge> out;
  for (const auto& p : frontier) {
    if (p.is_residual()) continue;
    if (std::find(prefix.begin(), prefix.end(), p.id) != prefix.end()) continue;
    out.push_back({p, ProbabilitySlot::unknown({slot_name(p.id, ctx)}), std::nullopt});
  }
  Proposition residual{fmt::format("E_M@{}", prefix.size()), "everything else",
                       PropositionKind::Residual};
  out.push_back({residual, ProbabilitySlot::unknown({slot_name(residual.id, ctx)}), std::nullopt});
  return out;
}

namespace {

struct JointWalker {
  const BeliefTree& tree;
  std::vector<Proposition> frontier;
  std::string root_context;
  std::pair<std::string, std::string> targets;
  std::size_t depth;
  std::vector<Path> found;

  bool is_target(const std::string& id) const { return id == targets.first || id == targets.second; }

  // `state` is the explicit tree state for this node, if one exists.
  void walk(std::optional<std::size_t> state, std::vector<std::string>& prefix, Path& path) {
    if (path.steps.size() == depth) {
      std::size_t first = 0, second = 0;
      for (const auto& s : path.steps) {
        first += s.proposition == targets.first ? 1 : 0;
        second += s.proposition == targets.second ? 1 : 0;
      }
      if (first == 1 && second == 1) found.push_back(path);
      return;
    }
    std::vector<Edge> edges;
    if (state && tree.state(*state).expanded()) {
      edges = tree.state(*state).children;
    } else {
      edges = anticipation_children(frontier, prefix, root_context);
    }
    for (const auto& e : edges) {
      // Only targets and residuals can lead to a qualifying path.
      bool keep = e.proposition.is_residual() || is_target(e.proposition.id);
      if (!keep) continue;
      path.steps.push_back({e.proposition.id, e.proposition.kind, e.probability, path.steps.size(),
                            edges.size()});
      prefix.push_back(e.proposition.id);
      walk(e.next, prefix, path);
      prefix.pop_back();
      path.steps.pop_back();
    }
  }
};

}  // namespace

std::vector<Path> enumerate_joint_paths(const BeliefTree& tree,
                                        const std::pair<std::string, std::string>& targets,
                                        int depth) {
  if (depth < 1) reject(ErrorCode::Precondition, fmt::format("depth must be >= 1 (got {})", depth));
  for (const auto& t : {targets.first, targets.second}) {
    if (!tree.registered(t)) reject(ErrorCode::Unregistered, fmt::format("unregistered target '{}'", t));
    if (tree.proposition(t).is_residual())
      reject(ErrorCode::InvalidArgument, fmt::format("target '{}' is a residual", t));
  }
  if (targets.first == targets.second) reject(ErrorCode::InvalidArgument, "targets must differ");

  JointWalker walker{tree, {}, tree.root().context, targets, static_cast<std::size_t>(depth), {}};
  for (const auto& e : tree.root().children)
    if (!e.proposition.is_residual()) walker.frontier.push_back(e.proposition);
  for (const auto& t : {targets.first, targets.second}) {
    bool present = std::any_of(walker.frontier.begin(), walker.frontier.end(),
                               [&](const Proposition& p) { return p.id == t; });
    if (!present) walker.frontier.push_back(tree.proposition(t));
  }

  std::vector<std::string> prefix;
  Path path;
  walker.walk(std::size_t{tree.root().index}, prefix, path);
  std::sort(walker.found.begin(), walker.found.end(),
            [](const Path& a, const Path& b) { return a.signature() < b.signature(); });
  return walker.found;
}

std::uint64_t count_joint_paths(int depth) {
  if (depth <= 0) reject(ErrorCode::Precondition, fmt::format("depth must be >= 1 (got {})", depth));
  auto n = static_cast<std::uint64_t>(depth);
  return n * n - n;
}

double path_probability(const Path& path, const ProbabilityAssignment& assignment) {
  double product = 1.0;
  for (const auto& step : path.steps) {
    if (step.probability.is_fixed()) {
      product *= step.probability.fixed_value();
    } else {
      auto v = assignment.find(step.probability.variable());
      if (!v)
        reject(ErrorCode::MissingSlot,
               fmt::format("no value for {}", step.probability.variable().name));
      product *= *v;
    }
  }
  return product;
}

}  // namespace ignorance
