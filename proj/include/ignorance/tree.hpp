#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ignorance/assignment.hpp"
#include "json.hpp"

namespace ignorance {

using json = nlohmann::json;

enum class PropositionKind { Event, Residual };

/// An atomic statement such as "a coin exists". Residual propositions stand
/// for "everything else" at one expansion node.
struct Proposition {
  std::string id;
  std::string label;
  PropositionKind kind = PropositionKind::Event;

  bool is_residual() const { return kind == PropositionKind::Residual; }
  friend bool operator==(const Proposition&, const Proposition&) = default;
};

enum class Provenance { Asserted, Derived, Anticipated };

struct ProbabilitySlot {
  std::variant<double, SlotId> value;
  Provenance provenance = Provenance::Derived;

  static ProbabilitySlot fixed(double p, Provenance prov = Provenance::Asserted);
  static ProbabilitySlot unknown(SlotId id, Provenance prov = Provenance::Derived);

  bool is_fixed() const { return std::holds_alternative<double>(value); }
  double fixed_value() const { return std::get<double>(value); }
  const SlotId& variable() const { return std::get<SlotId>(value); }
  // Anticipated values may exceed 1; callers surface them as warnings.
  bool over_unity() const { return is_fixed() && fixed_value() > 1.0; }

  friend bool operator==(const ProbabilitySlot&, const ProbabilitySlot&) = default;
};

struct Edge {
  Proposition proposition;
  ProbabilitySlot probability;
  std::optional<std::size_t> next;  // state reached through this edge

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct KnowledgeState {
  std::size_t index = 0;
  std::optional<std::size_t> parent;
  std::vector<Edge> children;
  std::optional<std::string> verified;
  std::string context;  // conditioning label used in this state's slot names

  bool expanded() const { return !children.empty(); }
  const Edge* edge(const std::string& proposition_id) const;

  friend bool operator==(const KnowledgeState&, const KnowledgeState&) = default;
};

/// Adds one edge per proposition plus `residual`, all with Unknown slots named
/// "P(<id>|<context>)". Rejects an already-expanded state, an empty list,
/// residuals in `props` and duplicate ids.
KnowledgeState expand_state(const KnowledgeState& state, std::span<const Proposition> props,
                            const Proposition& residual, const std::string& context);

/// Rooted tree of knowledge states. States live in an arena; a state's index is
/// its arena position, so indices strictly increase from root to leaf.
class BeliefTree {
 public:
  BeliefTree();

  const KnowledgeState& root() const { return states_.front(); }
  const KnowledgeState& state(std::size_t index) const;
  std::size_t size() const { return states_.size(); }
  const std::vector<KnowledgeState>& states() const { return states_; }

  /// Registers `p` (or checks it matches an earlier registration).
  void register_proposition(const Proposition& p);
  bool registered(const std::string& id) const { return registry_.count(id) != 0; }
  const Proposition& proposition(const std::string& id) const;
  const std::map<std::string, Proposition>& registry() const { return registry_; }

  /// Expands `state` with `props` and a fresh residual. Slots are named after
  /// `context`, defaulting to "Z<index>".
  const KnowledgeState& expand(std::size_t state, std::span<const Proposition> props,
                               std::optional<std::string> context = std::nullopt);
  /// Replaces the edges of an unexpanded state verbatim (used for frontiers
  /// that hold only a residual, or that were rebuilt by the update engine).
  const KnowledgeState& set_children(std::size_t state, std::vector<Edge> edges,
                                     std::optional<std::string> context = std::nullopt);
  /// Creates the state reached through `proposition_id`'s edge.
  std::size_t descend(std::size_t state, const std::string& proposition_id);
  /// Appends a state whose parent is `parent` without going through an edge.
  std::size_t append(std::size_t parent);
  void mark_verified(std::size_t state, const std::string& proposition_id);
  void set_probability(std::size_t state, const std::string& proposition_id, ProbabilitySlot slot);

  Proposition fresh_residual();
  std::size_t residual_counter() const { return residual_counter_; }

  friend bool operator==(const BeliefTree&, const BeliefTree&) = default;

 private:
  KnowledgeState& mutable_state(std::size_t index);

  std::vector<KnowledgeState> states_;
  std::map<std::string, Proposition> registry_;
  std::size_t residual_counter_ = 0;

  friend BeliefTree tree_from_json(const json& doc);
};

// ---------------------------------------------------------------------------
// Paths through anticipation trees

struct PathStep {
  std::string proposition;
  PropositionKind kind = PropositionKind::Event;
  ProbabilitySlot probability;
  std::size_t depth = 0;      // 0 for the root's edges
  std::size_t branching = 0;  // number of sibling edges, this one included

  friend bool operator==(const PathStep&, const PathStep&) = default;
};

struct Path {
  std::vector<PathStep> steps;

  /// Ordered proposition ids; residual steps collapse to "~<depth>" so they
  /// compare equal only at equal depth.
  std::vector<std::string> signature() const;
  Path concat(const Path& tail) const;
  bool empty() const { return steps.empty(); }

  friend bool operator==(const Path&, const Path&) = default;
};

/// Children of an anticipation node reached by `prefix` from a root whose
/// non-residual frontier is `frontier`: every proposition not yet used on the
/// prefix, then a residual. Slot names are conditioned on the prefix.
std::vector<Edge> anticipation_children(std::span<const Proposition> frontier,
                                        std::span<const std::string> prefix,
                                        const std::string& root_context);

/// All depth-`depth` paths from the root in which both targets occur and every
/// other step is a residual. Unexpanded states are grown lazily with
/// anticipation_children. Sorted lexicographically by signature.
std::vector<Path> enumerate_joint_paths(const BeliefTree& tree,
                                        const std::pair<std::string, std::string>& targets,
                                        int depth);

/// u_n = n^2 - n, the number of depth-n paths holding both targets.
std::uint64_t count_joint_paths(int depth);

/// Product of edge probabilities along `path`.
double path_probability(const Path& path, const ProbabilityAssignment& assignment);

// ---------------------------------------------------------------------------
// Serialization

json to_json(const Proposition& p);
json to_json(const ProbabilitySlot& slot);
json to_json(const BeliefTree& tree);
json to_json(const Path& path);
BeliefTree tree_from_json(const json& doc);

const char* to_string(PropositionKind kind);
const char* to_string(Provenance provenance);
PropositionKind proposition_kind_from_string(const std::string& s);
Provenance provenance_from_string(const std::string& s);

}  // namespace ignorance
