#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ignorance/functional.hpp"
#include "ignorance/tree.hpp"

namespace ignorance {

/// Label of the state with ordinal `n`: the initial state is "Z", then
/// "Z0", "Z1", ...
std::string state_label(std::size_t ordinal);
/// Inverse of state_label; rejects anything else.
std::size_t state_ordinal(const std::string& label);

enum class EventKind { Assert, Learn, Inform, Forget, Doubt };

struct UpdateEvent {
  EventKind kind = EventKind::Assert;
  Proposition proposition;                // Assert, Inform, Forget, Doubt
  std::vector<Proposition> propositions;  // Learn
  double beta = 0.0;                      // Inform, Doubt
  std::string source;                     // Inform
  std::optional<double> alpha;            // Inform, Doubt; defaults to 1
  std::optional<std::uint64_t> sequence;  // checked against the session when present

  static UpdateEvent assertion(Proposition p);
  static UpdateEvent learn(std::vector<Proposition> props);
  static UpdateEvent inform(Proposition p, double beta, std::string source, double alpha = 1.0);
  static UpdateEvent forget(std::string id);
  static UpdateEvent doubt(std::string id, double beta);

  friend bool operator==(const UpdateEvent&, const UpdateEvent&) = default;
};

struct Souvenir {
  std::size_t state = 0;  // ordinal of the state whose creation recorded it
  LinearConstraint constraint;
  ProbabilityAssignment satisfied_by;

  friend bool operator==(const Souvenir&, const Souvenir&) = default;
};

/// Frozen souvenirs plus the evolving knowledge chain. Souvenirs keep the slot
/// names they were recorded with; evolving constraints are renamed at every
/// transition.
struct MemoryLedger {
  std::vector<Souvenir> souvenirs;
  std::vector<LinearConstraint> evolving;
  std::size_t current = 0;

  friend bool operator==(const MemoryLedger&, const MemoryLedger&) = default;
};

/// Souvenirs recorded at state `ordinal`, unmodified. Rejects future states.
std::vector<LinearConstraint> recall(const MemoryLedger& ledger, std::size_t ordinal);

/// Record of what the most recent Assert did, for renormalize_after_assert.
struct AssertTrace {
  SlotId verified_before;               // verified slot as named before the Assert
  SlotId verified;                      // post-assert name of the verified slot
  std::vector<std::pair<SlotId, SlotId>> frontier;  // pre-assert slot -> post-assert slot
  IgnoranceFunctional before;           // functional just before the Assert

  friend bool operator==(const AssertTrace&, const AssertTrace&) = default;
};

struct Renormalization {
  IgnoranceFunctional functional;
  ProbabilityAssignment frontier{AssignmentMode::Normalized};
};

/// The post-assert clean-up: zero the previous normalization multiplier, keep
/// alpha_c (p_verified - 1) in memory, and install a fresh normalization over
/// the remaining frontier whose values are the stationary anticipation values
/// divided by their sum. Rejects when no Assert preceded it.
Renormalization renormalize_after_assert(const std::optional<AssertTrace>& trace);

/// One agent's knowledge: the belief tree, the Ignorance functional derived
/// from it, and the memory ledger. Values are replaced wholesale by apply().
class Session {
 public:
  struct KnowledgeRecord {
    Proposition proposition;
    double multiplier = 1.0;
    std::size_t asserted_at = 0;
    bool forgotten = false;
    std::optional<double> doubt;   // beta_Y once doubted
    double doubt_alpha = 1.0;
    friend bool operator==(const KnowledgeRecord&, const KnowledgeRecord&) = default;
  };
  struct CredenceRecord {
    std::string favored;
    double beta = 0.0;
    std::string source;
    double alpha = 1.0;
    friend bool operator==(const CredenceRecord&, const CredenceRecord&) = default;
  };

  Session();

  const BeliefTree& tree() const { return tree_; }
  const KnowledgeState& state() const { return tree_.state(ordinal_); }
  const IgnoranceFunctional& functional() const { return functional_; }
  const MemoryLedger& ledger() const { return ledger_; }
  std::size_t ordinal() const { return ordinal_; }
  std::string label() const { return state_label(ordinal_); }
  std::uint64_t sequence() const { return sequence_; }
  const std::vector<Proposition>& frontier() const { return frontier_; }
  const std::vector<KnowledgeRecord>& knowledge() const { return knowledge_; }
  const std::vector<CredenceRecord>& credences() const { return credences_; }
  const std::optional<AssertTrace>& last_assert() const { return last_assert_; }

  /// Name of `proposition_id`'s slot in the current functional.
  SlotId slot(const std::string& proposition_id) const;
  /// Current-functional slots of the frontier, in frontier order.
  std::vector<SlotId> frontier_slots() const;
  /// Values satisfying every souvenir, for completing assignments.
  ProbabilityAssignment memory_assignment() const;

  friend Session apply(Session session, const UpdateEvent& event);
  friend bool operator==(const Session&, const Session&) = default;
  friend json to_json(const Session& s);

 private:
  void apply_assert(const UpdateEvent& ev);
  void apply_learn(const UpdateEvent& ev);
  void apply_inform(const UpdateEvent& ev);
  void apply_forget(const UpdateEvent& ev);
  void apply_doubt(const UpdateEvent& ev);
  void advance(std::vector<Proposition> frontier, const std::optional<std::string>& via);
  IgnoranceFunctional build(const std::string& label) const;
  KnowledgeRecord& known(const std::string& id, const char* action);
  const Proposition* on_frontier(const std::string& id) const;
  std::string naming_label() const;  // label used by the functional at this state

  BeliefTree tree_;
  std::size_t ordinal_ = 0;
  std::uint64_t sequence_ = 0;
  std::vector<Proposition> frontier_;  // residual last
  std::vector<KnowledgeRecord> knowledge_;
  std::vector<CredenceRecord> credences_;
  IgnoranceFunctional functional_;
  MemoryLedger ledger_;
  std::optional<AssertTrace> last_assert_;
};

/// Applies one event and returns the next session. Events are strictly serial;
/// a present `event.sequence` must equal session.sequence() + 1.
Session apply(Session session, const UpdateEvent& event);

// ---------------------------------------------------------------------------
// Serialization

const char* to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& s);

json to_json(const UpdateEvent& ev);
UpdateEvent event_from_json(const json& j);
json to_json(const MemoryLedger& ledger);
MemoryLedger ledger_from_json(const json& j);
json to_json(const Session& s);

/// Newline-delimited JSON, one event per line, each stamped with its sequence.
std::string write_event_log(const std::vector<UpdateEvent>& events);
std::vector<UpdateEvent> read_event_log(const std::string& text);
/// Replays the log from an empty session.
Session replay(const std::vector<UpdateEvent>& events);

/// SHA-256 (hex) of the session's canonical JSON.
std::string digest(const Session& s);
std::string sha256_hex(const std::string& data);

}  // namespace ignorance
