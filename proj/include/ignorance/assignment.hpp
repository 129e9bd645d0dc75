#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ignorance {

/// Name of an unknown probability, e.g. "P(E1|Z0)".
struct SlotId {
  std::string name;

  friend auto operator<=>(const SlotId&, const SlotId&) = default;
};

enum class AssignmentMode { Normalized, Anticipation };

/// Values for probability slots. Normalized assignments hold proper
/// probabilities; Anticipation assignments hold stationary expectation weights
/// that may exceed 1.
class ProbabilityAssignment {
 public:
  explicit ProbabilityAssignment(AssignmentMode mode = AssignmentMode::Normalized) : mode_(mode) {}

  AssignmentMode mode() const { return mode_; }
  void set_mode(AssignmentMode mode) { mode_ = mode; }

  void set(const SlotId& slot, double value) { values_[slot] = value; }
  bool contains(const SlotId& slot) const { return values_.count(slot) != 0; }
  std::optional<double> find(const SlotId& slot) const;
  /// Throws ErrorCode::MissingSlot when absent.
  double at(const SlotId& slot) const;

  const std::map<SlotId, double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  /// Slots whose value exceeds 1 (only legal in Anticipation mode).
  std::vector<SlotId> over_unity() const;

  friend bool operator==(const ProbabilityAssignment&, const ProbabilityAssignment&) = default;

 private:
  AssignmentMode mode_;
  std::map<SlotId, double> values_;
};

const char* to_string(AssignmentMode mode);
AssignmentMode assignment_mode_from_string(const std::string& s);

}  // namespace ignorance
