#include "ignorance/assignment.hpp"

#include <fmt/format.h>

#include "ignorance/error.hpp"

namespace ignorance {

std::optional<double> ProbabilityAssignment::find(const SlotId& slot) const {
  auto it = values_.find(slot);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double ProbabilityAssignment::at(const SlotId& slot) const {
  auto it = values_.find(slot);
  if (it == values_.end()) reject(ErrorCode::MissingSlot, fmt::format("no value for {}", slot.name));
  return it->second;
}

std::vector<SlotId> ProbabilityAssignment::over_unity() const {
  std::vector<SlotId> out;
  for (const auto& [slot, v] : values_)
    if (v > 1.0) out.push_back(slot);
  return out;
}

const char* to_string(AssignmentMode mode) {
  return mode == AssignmentMode::Normalized ? "normalized" : "anticipation";
}

AssignmentMode assignment_mode_from_string(const std::string& s) {
  if (s == "normalized") return AssignmentMode::Normalized;
  if (s == "anticipation") return AssignmentMode::Anticipation;
  reject(ErrorCode::InvalidArgument, fmt::format("unknown assignment mode '{}'", s));
}

}  // namespace ignorance
