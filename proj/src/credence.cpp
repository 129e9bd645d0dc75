#include "ignorance/credence.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ignorance/error.hpp"

namespace ignorance {

namespace {
SlotId slot_for(const std::string& id, const std::string& context) {
  return SlotId{fmt::format("P({}|{})", id, context)};
}
}  // namespace

SlotId credence_favored_slot(const CredenceSetup& s) { return slot_for(s.favored, s.context); }

std::vector<SlotId> credence_other_slots(const CredenceSetup& s) {
  std::vector<SlotId> out;
  if (s.others.empty()) {
    for (int i = 1; i <= s.x; ++i) out.push_back(slot_for(fmt::format("E_o{}", i), s.context));
  } else {
    for (const auto& id : s.others) out.push_back(slot_for(id, s.context));
  }
  return out;
}

IgnoranceFunctional credence_functional(const CredenceSetup& s) {
  if (s.x < 1) reject(ErrorCode::InvalidArgument, fmt::format("x must be at least 1, got {}", s.x));
  if (!s.others.empty() && static_cast<int>(s.others.size()) != s.x)
    reject(ErrorCode::InvalidArgument, "the number of other propositions must equal x");

  const SlotId favored = credence_favored_slot(s);
  const auto others = credence_other_slots(s);
  std::vector<SlotId> all{favored};
  all.insert(all.end(), others.begin(), others.end());

  IgnoranceFunctional h;
  h.constraints.push_back(normalization_constraint(Multiplier::fixed("mu", "μ", s.mu), all));
  h.constraints.push_back(credence_constraint(Multiplier::tied("alpha_c", "α_c", "mu", s.k), favored,
                                              others, s.beta));
  for (const auto& slot : all)
    h.entropies.push_back({Multiplier::tied("lambda:" + slot.name, "λ", "mu", 1.0), slot});
  h.memory = s.memory;
  h.check_invariants();
  return h;
}

double credence_gap(double k, double beta, double x) {
  return x + std::exp(k) - std::exp(k * beta);
}

double credence_gap_argmin(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    reject(ErrorCode::InvalidArgument, fmt::format("beta must lie in (0,1), got {}", beta));
  return std::log(beta) / (1.0 - beta);
}

double credence_remainder(double k, double beta, double x, double mu) {
  return mu * (std::exp(k * (1.0 - beta)) + x * std::exp(-k * beta) - 1.0);
}

}  // namespace ignorance
