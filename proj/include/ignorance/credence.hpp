#pragma once

#include <string>
#include <vector>

#include "ignorance/functional.hpp"

namespace ignorance {

/// The single-credence functional: a normalization over the favored slot and
/// `x` others, one credence constraint on the favored slot, and an entropy
/// term per slot. Entropy multipliers are tied to mu (lambda = mu) and the
/// credence multiplier to k mu.
struct CredenceSetup {
  double k = 1.0;
  double beta = 0.7;
  int x = 5;
  double mu = 1.0;
  std::string context = "Z2";
  std::string favored = "E_c";
  std::vector<std::string> others;  // generated as E_o1..E_ox when empty
  std::vector<LinearConstraint> memory;
  ProbabilityAssignment memory_values{AssignmentMode::Anticipation};  // completes memory slots
};

IgnoranceFunctional credence_functional(const CredenceSetup& setup);
SlotId credence_favored_slot(const CredenceSetup& setup);
std::vector<SlotId> credence_other_slots(const CredenceSetup& setup);

/// x + e^k - e^(k beta): how far the stationary values overshoot normalization.
double credence_gap(double k, double beta, double x);
/// ln(beta) / (1 - beta), where credence_gap is smallest in k. Needs beta in (0,1).
double credence_gap_argmin(double beta);
/// mu [e^(k(1-beta)) + x e^(-k beta) - 1], what H keeps at the stationary point
/// besides memory.
double credence_remainder(double k, double beta, double x, double mu);

}  // namespace ignorance
