#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ignorance/credence.hpp"
#include "ignorance/functional.hpp"
#include "ignorance/tree.hpp"

namespace ignorance {

using PropositionPair = std::pair<std::string, std::string>;

/// Sum of path probabilities over the depth-`depth` joint paths in which
/// `order.first` comes before `order.second`.
double joint_probability(const BeliefTree& tree, const PropositionPair& order, int depth,
                         const ProbabilityAssignment& a);

/// Replaces the edge values below the node reached by `after`: listed
/// propositions take the given value, every other edge takes `rest` when set.
struct EdgeOverride {
  std::vector<std::string> after;
  std::map<std::string, double> probabilities;
  std::optional<double> rest;
};

/// Values for every edge of the anticipation tree down to `depth`: each edge
/// gets 1/(number of siblings), then the overrides apply in order.
ProbabilityAssignment anticipation_assignment(const BeliefTree& tree, int depth,
                                              std::span<const EdgeOverride> overrides = {});

/// Tree whose root holds `state`'s edges, so anticipation starts from there.
BeliefTree anticipation_root(const KnowledgeState& state);

/// delta (k1 P(A^B) + k2 P(B^A) - C).
struct JointConstraint {
  Multiplier delta = Multiplier::unknown("delta", "δ");
  double k1 = 1.0;
  double k2 = 1.0;
  std::optional<double> target;  // C; computed from the tree when absent
  PropositionPair pair;
};

struct JointProblem {
  BeliefTree tree;
  int depth = 2;
  JointConstraint joint;
  ProbabilityAssignment assignment{AssignmentMode::Normalized};
  std::optional<double> mu_ab = 1.0;  // entropy multiplier of P(A^B); absent = no entropy term
  std::optional<double> mu_ba = 1.0;
};

/// The Ignorance of the two joint slots: the joint constraint plus their
/// entropy terms. Slots are named "P(A∩B|ctx)" and "P(B∩A|ctx)".
IgnoranceFunctional joint_functional(const JointProblem& problem, double target);

struct BayesSection {
  PropositionPair pair;
  double tree_ab = 0.0;  // ordered path sums under the assignment
  double tree_ba = 0.0;
  double target = 0.0;
  double k1 = 1.0, k2 = 1.0, mu_ab = 1.0, mu_ba = 1.0;
  std::optional<double> delta;
  std::optional<double> stationary_ab;
  std::optional<double> stationary_ba;
  bool equalized = false;
  double residual = 0.0;  // stationary residual when equalized, tree residual otherwise
  bool consistent = false;
};

struct PermutationTerm {
  std::vector<std::string> pattern;  // e.g. {"~", "E1", "E2"}
  double value = 0.0;
};

struct PermutationExpansion {
  PropositionPair pair;
  std::vector<PermutationTerm> first_before_second;  // [R,A,B], [A,R,B], [A,B,R]
  std::vector<PermutationTerm> second_before_first;  // [R,B,A], [B,R,A], [B,A,R]
  std::vector<bool> equalities;                      // term i of each order agree
  double sum_first = 0.0;
  double sum_second = 0.0;
};

struct ExpectationSection {
  double k = 0.0, beta = 0.0, mu = 1.0;
  int x = 0;
  SlotId favored;
  double favored_value = 0.0;
  double other_value = 0.0;
  double ratio = 0.0;       // other / favored
  double remainder = 0.0;   // mu [e^(k(1-beta)) + x e^(-k beta) - 1]
  double evaluated = 0.0;   // H at the stationary point
  double sigma = 0.0;       // memory part of the same
  double gap = 0.0;         // x + e^k - e^(k beta)
};

struct AnticipationReport {
  std::map<SlotId, double> values;
  std::vector<SlotId> over_unity;
  std::optional<BayesSection> bayes;
  std::optional<PermutationExpansion> permutations;
  std::optional<ExpectationSection> expectation;
  std::optional<InfeasibilityReport> infeasibility;
};

/// Stationary Bayes check. With `equalize`, mu_ba := mu_ab and k2 := k1, the
/// multiplier delta is solved so the joint constraint holds, and the residual
/// is |P(A^B) - P(B^A)| at the stationary point. Without it the residual is
/// the raw difference of the ordered path sums.
AnticipationReport bayes_consistency(const JointProblem& problem, bool equalize);

/// The six depth-3 orderings of the pair and one residual step.
PermutationExpansion permutation_expansion(const BeliefTree& tree, const PropositionPair& pair,
                                           int depth, const ProbabilityAssignment& a,
                                           double tolerance = 1e-12);

/// Closed-form credence expectations for the functional built from `setup`.
/// With `enforce_normalization` the solver also tries to make the stationary
/// values sum to 1 and reports why it cannot.
AnticipationReport expectation_report(const CredenceSetup& setup, bool enforce_normalization = false);
AnticipationReport expectation_report(double k, double beta, int x, double mu = 1.0,
                                      bool enforce_normalization = false);

json to_json(const AnticipationReport& r);
json to_json(const PermutationExpansion& p);

}  // namespace ignorance
