#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ignorance/assignment.hpp"
#include "json.hpp"

namespace ignorance {

using json = nlohmann::json;

/// A Lagrange multiplier. Its value is either fixed, unknown (to be solved
/// for), or tied to another multiplier of the same functional as
/// `scale * value(target)`, which expresses conventions such as lambda = mu or
/// alpha = k mu.
struct Multiplier {
  struct Tie {
    std::string target;
    double scale = 1.0;
    friend bool operator==(const Tie&, const Tie&) = default;
  };

  std::string id;
  std::string symbol;
  std::optional<double> value;
  std::optional<Tie> tie;

  static Multiplier fixed(std::string id, std::string symbol, double value);
  static Multiplier tied(std::string id, std::string symbol, std::string target, double scale);
  static Multiplier unknown(std::string id, std::string symbol);

  friend bool operator==(const Multiplier&, const Multiplier&) = default;
};

enum class ConstraintKind { Knowledge, Normalization, Credence, Joint, Souvenir, Doubt };

struct LinearTerm {
  SlotId slot;
  double coefficient = 0.0;
  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

/// multiplier * (sum_i c_i p_i + offset)
struct LinearConstraint {
  Multiplier multiplier;
  std::vector<LinearTerm> coefficients;
  double offset = 0.0;
  ConstraintKind kind = ConstraintKind::Knowledge;

  double coefficient(const SlotId& slot) const;
  bool references(const SlotId& slot) const;
  /// The affine expression, without the multiplier.
  double value(const ProbabilityAssignment& a) const;

  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

/// P(E) - 1
LinearConstraint knowledge_constraint(Multiplier m, SlotId slot);
/// sum_i p_i - 1
LinearConstraint normalization_constraint(Multiplier m, std::span<const SlotId> slots);
/// (1 - beta) p_favored - beta * sum(others)
LinearConstraint credence_constraint(Multiplier m, const SlotId& favored,
                                     std::span<const SlotId> others, double beta);
/// k1 P(A^B) + k2 P(B^A) - C
LinearConstraint joint_constraint(Multiplier m, const SlotId& ab, const SlotId& ba, double k1,
                                  double k2, double target);
/// P(E) - beta, the trace left by a lost certainty.
LinearConstraint doubt_constraint(Multiplier m, SlotId slot, double beta);

/// -lambda p ln p
struct EntropyTerm {
  Multiplier multiplier;
  SlotId slot;
  friend bool operator==(const EntropyTerm&, const EntropyTerm&) = default;
};

/// -p ln p with 0 ln 0 = 0.
double entropy_density(double p);

/// H = sum(constraints) + sum(memory) + sum(entropy terms).
///
/// `memory` holds the frozen souvenir constraints (the aggregate usually
/// written as Sigma). Slots flagged in `no_knowledge` may carry an entropy
/// term without any constraint.
struct IgnoranceFunctional {
  std::vector<LinearConstraint> constraints;
  std::vector<EntropyTerm> entropies;
  std::vector<LinearConstraint> memory;
  std::set<SlotId> no_knowledge;

  const Multiplier* find_multiplier(const std::string& id) const;
  /// Resolves fixed and tied values; rejects unknown or cyclic multipliers.
  double resolve(const Multiplier& m) const;
  double resolve(const std::string& id) const;
  const EntropyTerm* entropy_for(const SlotId& slot) const;
  /// Every slot referenced by a constraint, memory entry or entropy term.
  std::set<SlotId> slots() const;
  /// Rejects entropy slots with no constraint unless flagged no-knowledge, and
  /// multipliers shared between terms.
  void check_invariants() const;

  /// Copy with multiplier `id` fixed to `value` (any tie is dropped).
  IgnoranceFunctional with_multiplier(const std::string& id, double value) const;
  IgnoranceFunctional with_multipliers(const std::map<std::string, double>& values) const;

  /// Sum over memory only.
  double sigma(const ProbabilityAssignment& a) const;

  friend bool operator==(const IgnoranceFunctional&, const IgnoranceFunctional&) = default;
};

// ---------------------------------------------------------------------------
// Evaluation and derivatives

double evaluate(const IgnoranceFunctional& h, const ProbabilityAssignment& a);

/// dH/dp for one slot, as an expression in p:
///   linear - lambda * (ln p + 1)
/// where `linear` sums multiplier * coefficient over all constraints.
struct GradientExpression {
  SlotId slot;
  double linear = 0.0;
  std::optional<double> lambda;  // absent when the slot has no entropy term

  double at(double p) const;
  /// exp(linear / lambda - 1), or nothing when lambda is absent or zero.
  std::optional<double> root() const;
};

GradientExpression grad_probability(const IgnoranceFunctional& h, const SlotId& slot);
/// Numeric dH/dp at the assignment's value of `slot`. Rejects with
/// ErrorCode::LogSingularity when p = 0 and the slot has an entropy term.
double grad_probability(const IgnoranceFunctional& h, const SlotId& slot,
                        const ProbabilityAssignment& a);
/// dH/dm: the constraint's affine value, or -p ln p for an entropy multiplier.
double grad_multiplier(const IgnoranceFunctional& h, const std::string& multiplier_id,
                       const ProbabilityAssignment& a);

// ---------------------------------------------------------------------------
// Stationarity

struct StationaryResult {
  ProbabilityAssignment assignment{AssignmentMode::Anticipation};
  std::vector<SlotId> no_ignorance;          // lambda = 0, left unsolved
  std::vector<SlotId> fixed_by_constraint;   // no entropy term; dH/dmu = 0 fixes them
  std::vector<SlotId> undetermined;          // neither
  std::vector<SlotId> over_unity;
};

/// Closed-form stationary point with every multiplier fixed:
///   p_i = exp((sum_c m_c c_i) / lambda_i - 1).
/// `overrides` fixes multipliers by id before solving.
StationaryResult stationary_assignment(const IgnoranceFunctional& h,
                                       const std::map<std::string, double>& overrides = {});

struct SolverOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
};

struct InfeasibilityReport {
  std::string reason;
  std::vector<std::pair<std::string, double>> residuals;  // constraint multiplier id -> residual
  std::map<std::string, double> multipliers;               // best values reached
  int iterations = 0;
};

struct SolveResult {
  std::map<std::string, double> multipliers;
  std::vector<std::pair<std::string, double>> residuals;
  int iterations = 0;
  std::optional<InfeasibilityReport> infeasible;

  bool ok() const { return !infeasible.has_value(); }
};

/// Finds values for the multipliers of the constraints named in `enforce`
/// (by multiplier id) such that the stationary assignment satisfies each of
/// them. Damped Newton with a per-multiplier bisection fallback; all unknowns
/// start at 1.
SolveResult solve_multipliers(const IgnoranceFunctional& h, std::span<const std::string> enforce,
                              const SolverOptions& options = {});

struct NoKnowledgeSlot {
  SlotId slot;
  double lambda = 0.0;
  bool no_ignorance = false;          // lambda = 0: H does not depend on p at all
  std::optional<double> stationary;   // e^-1 otherwise
};

struct NoKnowledgeReport {
  std::vector<NoKnowledgeSlot> slots;
  double fundamental = 0.0;  // e^-1 * sum(lambda)
};

/// Stationary analysis of a functional with no constraints.
NoKnowledgeReport no_knowledge_analysis(const IgnoranceFunctional& h);

/// d/dp_i of (1 - sum p)^n on the surface sum p = 1, maximised over i. The
/// point must lie on the surface within `tolerance`; the constraint value is
/// then taken as exactly zero.
double constraint_exponent_check(int n, std::span<const double> p, double tolerance = 1e-12);

/// The 0/1 collapse: one basis assignment per slot of the active
/// normalization (that slot 1, the rest 0), with single-slot constraints held
/// at their satisfied values. The engine never picks among them.
std::vector<ProbabilityAssignment> collapse_assignments(const IgnoranceFunctional& h);

// ---------------------------------------------------------------------------
// Serialization

const char* to_string(ConstraintKind kind);
ConstraintKind constraint_kind_from_string(const std::string& s);

json to_json(const Multiplier& m);
json to_json(const LinearConstraint& c);
json to_json(const IgnoranceFunctional& h);
json to_json(const ProbabilityAssignment& a);
json to_json(const StationaryResult& r);
json to_json(const SolveResult& r);
json to_json(const NoKnowledgeReport& r);
Multiplier multiplier_from_json(const json& j);
LinearConstraint constraint_from_json(const json& j);
IgnoranceFunctional functional_from_json(const json& j);
ProbabilityAssignment assignment_from_json(const json& j);

}  // namespace ignorance
