#include "ignorance/functional.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ignorance/error.hpp"

namespace ignorance {

Multiplier Multiplier::fixed(std::string id, std::string symbol, double value) {
  return {std::move(id), std::move(symbol), value, std::nullopt};
}

Multiplier Multiplier::tied(std::string id, std::string symbol, std::string target, double scale) {
  return {std::move(id), std::move(symbol), std::nullopt, Tie{std::move(target), scale}};
}

Multiplier Multiplier::unknown(std::string id, std::string symbol) {
  return {std::move(id), std::move(symbol), std::nullopt, std::nullopt};
}

double LinearConstraint::coefficient(const SlotId& slot) const {
  double c = 0.0;
  for (const auto& t : coefficients)
    if (t.slot == slot) c += t.coefficient;
  return c;
}

bool LinearConstraint::references(const SlotId& slot) const {
  return std::any_of(coefficients.begin(), coefficients.end(),
                     [&](const LinearTerm& t) { return t.slot == slot; });
}

double LinearConstraint::value(const ProbabilityAssignment& a) const {
  double v = offset;
  for (const auto& t : coefficients) v += t.coefficient * a.at(t.slot);
  return v;
}

LinearConstraint knowledge_constraint(Multiplier m, SlotId slot) {
  return {std::move(m), {{std::move(slot), 1.0}}, -1.0, ConstraintKind::Knowledge};
}

LinearConstraint normalization_constraint(Multiplier m, std::span<const SlotId> slots) {
  if (slots.empty()) reject(ErrorCode::Precondition, "normalization needs at least one slot");
  LinearConstraint c{std::move(m), {}, -1.0, ConstraintKind::Normalization};
  for (const auto& s : slots) c.coefficients.push_back({s, 1.0});
  return c;
}

LinearConstraint credence_constraint(Multiplier m, const SlotId& favored,
                                     std::span<const SlotId> others, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    reject(ErrorCode::InvalidArgument, fmt::format("credence level {} outside [0,1]", beta));
  LinearConstraint c{std::move(m), {{favored, 1.0 - beta}}, 0.0, ConstraintKind::Credence};
  for (const auto& s : others) {
    if (s == favored) reject(ErrorCode::InvalidArgument, "favored slot listed among the others");
    c.coefficients.push_back({s, -beta});
  }
  return c;
}

LinearConstraint joint_constraint(Multiplier m, const SlotId& ab, const SlotId& ba, double k1,
                                  double k2, double target) {
  return {std::move(m), {{ab, k1}, {ba, k2}}, -target, ConstraintKind::Joint};
}

LinearConstraint doubt_constraint(Multiplier m, SlotId slot, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    reject(ErrorCode::InvalidArgument, fmt::format("doubt level {} outside [0,1]", beta));
  return {std::move(m), {{std::move(slot), 1.0}}, -beta, ConstraintKind::Doubt};
}

double entropy_density(double p) {
  if (p == 0.0) return 0.0;
  return -p * std::log(p);
}

// ---------------------------------------------------------------------------

const Multiplier* IgnoranceFunctional::find_multiplier(const std::string& id) const {
  for (const auto& c : constraints)
    if (c.multiplier.id == id) return &c.multiplier;
  for (const auto& c : memory)
    if (c.multiplier.id == id) return &c.multiplier;
  for (const auto& e : entropies)
    if (e.multiplier.id == id) return &e.multiplier;
  return nullptr;
}

double IgnoranceFunctional::resolve(const Multiplier& m) const {
  const Multiplier* cur = &m;
  double scale = 1.0;
  for (std::size_t hops = 0; hops <= constraints.size() + memory.size() + entropies.size(); ++hops) {
    if (cur->value) return scale * *cur->value;
    if (!cur->tie)
      reject(ErrorCode::Precondition, fmt::format("multiplier '{}' has no value", cur->id));
    scale *= cur->tie->scale;
    const Multiplier* next = find_multiplier(cur->tie->target);
    if (!next)
      reject(ErrorCode::Unregistered,
             fmt::format("multiplier '{}' is tied to unknown '{}'", cur->id, cur->tie->target));
    cur = next;
  }
  reject(ErrorCode::Precondition, fmt::format("multiplier '{}' is tied in a cycle", m.id));
}

double IgnoranceFunctional::resolve(const std::string& id) const {
  const Multiplier* m = find_multiplier(id);
  if (!m) reject(ErrorCode::Unregistered, fmt::format("unknown multiplier '{}'", id));
  return resolve(*m);
}

const EntropyTerm* IgnoranceFunctional::entropy_for(const SlotId& slot) const {
  for (const auto& e : entropies)
    if (e.slot == slot) return &e;
  return nullptr;
}

std::set<SlotId> IgnoranceFunctional::slots() const {
  std::set<SlotId> out;
  for (const auto* list : {&constraints, &memory})
    for (const auto& c : *list)
      for (const auto& t : c.coefficients) out.insert(t.slot);
  for (const auto& e : entropies) out.insert(e.slot);
  return out;
}

void IgnoranceFunctional::check_invariants() const {
  std::set<std::string> ids;
  auto claim = [&](const Multiplier& m) {
    if (!ids.insert(m.id).second)
      reject(ErrorCode::Duplicate, fmt::format("multiplier '{}' is owned by more than one term", m.id));
  };
  for (const auto& c : constraints) claim(c.multiplier);
  for (const auto& c : memory) claim(c.multiplier);
  std::set<SlotId> entropy_slots;
  for (const auto& e : entropies) {
    claim(e.multiplier);
    if (!entropy_slots.insert(e.slot).second)
      reject(ErrorCode::Duplicate, fmt::format("slot {} has two entropy terms", e.slot.name));
    bool constrained = std::any_of(constraints.begin(), constraints.end(),
                                   [&](const LinearConstraint& c) { return c.references(e.slot); });
    if (!constrained && !no_knowledge.count(e.slot))
      reject(ErrorCode::Precondition,
             fmt::format("entropy slot {} has no constraint and is not flagged no-knowledge",
                         e.slot.name));
  }
  for (const auto& c : constraints)
    if (c.kind == ConstraintKind::Knowledge && (c.coefficients.size() != 1 ||
                                                c.coefficients[0].coefficient != 1.0 || c.offset != -1.0))
      reject(ErrorCode::Precondition, fmt::format("knowledge constraint '{}' is not of the form P-1",
                                                  c.multiplier.id));
}

IgnoranceFunctional IgnoranceFunctional::with_multiplier(const std::string& id, double value) const {
  return with_multipliers({{id, value}});
}

IgnoranceFunctional IgnoranceFunctional::with_multipliers(
    const std::map<std::string, double>& values) const {
  IgnoranceFunctional out = *this;
  std::set<std::string> hit;
  auto apply = [&](Multiplier& m) {
    auto it = values.find(m.id);
    if (it == values.end()) return;
    m.value = it->second;
    m.tie.reset();
    hit.insert(m.id);
  };
  for (auto& c : out.constraints) apply(c.multiplier);
  for (auto& c : out.memory) apply(c.multiplier);
  for (auto& e : out.entropies) apply(e.multiplier);
  for (const auto& [id, v] : values)
    if (!hit.count(id)) reject(ErrorCode::Unregistered, fmt::format("unknown multiplier '{}'", id));
  return out;
}

double IgnoranceFunctional::sigma(const ProbabilityAssignment& a) const {
  double s = 0.0;
  for (const auto& c : memory) {
    double m = resolve(c.multiplier);
    if (m != 0.0) s += m * c.value(a);
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

double checked_value(const ProbabilityAssignment& a, const SlotId& slot) {
  double p = a.at(slot);
  if (p < 0.0 || std::isnan(p))
    reject(ErrorCode::NegativeProbability, fmt::format("{} = {} is negative", slot.name, p));
  if (a.mode() == AssignmentMode::Normalized && p > 1.0)
    reject(ErrorCode::InvalidArgument,
           fmt::format("{} = {} exceeds 1 in a normalized assignment", slot.name, p));
  return p;
}

double constraint_sum(const IgnoranceFunctional& h, const std::vector<LinearConstraint>& list,
                      const ProbabilityAssignment& a) {
  double s = 0.0;
  for (const auto& c : list) {
    double m = h.resolve(c.multiplier);
    if (m == 0.0) continue;  // a forgotten term contributes nothing
    double v = c.offset;
    for (const auto& t : c.coefficients) v += t.coefficient * checked_value(a, t.slot);
    s += m * v;
  }
  return s;
}

}  // namespace

double evaluate(const IgnoranceFunctional& h, const ProbabilityAssignment& a) {
  double total = constraint_sum(h, h.constraints, a) + constraint_sum(h, h.memory, a);
  for (const auto& e : h.entropies) {
    double lambda = h.resolve(e.multiplier);
    if (lambda == 0.0) continue;
    total += lambda * entropy_density(checked_value(a, e.slot));
  }
  return total;
}

double GradientExpression::at(double p) const {
  if (!lambda || *lambda == 0.0) return linear;
  if (p <= 0.0)
    reject(ErrorCode::LogSingularity,
           fmt::format("dH/d{} is singular at p = 0; take the limit instead", slot.name));
  return linear - *lambda * (std::log(p) + 1.0);
}

std::optional<double> GradientExpression::root() const {
  if (!lambda || *lambda == 0.0) return std::nullopt;
  return std::exp(linear / *lambda - 1.0);
}

GradientExpression grad_probability(const IgnoranceFunctional& h, const SlotId& slot) {
  if (!h.slots().count(slot))
    reject(ErrorCode::Unregistered, fmt::format("{} is not referenced by the functional", slot.name));
  GradientExpression g{slot, 0.0, std::nullopt};
  for (const auto* list : {&h.constraints, &h.memory})
    for (const auto& c : *list) {
      double coef = c.coefficient(slot);
      if (coef != 0.0) g.linear += h.resolve(c.multiplier) * coef;
    }
  if (const auto* e = h.entropy_for(slot)) g.lambda = h.resolve(e->multiplier);
  return g;
}

double grad_probability(const IgnoranceFunctional& h, const SlotId& slot,
                        const ProbabilityAssignment& a) {
  return grad_probability(h, slot).at(checked_value(a, slot));
}

double grad_multiplier(const IgnoranceFunctional& h, const std::string& multiplier_id,
                       const ProbabilityAssignment& a) {
  for (const auto* list : {&h.constraints, &h.memory})
    for (const auto& c : *list)
      if (c.multiplier.id == multiplier_id) return c.value(a);
  for (const auto& e : h.entropies)
    if (e.multiplier.id == multiplier_id) return entropy_density(checked_value(a, e.slot));
  reject(ErrorCode::Unregistered, fmt::format("unknown multiplier '{}'", multiplier_id));
}

// ---------------------------------------------------------------------------

StationaryResult stationary_assignment(const IgnoranceFunctional& input,
                                       const std::map<std::string, double>& overrides) {
  const IgnoranceFunctional h = overrides.empty() ? input : input.with_multipliers(overrides);
  StationaryResult out;
  for (const auto& slot : h.slots()) {
    auto grad = grad_probability(h, slot);
    if (grad.lambda) {
      if (*grad.lambda == 0.0) {
        out.no_ignorance.push_back(slot);
        continue;
      }
      double p = *grad.root();
      out.assignment.set(slot, p);
      if (p > 1.0) out.over_unity.push_back(slot);
      continue;
    }
    // No entropy term: a single-slot constraint pins the slot through dH/dmu = 0.
    std::optional<double> pinned;
    for (const auto* list : {&h.constraints, &h.memory}) {
      for (const auto& c : *list) {
        if (c.coefficients.size() != 1 || !(c.coefficients[0].slot == slot)) continue;
        if (h.resolve(c.multiplier) == 0.0) continue;
        pinned = -c.offset / c.coefficients[0].coefficient;
        break;
      }
      if (pinned) break;
    }
    if (pinned) {
      out.assignment.set(slot, *pinned);
      out.fixed_by_constraint.push_back(slot);
    } else {
      out.undetermined.push_back(slot);
    }
  }
  return out;
}

NoKnowledgeReport no_knowledge_analysis(const IgnoranceFunctional& h) {
  if (!h.constraints.empty() || !h.memory.empty())
    reject(ErrorCode::Precondition, "no-knowledge analysis needs a functional without constraints");
  NoKnowledgeReport report;
  double lambda_sum = 0.0;
  for (const auto& e : h.entropies) {
    double lambda = h.resolve(e.multiplier);
    NoKnowledgeSlot s{e.slot, lambda, lambda == 0.0, std::nullopt};
    if (lambda != 0.0) s.stationary = std::exp(-1.0);
    lambda_sum += lambda;
    report.slots.push_back(std::move(s));
  }
  report.fundamental = std::exp(-1.0) * lambda_sum;
  return report;
}

double constraint_exponent_check(int n, std::span<const double> p, double tolerance) {
  if (n < 2) reject(ErrorCode::Precondition, fmt::format("exponent must be >= 2 (got {})", n));
  if (p.empty()) reject(ErrorCode::Precondition, "no probabilities given");
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) reject(ErrorCode::NegativeProbability, fmt::format("probability {} < 0", v));
    sum += v;
  }
  double residual = 1.0 - sum;
  if (std::abs(residual) > tolerance)
    reject(ErrorCode::Precondition,
           fmt::format("point is off the constraint surface (1 - sum p = {})", residual));
  residual = 0.0;
  // d/dp_i (1 - sum p)^n = -n (1 - sum p)^(n-1), identical for every i.
  return std::abs(-static_cast<double>(n) * std::pow(residual, n - 1));
}

std::vector<ProbabilityAssignment> collapse_assignments(const IgnoranceFunctional& h) {
  const LinearConstraint* norm = nullptr;
  for (const auto& c : h.constraints)
    if (c.kind == ConstraintKind::Normalization && h.resolve(c.multiplier) != 0.0) norm = &c;
  if (!norm) reject(ErrorCode::Precondition, "no active normalization constraint");

  auto stationary = stationary_assignment(h);
  std::vector<ProbabilityAssignment> out;
  for (const auto& chosen : norm->coefficients) {
    ProbabilityAssignment a(AssignmentMode::Normalized);
    for (const auto& slot : stationary.fixed_by_constraint)
      a.set(slot, stationary.assignment.at(slot));
    for (const auto& t : norm->coefficients) a.set(t.slot, t.slot == chosen.slot ? 1.0 : 0.0);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace ignorance
