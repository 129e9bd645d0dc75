#include "ignorance/anticipation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "ignorance/error.hpp"

namespace ignorance {

namespace {

using EdgeVisitor = std::function<void(const std::vector<std::string>& prefix, const std::vector<Edge>& edges)>;

// Depth-first walk over every node of the anticipation tree above `depth`.
void visit_nodes(const BeliefTree& tree, int depth, const EdgeVisitor& visit) {
  std::vector<Proposition> frontier;
  for (const auto& e : tree.root().children)
    if (!e.proposition.is_residual()) frontier.push_back(e.proposition);
  const std::string ctx = tree.root().context;
  std::vector<std::string> prefix;

  std::function<void(std::optional<std::size_t>)> walk = [&](std::optional<std::size_t> state) {
    if (static_cast<int>(prefix.size()) == depth) return;
    std::vector<Edge> edges = state && tree.state(*state).expanded()
                                  ? tree.state(*state).children
                                  : anticipation_children(frontier, prefix, ctx);
    visit(prefix, edges);
    for (const auto& e : edges) {
      prefix.push_back(e.proposition.id);
      walk(e.next);
      prefix.pop_back();
    }
  };
  walk(tree.root().index);
}

std::string pattern_key(const Path& p) {
  std::string out;
  for (const auto& s : p.steps) {
    if (!out.empty()) out += ',';
    out += s.kind == PropositionKind::Residual ? std::string("~") : s.proposition;
  }
  return out;
}

SlotId joint_slot(const std::string& a, const std::string& b, const std::string& ctx) {
  return SlotId{fmt::format("P({}∩{}|{})", a, b, ctx)};
}

}  // namespace

double joint_probability(const BeliefTree& tree, const PropositionPair& order, int depth,
                         const ProbabilityAssignment& a) {
  if (depth < 2) reject(ErrorCode::Precondition, fmt::format("joint probabilities need depth >= 2 (got {})", depth));
  double total = 0.0;
  for (const auto& path : enumerate_joint_paths(tree, order, depth)) {
    auto sig = path.signature();
    auto first = std::find(sig.begin(), sig.end(), order.first);
    auto second = std::find(sig.begin(), sig.end(), order.second);
    if (first < second) total += path_probability(path, a);
  }
  return total;
}

ProbabilityAssignment anticipation_assignment(const BeliefTree& tree, int depth,
                                              std::span<const EdgeOverride> overrides) {
  if (depth < 1) reject(ErrorCode::Precondition, fmt::format("depth must be >= 1 (got {})", depth));
  ProbabilityAssignment a(AssignmentMode::Normalized);
  std::vector<bool> used(overrides.size(), false);
  visit_nodes(tree, depth, [&](const std::vector<std::string>& prefix, const std::vector<Edge>& edges) {
    for (const auto& e : edges)
      if (!e.probability.is_fixed())
        a.set(e.probability.variable(), 1.0 / static_cast<double>(edges.size()));
    for (std::size_t i = 0; i < overrides.size(); ++i) {
      const auto& o = overrides[i];
      if (o.after != prefix) continue;
      used[i] = true;
      for (const auto& [id, _] : o.probabilities)
        if (std::none_of(edges.begin(), edges.end(), [&](const Edge& e) { return e.proposition.id == id; }))
          reject(ErrorCode::Unregistered, fmt::format("no edge '{}' below the overridden node", id));
      for (const auto& e : edges) {
        if (e.probability.is_fixed()) continue;
        auto it = o.probabilities.find(e.proposition.id);
        if (it != o.probabilities.end())
          a.set(e.probability.variable(), it->second);
        else if (o.rest)
          a.set(e.probability.variable(), *o.rest);
      }
    }
  });
  for (std::size_t i = 0; i < overrides.size(); ++i)
    if (!used[i]) {
      std::string where;
      for (const auto& id : overrides[i].after) where += (where.empty() ? "" : ",") + id;
      reject(ErrorCode::Unregistered, fmt::format("override path [{}] is not a node above depth {}", where, depth));
    }
  return a;
}

BeliefTree anticipation_root(const KnowledgeState& state) {
  if (!state.expanded()) reject(ErrorCode::Precondition, "the state has no frontier to anticipate from");
  BeliefTree tree;
  std::vector<Edge> edges = state.children;
  for (auto& e : edges) e.next.reset();
  tree.set_children(0, std::move(edges), state.context);
  return tree;
}

IgnoranceFunctional joint_functional(const JointProblem& problem, double target) {
  const auto& [a, b] = problem.joint.pair;
  const std::string ctx = problem.tree.root().context;
  const SlotId ab = joint_slot(a, b, ctx), ba = joint_slot(b, a, ctx);
  IgnoranceFunctional h;
  h.constraints.push_back(joint_constraint(problem.joint.delta, ab, ba, problem.joint.k1, problem.joint.k2, target));
  if (problem.mu_ab) h.entropies.push_back({Multiplier::fixed("mu:ab", "μ_1", *problem.mu_ab), ab});
  if (problem.mu_ba) h.entropies.push_back({Multiplier::fixed("mu:ba", "μ_2", *problem.mu_ba), ba});
  h.check_invariants();
  return h;
}

AnticipationReport bayes_consistency(const JointProblem& input, bool equalize) {
  if (!input.mu_ab || !input.mu_ba)
    reject(ErrorCode::Precondition, "both joint slots need an entropy term");
  JointProblem problem = input;
  if (equalize) {
    problem.mu_ba = problem.mu_ab;
    problem.joint.k2 = problem.joint.k1;
  }
  const auto& pair = problem.joint.pair;

  BayesSection bayes;
  bayes.pair = pair;
  bayes.tree_ab = joint_probability(problem.tree, pair, problem.depth, problem.assignment);
  bayes.tree_ba = joint_probability(problem.tree, {pair.second, pair.first}, problem.depth, problem.assignment);
  bayes.k1 = problem.joint.k1;
  bayes.k2 = problem.joint.k2;
  bayes.mu_ab = *problem.mu_ab;
  bayes.mu_ba = *problem.mu_ba;
  bayes.equalized = equalize;
  bayes.target = problem.joint.target.value_or(bayes.k1 * bayes.tree_ab + bayes.k2 * bayes.tree_ba);

  AnticipationReport report;
  IgnoranceFunctional h = joint_functional(problem, bayes.target);
  const std::string ctx = problem.tree.root().context;
  const SlotId ab = joint_slot(pair.first, pair.second, ctx), ba = joint_slot(pair.second, pair.first, ctx);

  std::optional<double> delta = problem.joint.delta.value;
  if (!delta && bayes.target > 0.0) {
    const std::string id = problem.joint.delta.id;
    auto solved = solve_multipliers(h, std::span<const std::string>(&id, 1));
    if (solved.ok())
      delta = solved.multipliers.at(id);
    else
      report.infeasibility = solved.infeasible;
  }
  if (delta) {
    auto st = stationary_assignment(h, {{problem.joint.delta.id, *delta}});
    bayes.delta = delta;
    bayes.stationary_ab = st.assignment.at(ab);
    bayes.stationary_ba = st.assignment.at(ba);
    report.values = st.assignment.values();
    report.over_unity = st.over_unity;
  } else if (bayes.target <= 0.0) {
    // C = 0 only as the limit delta -> -inf, where both joints vanish.
    bayes.stationary_ab = 0.0;
    bayes.stationary_ba = 0.0;
  }

  if (equalize && bayes.stationary_ab && bayes.stationary_ba)
    bayes.residual = std::abs(*bayes.stationary_ab - *bayes.stationary_ba);
  else
    bayes.residual = std::abs(bayes.tree_ab - bayes.tree_ba);
  bayes.consistent = bayes.residual <= 1e-10;
  report.bayes = std::move(bayes);
  return report;
}

PermutationExpansion permutation_expansion(const BeliefTree& tree, const PropositionPair& pair, int depth,
                                           const ProbabilityAssignment& a, double tolerance) {
  if (depth != 3) reject(ErrorCode::Precondition, fmt::format("the expansion is defined at depth 3 (got {})", depth));
  std::map<std::string, double> sums;
  for (const auto& path : enumerate_joint_paths(tree, pair, depth)) sums[pattern_key(path)] += path_probability(path, a);

  const auto& [x, y] = pair;
  auto term = [&](std::vector<std::string> pattern) {
    std::string key;
    for (const auto& s : pattern) key += (key.empty() ? "" : ",") + s;
    return PermutationTerm{std::move(pattern), sums.count(key) ? sums.at(key) : 0.0};
  };
  PermutationExpansion out;
  out.pair = pair;
  out.first_before_second = {term({"~", x, y}), term({x, "~", y}), term({x, y, "~"})};
  out.second_before_first = {term({"~", y, x}), term({y, "~", x}), term({y, x, "~"})};
  for (std::size_t i = 0; i < 3; ++i) {
    out.sum_first += out.first_before_second[i].value;
    out.sum_second += out.second_before_first[i].value;
    out.equalities.push_back(std::abs(out.first_before_second[i].value - out.second_before_first[i].value) <=
                             tolerance);
  }
  return out;
}

AnticipationReport expectation_report(const CredenceSetup& setup, bool enforce_normalization) {
  if (setup.x <= 0) reject(ErrorCode::InvalidArgument, fmt::format("x must be positive (got {})", setup.x));
  const IgnoranceFunctional h = credence_functional(setup);
  const auto st = stationary_assignment(h);

  ProbabilityAssignment full = st.assignment;
  const auto remembered = setup.memory_values.values();
  for (const auto& [slot, v] : remembered)
    if (!h.entropy_for(slot)) full.set(slot, v);

  ExpectationSection e;
  e.k = setup.k;
  e.beta = setup.beta;
  e.mu = setup.mu;
  e.x = setup.x;
  e.favored = credence_favored_slot(setup);
  e.favored_value = st.assignment.at(e.favored);
  e.other_value = st.assignment.at(credence_other_slots(setup).front());
  e.ratio = e.other_value / e.favored_value;
  e.remainder = credence_remainder(setup.k, setup.beta, setup.x, setup.mu);
  e.sigma = h.sigma(full);
  e.evaluated = evaluate(h, full);
  e.gap = credence_gap(setup.k, setup.beta, setup.x);

  AnticipationReport report;
  report.values = st.assignment.values();
  report.over_unity = st.over_unity;
  report.expectation = e;

  if (enforce_normalization) {
    IgnoranceFunctional free = h;
    for (auto& c : free.constraints)
      if (c.multiplier.id == "mu") c.multiplier.value.reset();
    const std::string id = "mu";
    auto solved = solve_multipliers(free, std::span<const std::string>(&id, 1));
    if (!solved.ok()) report.infeasibility = solved.infeasible;
  }
  return report;
}

AnticipationReport expectation_report(double k, double beta, int x, double mu, bool enforce_normalization) {
  CredenceSetup setup;
  setup.k = k;
  setup.beta = beta;
  setup.x = x;
  setup.mu = mu;
  return expectation_report(setup, enforce_normalization);
}

// ---------------------------------------------------------------------------

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json infeasibility_json(const InfeasibilityReport& r) {
  json residuals = json::array();
  for (const auto& [id, v] : r.residuals) residuals.push_back({{"constraint", id}, {"residual", v}});
  return {{"reason", r.reason}, {"residuals", std::move(residuals)}, {"multipliers", r.multipliers},
          {"iterations", r.iterations}};
}

}  // namespace

json to_json(const PermutationExpansion& p) {
  auto terms = [](const std::vector<PermutationTerm>& list) {
    json out = json::array();
    for (const auto& t : list) out.push_back({{"pattern", t.pattern}, {"value", t.value}});
    return out;
  };
  return {{"pair", {p.pair.first, p.pair.second}},
          {"first_before_second", terms(p.first_before_second)},
          {"second_before_first", terms(p.second_before_first)},
          {"equalities", p.equalities},
          {"sum_first", p.sum_first},
          {"sum_second", p.sum_second}};
}

json to_json(const AnticipationReport& r) {
  json values = json::object();
  for (const auto& [slot, v] : r.values) values[slot.name] = v;
  json flagged = json::array();
  for (const auto& s : r.over_unity) flagged.push_back(s.name);
  json out{{"values", std::move(values)}, {"over_unity", std::move(flagged)}};
  if (r.bayes) {
    const auto& b = *r.bayes;
    out["bayes"] = {{"pair", {b.pair.first, b.pair.second}},
                    {"tree_ab", b.tree_ab},
                    {"tree_ba", b.tree_ba},
                    {"target", b.target},
                    {"k1", b.k1},
                    {"k2", b.k2},
                    {"mu_ab", b.mu_ab},
                    {"mu_ba", b.mu_ba},
                    {"delta", optional_number(b.delta)},
                    {"stationary_ab", optional_number(b.stationary_ab)},
                    {"stationary_ba", optional_number(b.stationary_ba)},
                    {"equalized", b.equalized},
                    {"residual", b.residual},
                    {"consistent", b.consistent}};
  }
  if (r.permutations) out["permutations"] = to_json(*r.permutations);
  if (r.expectation) {
    const auto& e = *r.expectation;
    out["expectation"] = {{"k", e.k},
                          {"beta", e.beta},
                          {"x", e.x},
                          {"mu", e.mu},
                          {"favored", e.favored.name},
                          {"favored_value", e.favored_value},
                          {"other_value", e.other_value},
                          {"ratio", e.ratio},
                          {"remainder", e.remainder},
                          {"evaluated", e.evaluated},
                          {"sigma", e.sigma},
                          {"gap", e.gap}};
  }
  if (r.infeasibility) out["infeasibility"] = infeasibility_json(*r.infeasibility);
  return out;
}

}  // namespace ignorance
