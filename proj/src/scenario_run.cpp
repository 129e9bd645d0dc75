#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "ignorance/anticipation.hpp"
#include "ignorance/error.hpp"
#include "ignorance/oracle.hpp"
#include "ignorance/scenario.hpp"

namespace ignorance {

namespace {

// The functional at ordinal n names its slots after state n-1; reports use
// the label of the state itself.
struct Relabel {
  std::string from;
  std::string to;

  static std::string swap_suffix(const std::string& name, const std::string& a, const std::string& b) {
    for (const char sep : {'|', ','}) {
      const std::string tail = sep + a + ")";
      if (name.size() > tail.size() && name.compare(name.size() - tail.size(), tail.size(), tail) == 0)
        return name.substr(0, name.size() - tail.size()) + sep + b + ")";
    }
    return name;
  }
  SlotId operator()(const SlotId& s) const { return {swap_suffix(s.name, from, to)}; }
  SlotId back(const SlotId& s) const { return {swap_suffix(s.name, to, from)}; }

  LinearConstraint operator()(LinearConstraint c) const {
    for (auto& t : c.coefficients) t.slot = (*this)(t.slot);
    return c;
  }
};

Relabel relabel_for(const Session& s) {
  const std::string naming = s.ordinal() == 0 ? state_label(0) : state_label(s.ordinal() - 1);
  return {naming, s.label()};
}

// The current state seen under its own label, ready for anticipation.
BeliefTree anticipation_tree(const Session& s) {
  const Relabel r = relabel_for(s);
  KnowledgeState view = s.state();
  view.context = s.label();
  for (auto& e : view.children)
    if (!e.probability.is_fixed()) e.probability = ProbabilitySlot::unknown(r(e.probability.variable()), e.probability.provenance);
  return anticipation_root(view);
}

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

struct Context {
  const Session& session;
  const RunConfig& config;
  Relabel relabel;
};

template <typename T>
T param(const json& params, const char* key, T fallback) {
  return params.contains(key) ? params.at(key).get<T>() : fallback;
}

std::optional<double> nullable(const json& params, const char* key, std::optional<double> fallback) {
  if (!params.contains(key)) return fallback;
  if (params.at(key).is_null()) return std::nullopt;
  return params.at(key).get<double>();
}

PropositionPair pair_of(const json& v) { return {v.at(0).get<std::string>(), v.at(1).get<std::string>()}; }

void mismatch(OracleOutcome& o, const std::string& what) {
  o.ok = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what;
}

void compare(OracleOutcome& o, const std::string& what, double engine, double brute, double tol) {
  if (!close(engine, brute, tol)) mismatch(o, fmt::format("{}: engine {:.17g} vs oracle {:.17g}", what, engine, brute));
}

// Stationary values completed with the souvenirs' satisfied values.
ProbabilityAssignment completed_stationary(const Session& s, const StationaryResult& st) {
  ProbabilityAssignment a(AssignmentMode::Anticipation);
  const ProbabilityAssignment memory = s.memory_assignment();
  for (const auto& [slot, v] : memory.values()) a.set(slot, v);
  for (const auto& [slot, v] : st.assignment.values()) a.set(slot, v);
  return a;
}

// ---------------------------------------------------------------------------

void stationary_query(const Context& cx, QueryResult& out) {
  const auto& s = cx.session;
  const auto& h = s.functional();
  const StationaryResult st = stationary_assignment(h);

  std::set<SlotId> active;
  for (const auto& c : h.constraints)
    for (const auto& t : c.coefficients) active.insert(t.slot);
  for (const auto& e : h.entropies) active.insert(e.slot);

  auto role = [&](const SlotId& slot) -> const char* {
    auto in = [&](const std::vector<SlotId>& v) { return std::find(v.begin(), v.end(), slot) != v.end(); };
    if (in(st.no_ignorance)) return "no_ignorance";
    if (in(st.fixed_by_constraint)) return "fixed_by_constraint";
    if (in(st.undetermined)) return "undetermined";
    return "entropy";
  };

  json slots = json::array();
  for (const auto& slot : active) {
    const auto v = st.assignment.find(slot);
    slots.push_back({{"slot", cx.relabel(slot).name}, {"value", v ? json(*v) : json(nullptr)}, {"role", role(slot)}});
  }
  json memory = json::object();
  const ProbabilityAssignment recorded = s.memory_assignment();
  for (const auto& [slot, v] : recorded.values())
    if (!active.count(slot)) memory[slot.name] = v;

  json result{{"state", s.label()}, {"slots", std::move(slots)}, {"memory", std::move(memory)}};

  const LinearConstraint* norm = nullptr;
  for (const auto& c : h.constraints)
    if (c.kind == ConstraintKind::Normalization && h.resolve(c.multiplier) != 0.0) norm = &c;
  std::vector<SlotId> frontier;
  if (norm) {
    result["normalization"] = to_json(cx.relabel(*norm));
    double sum = 0.0;
    for (const auto& t : norm->coefficients) {
      frontier.push_back(t.slot);
      sum += st.assignment.at(t.slot);
    }
    result["normalization_sum"] = sum;
    if (cx.config.mode == AssignmentMode::Normalized) {
      json normalized = json::object();
      for (const auto& slot : frontier) normalized[cx.relabel(slot).name] = st.assignment.at(slot) / sum;
      result["normalized"] = std::move(normalized);
    }
  }
  json over = json::array();
  for (const auto& slot : st.over_unity) {
    over.push_back(cx.relabel(slot).name);
    if (cx.config.mode == AssignmentMode::Anticipation)
      out.warnings.push_back(fmt::format("{} = {:.17g} exceeds 1 (anticipation weight)", cx.relabel(slot).name,
                                         st.assignment.at(slot)));
  }
  result["over_unity"] = std::move(over);
  out.result = std::move(result);

  if (!cx.config.oracle) return;
  out.oracle.checked = true;
  const double tol = cx.config.tolerance;
  if (cx.config.mode == AssignmentMode::Anticipation) {
    const ProbabilityAssignment base = completed_stationary(s, st);
    for (const auto& e : h.entropies) {
      if (h.resolve(e.multiplier) == 0.0) continue;
      compare(out.oracle, cx.relabel(e.slot).name, st.assignment.at(e.slot), oracle::slot_argmax(h, e.slot, base), tol);
    }
    return;
  }
  if (frontier.empty() || frontier.size() > 3) {
    out.oracle.detail = fmt::format("simplex oracle skipped: {} frontier slots", frontier.size());
    return;
  }
  ProbabilityAssignment point = completed_stationary(s, st);
  point.set_mode(AssignmentMode::Anticipation);
  auto f = [&](const std::vector<double>& p) {
    for (std::size_t i = 0; i < frontier.size(); ++i) point.set(frontier[i], p[i]);
    return oracle::direct_evaluate(h, point);
  };
  const auto best = oracle::simplex_argmax(f, frontier.size());
  double sum = 0.0;
  for (const auto& slot : frontier) sum += st.assignment.at(slot);
  for (std::size_t i = 0; i < frontier.size(); ++i)
    compare(out.oracle, cx.relabel(frontier[i]).name, st.assignment.at(frontier[i]) / sum, best[i], tol);
}

void evaluate_query(const Context& cx, QueryResult& out) {
  const auto& s = cx.session;
  const auto& h = s.functional();
  const StationaryResult st = stationary_assignment(h);
  ProbabilityAssignment base = completed_stationary(s, st);
  const auto mode = cx.config.mode;
  if (mode == AssignmentMode::Normalized)
    for (const auto& c : h.constraints) {
      if (c.kind != ConstraintKind::Normalization || h.resolve(c.multiplier) == 0.0) continue;
      double sum = 0.0;
      for (const auto& t : c.coefficients) sum += base.at(t.slot);
      for (const auto& t : c.coefficients) base.set(t.slot, base.at(t.slot) / sum);
    }

  auto complete = [&](const ProbabilityAssignment& partial) {
    ProbabilityAssignment a = base;
    a.set_mode(mode);
    for (const auto& [slot, v] : partial.values()) a.set(slot, v);
    return a;
  };
  auto check = [&](const std::string& what, const ProbabilityAssignment& a, double value) {
    if (!cx.config.oracle) return;
    out.oracle.checked = true;
    compare(out.oracle, what, value, oracle::direct_evaluate(h, a), cx.config.tolerance);
  };

  if (param(out.params, "collapse", false)) {
    std::vector<SlotId> frontier;
    for (const auto& c : h.constraints)
      if (c.kind == ConstraintKind::Normalization && h.resolve(c.multiplier) != 0.0)
        for (const auto& t : c.coefficients) frontier.push_back(t.slot);
    json branches = json::array();
    for (const auto& partial : collapse_assignments(h)) {
      const auto a = complete(partial);
      std::string chosen;
      for (const auto& slot : frontier)
        if (partial.at(slot) == 1.0) chosen = cx.relabel(slot).name;
      const double value = evaluate(h, a);
      branches.push_back({{"chosen", chosen}, {"value", value}, {"sigma", h.sigma(a)}});
      check(chosen, a, value);
    }
    out.result = {{"state", s.label()}, {"collapse", std::move(branches)}};
    return;
  }

  ProbabilityAssignment partial(mode);
  if (out.params.contains("assignment"))
    for (const auto& [name, v] : out.params.at("assignment").items()) {
      const SlotId slot = cx.relabel.back(SlotId{name});
      if (!h.slots().count(slot)) reject(ErrorCode::MissingSlot, fmt::format("'{}' is not a slot of H", name));
      partial.set(slot, v.get<double>());
    }
  const auto a = complete(partial);
  const double value = evaluate(h, a);
  json values = json::object();
  for (const auto& [slot, v] : a.values()) values[cx.relabel(slot).name] = v;
  out.result = {{"state", s.label()},
                {"at", partial.size() == 0 ? "stationary" : "given"},
                {"value", value},
                {"sigma", h.sigma(a)},
                {"assignment", std::move(values)}};
  check("H", a, value);
}

void joint_paths_query(const Context& cx, QueryResult& out) {
  const int depth = out.params.at("depth").get<int>();
  if (depth < 1) reject(ErrorCode::Precondition, fmt::format("depth must be >= 1 (got {})", depth));
  const auto targets = pair_of(out.params.at("targets"));
  const BeliefTree tree = anticipation_tree(cx.session);
  const auto paths = enumerate_joint_paths(tree, targets, depth);

  json signatures = json::array();
  std::vector<std::vector<std::string>> engine;
  for (const auto& p : paths) {
    engine.push_back(p.signature());
    signatures.push_back(p.signature());
  }
  json result{{"state", cx.session.label()},
              {"depth", depth},
              {"targets", out.params.at("targets")},
              {"count", paths.size()},
              {"law", count_joint_paths(depth)},
              {"paths", std::move(signatures)}};

  std::optional<PermutationExpansion> perms;
  ProbabilityAssignment a;
  if (param(out.params, "permutations", false)) {
    a = anticipation_assignment(tree, depth);
    perms = permutation_expansion(tree, targets, depth, a);
    result["permutations"] = to_json(*perms);
  }
  out.result = std::move(result);

  if (!cx.config.oracle) return;
  out.oracle.checked = true;
  const auto brute = oracle::joint_signatures(tree.root(), targets, depth);
  if (brute != engine)
    mismatch(out.oracle, fmt::format("enumeration: engine {} paths vs oracle {}", engine.size(), brute.size()));
  if (perms) {
    const double tol = cx.config.tolerance;
    compare(out.oracle, "first before second", perms->sum_first, oracle::joint_sum(tree.root(), targets, depth, a), tol);
    compare(out.oracle, "second before first", perms->sum_second,
            oracle::joint_sum(tree.root(), {targets.second, targets.first}, depth, a), tol);
  }
}

void bayes_query(const Context& cx, QueryResult& out) {
  const auto& p = out.params;
  JointProblem problem;
  problem.tree = anticipation_tree(cx.session);
  problem.depth = param(p, "depth", 2);
  problem.joint.pair = pair_of(p.at("pair"));
  problem.joint.k1 = param(p, "k1", 1.0);
  problem.joint.k2 = param(p, "k2", 1.0);
  if (p.contains("target")) problem.joint.target = p.at("target").get<double>();
  problem.mu_ab = nullable(p, "mu_ab", 1.0);
  problem.mu_ba = nullable(p, "mu_ba", 1.0);

  std::vector<EdgeOverride> overrides;
  if (p.contains("overrides"))
    for (const auto& o : p.at("overrides")) {
      EdgeOverride e;
      e.after = o.at("after").get<std::vector<std::string>>();
      if (o.contains("probabilities")) e.probabilities = o.at("probabilities").get<std::map<std::string, double>>();
      if (o.contains("rest")) e.rest = o.at("rest").get<double>();
      overrides.push_back(std::move(e));
    }
  problem.assignment = anticipation_assignment(problem.tree, problem.depth, overrides);
  const bool equalize = param(p, "equalize", false);
  const AnticipationReport report = bayes_consistency(problem, equalize);
  out.result = to_json(report);
  out.result["state"] = cx.session.label();

  if (!cx.config.oracle) return;
  out.oracle.checked = true;
  const double tol = cx.config.tolerance;
  const auto& b = *report.bayes;
  const auto& root = problem.tree.root();
  const auto [first, second] = problem.joint.pair;
  compare(out.oracle, "tree sum A then B", b.tree_ab,
          oracle::joint_sum(root, {first, second}, problem.depth, problem.assignment), tol);
  compare(out.oracle, "tree sum B then A", b.tree_ba,
          oracle::joint_sum(root, {second, first}, problem.depth, problem.assignment), tol);
  if (b.stationary_ab && b.stationary_ba && b.target > 0.0 && b.k1 > 0.0 && b.k2 > 0.0) {
    // Entropy maximized along the constraint line k1 x + k2 y = C.
    auto h = [&](double x) {
      const double y = (b.target - b.k1 * x) / b.k2;
      double v = 0.0;
      if (x > 0.0) v -= b.mu_ab * x * std::log(x);
      if (y > 0.0) v -= b.mu_ba * y * std::log(y);
      return v;
    };
    const double x = oracle::grid_argmax(h, 0.0, b.target / b.k1);
    compare(out.oracle, "stationary A∩B", *b.stationary_ab, x, tol);
    compare(out.oracle, "stationary B∩A", *b.stationary_ba, (b.target - b.k1 * x) / b.k2, tol);
  }
}

void expectation_query(const Context& cx, QueryResult& out) {
  const auto& s = cx.session;
  const auto& p = out.params;
  CredenceSetup setup;
  setup.context = s.label();
  const Session::CredenceRecord* credence = s.credences().empty() ? nullptr : &s.credences().back();
  if (credence) {
    setup.favored = credence->favored;
    setup.beta = credence->beta;
    setup.k = credence->alpha;
  } else if (!p.contains("k") || !p.contains("beta")) {
    reject(ErrorCode::Precondition, "no credence in the session: give k and beta");
  }
  setup.k = param(p, "k", setup.k);
  setup.beta = param(p, "beta", setup.beta);
  setup.mu = param(p, "mu", 1.0);
  if (p.contains("x")) {
    setup.x = p.at("x").get<int>();
  } else if (credence) {
    for (const auto& prop : s.frontier())
      if (prop.id != setup.favored) setup.others.push_back(prop.id);
    setup.x = static_cast<int>(setup.others.size());
  }

  // Souvenirs and the live knowledge constraints form the memory part.
  const StationaryResult st = stationary_assignment(s.functional());
  for (const auto& sv : s.ledger().souvenirs) setup.memory.push_back(sv.constraint);
  for (const auto& c : s.ledger().evolving) setup.memory.push_back(cx.relabel(c));
  const ProbabilityAssignment completed = completed_stationary(s, st);
  for (const auto& [slot, v] : completed.values()) setup.memory_values.set(cx.relabel(slot), v);

  const bool enforce = param(p, "enforce_normalization", false);
  const AnticipationReport report = expectation_report(setup, enforce);
  out.result = to_json(report);
  out.result["state"] = s.label();
  out.infeasibility_expected = param(p, "expect_infeasible", false);
  out.infeasible = report.infeasibility.has_value();
  if (out.infeasible)
    out.warnings.push_back(fmt::format("normalization cannot be enforced: {}", report.infeasibility->reason));
  for (const auto& slot : report.over_unity)
    out.warnings.push_back(fmt::format("{} = {:.17g} exceeds 1 (anticipation weight)", slot.name,
                                       report.values.at(slot)));

  if (!cx.config.oracle) return;
  out.oracle.checked = true;
  const double tol = cx.config.tolerance;
  const auto& e = *report.expectation;
  const IgnoranceFunctional h = credence_functional(setup);
  ProbabilityAssignment base = setup.memory_values;
  for (const auto& [slot, v] : report.values) base.set(slot, v);
  compare(out.oracle, e.favored.name, e.favored_value, oracle::slot_argmax(h, e.favored, base), tol);
  const auto others = credence_other_slots(setup);
  if (!others.empty()) compare(out.oracle, others.front().name, e.other_value, oracle::slot_argmax(h, others.front(), base), tol);
  compare(out.oracle, "H at the stationary point", e.evaluated, oracle::direct_evaluate(h, base), tol);
  compare(out.oracle, "remainder", e.evaluated - e.sigma, e.remainder, tol);
  if (out.infeasible) {
    double sum = 0.0;
    for (const auto& [_, v] : report.values) sum += v;
    if (sum <= 1.0) mismatch(out.oracle, fmt::format("reported infeasible but the stationary sum is {:.17g}", sum));
  }
}

void no_knowledge_query(const Context& cx, QueryResult& out) {
  const auto slots = cx.session.frontier_slots();
  std::vector<double> lambdas(slots.size(), 1.0);
  if (out.params.contains("lambdas")) lambdas = out.params.at("lambdas").get<std::vector<double>>();
  if (lambdas.size() != slots.size())
    reject(ErrorCode::InvalidArgument,
           fmt::format("{} lambdas given for {} frontier slots", lambdas.size(), slots.size()));

  IgnoranceFunctional h;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const SlotId slot = cx.relabel(slots[i]);
    h.entropies.push_back({Multiplier::fixed(fmt::format("lambda:{}", i), "λ", lambdas[i]), slot});
    h.no_knowledge.insert(slot);
  }
  h.check_invariants();
  const NoKnowledgeReport report = no_knowledge_analysis(h);
  out.result = to_json(report);
  out.result["state"] = cx.session.label();

  if (!cx.config.oracle) return;
  out.oracle.checked = true;
  const double tol = cx.config.tolerance;
  ProbabilityAssignment at(AssignmentMode::Anticipation);
  for (const auto& s : report.slots) {
    if (!s.stationary) {
      at.set(s.slot, 0.0);
      continue;
    }
    const double lambda = s.lambda;
    const double best = oracle::grid_argmax([&](double x) { return x > 0.0 ? -lambda * x * std::log(x) : 0.0; }, 0.0, 1.0);
    compare(out.oracle, s.slot.name, *s.stationary, best, tol);
    at.set(s.slot, best);
  }
  compare(out.oracle, "fundamental", report.fundamental, oracle::direct_evaluate(h, at), tol);
}

}  // namespace

Session replay(const ScenarioScript& script) {
  Session s;
  for (std::size_t i = 0; i < script.events.size(); ++i) {
    try {
      s = apply(std::move(s), script.events[i]);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("event {} ({}): {}", i, to_string(script.events[i].kind), e.what()));
    }
  }
  return s;
}

RunReport run(const ScenarioScript& script, const RunConfig& config) {
  if (!(config.tolerance > 0.0)) reject(ErrorCode::InvalidArgument, "tolerance must be positive");
  const Session session = replay(script);
  RunReport report;
  report.name = script.name;
  report.config = config;
  report.events = script.events.size();
  report.state = session.label();
  report.digest = digest(session);

  const Context cx{session, config, relabel_for(session)};
  bool mismatched = false, infeasible = false;
  for (std::size_t i = 0; i < script.queries.size(); ++i) {
    const Query& q = script.queries[i];
    QueryResult out;
    out.index = i;
    out.kind = q.kind;
    out.params = q.params;
    try {
      switch (q.kind) {
        case QueryKind::Evaluate: evaluate_query(cx, out); break;
        case QueryKind::Stationary: stationary_query(cx, out); break;
        case QueryKind::JointPaths: joint_paths_query(cx, out); break;
        case QueryKind::BayesCheck: bayes_query(cx, out); break;
        case QueryKind::Expectation: expectation_query(cx, out); break;
        case QueryKind::NoKnowledge: no_knowledge_query(cx, out); break;
      }
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("query {} ({}): {}", i, to_string(q.kind), e.what()));
    }
    if (out.infeasibility_expected && !out.infeasible)
      mismatch(out.oracle, "an infeasibility was expected but the constraints were satisfied");
    if (!out.oracle.ok) mismatched = true;
    if (out.infeasible && !out.infeasibility_expected) infeasible = true;
    for (const auto& w : out.warnings) report.warnings.push_back(fmt::format("query {}: {}", i, w));
    report.queries.push_back(std::move(out));
  }
  report.status = mismatched ? RunStatus::OracleMismatch : infeasible ? RunStatus::Infeasible : RunStatus::Ok;
  return report;
}

int exit_code(const RunReport& report) {
  switch (report.status) {
    case RunStatus::Ok: return 0;
    case RunStatus::OracleMismatch: return 4;
    case RunStatus::Infeasible: return 5;
  }
  return 0;
}

}  // namespace ignorance
