#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ignorance/error.hpp"
#include "ignorance/functional.hpp"
#include "ignorance/oracle.hpp"

using namespace ignorance;

namespace {

SlotId slot(int i) { return {"P(E" + std::to_string(i) + "|Z0)"}; }

std::vector<SlotId> slots(int n) {
  std::vector<SlotId> out;
  for (int i = 0; i < n; ++i) out.push_back(slot(i));
  return out;
}

// One normalization over n slots, entropy multipliers tied to mu.
IgnoranceFunctional normalized(int n, double mu, double lambda) {
  IgnoranceFunctional h;
  const auto s = slots(n);
  h.constraints.push_back(normalization_constraint(Multiplier::fixed("mu", "μ", mu), s));
  for (int i = 0; i < n; ++i)
    h.entropies.push_back({Multiplier::fixed("lambda" + std::to_string(i), "λ", lambda), s[static_cast<std::size_t>(i)]});
  return h;
}

struct Generator {
  std::mt19937_64 rng{0x1c0ffee};

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  // Random constraints over random subsets, entropy on every constrained slot
  // and random memory entries.
  IgnoranceFunctional functional() {
    IgnoranceFunctional h;
    const int n = integer(1, 6);
    const auto s = slots(n);
    const int constraints = integer(1, 4);
    for (int c = 0; c < constraints; ++c) {
      LinearConstraint lc;
      lc.multiplier = Multiplier::fixed("m" + std::to_string(c), "m", uniform(-3.0, 3.0));
      lc.kind = ConstraintKind::Credence;
      lc.offset = uniform(-1.0, 1.0);
      for (const auto& id : s)
        if (integer(0, 1)) lc.coefficients.push_back({id, uniform(-2.0, 2.0)});
      if (lc.coefficients.empty()) lc.coefficients.push_back({s[0], 1.0});
      h.constraints.push_back(std::move(lc));
    }
    for (int i = 0; i < n; ++i) {
      const auto& id = s[static_cast<std::size_t>(i)];
      const bool constrained = std::any_of(h.constraints.begin(), h.constraints.end(),
                                           [&](const LinearConstraint& c) { return c.references(id); });
      if (!constrained) h.no_knowledge.insert(id);
      h.entropies.push_back({Multiplier::fixed("l" + std::to_string(i), "λ", uniform(0.1, 3.0)), id});
    }
    if (integer(0, 1)) {
      LinearConstraint mem;
      mem.multiplier = Multiplier::fixed("sigma", "α", uniform(-2.0, 2.0));
      mem.kind = ConstraintKind::Souvenir;
      mem.coefficients.push_back({s[0], 1.0});
      mem.offset = -1.0;
      h.memory.push_back(std::move(mem));
    }
    h.check_invariants();
    return h;
  }

  ProbabilityAssignment point(const IgnoranceFunctional& h) {
    ProbabilityAssignment a(AssignmentMode::Anticipation);
    for (const auto& s : h.slots()) a.set(s, uniform(0.05, 2.0));
    return a;
  }
};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no rejection";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Constraints, Shapes) {
  const auto s = slots(3);
  ProbabilityAssignment a;
  a.set(s[0], 0.5);
  a.set(s[1], 0.3);
  a.set(s[2], 0.2);
  EXPECT_DOUBLE_EQ(knowledge_constraint(Multiplier::fixed("m", "m", 1), s[0]).value(a), -0.5);
  EXPECT_NEAR(normalization_constraint(Multiplier::fixed("m", "m", 1), s).value(a), 0.0, 1e-15);
  const std::vector<SlotId> others{s[1], s[2]};
  EXPECT_NEAR(credence_constraint(Multiplier::fixed("m", "m", 1), s[0], others, 0.5).value(a), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(doubt_constraint(Multiplier::fixed("m", "m", 1), s[0], 0.25).value(a), 0.25);
  const auto joint = joint_constraint(Multiplier::fixed("d", "δ", 1), s[0], s[1], 2.0, 3.0, 1.0);
  EXPECT_DOUBLE_EQ(joint.value(a), 2.0 * 0.5 + 3.0 * 0.3 - 1.0);
}

TEST(Entropy, DensityAndZeroConvention) {
  EXPECT_EQ(entropy_density(0.0), 0.0);
  EXPECT_DOUBLE_EQ(entropy_density(1.0), 0.0);
  EXPECT_DOUBLE_EQ(entropy_density(0.5), 0.5 * std::log(2.0));
}

TEST(Multipliers, TiesResolveThroughChains) {
  IgnoranceFunctional h = normalized(2, 2.0, 1.0);
  h.entropies[0].multiplier = Multiplier::tied("lambda0", "λ", "mu", 1.0);
  h.entropies[1].multiplier = Multiplier::tied("lambda1", "λ", "lambda0", 3.0);
  EXPECT_DOUBLE_EQ(h.resolve("lambda1"), 6.0);
  EXPECT_DOUBLE_EQ(h.with_multiplier("mu", 1.0).resolve("lambda1"), 3.0);
  h.constraints[0].multiplier = Multiplier::tied("mu", "μ", "lambda1", 1.0);
  EXPECT_EQ(code_of([&] { h.resolve("mu"); }), ErrorCode::Precondition);
  EXPECT_EQ(code_of([&] { h.with_multiplier("nope", 1.0); }), ErrorCode::Unregistered);
}

TEST(Invariants, UnconstrainedEntropyNeedsFlag) {
  IgnoranceFunctional h;
  h.entropies.push_back({Multiplier::fixed("l", "λ", 1), slot(0)});
  EXPECT_EQ(code_of([&] { h.check_invariants(); }), ErrorCode::Precondition);
  h.no_knowledge.insert(slot(0));
  EXPECT_NO_THROW(h.check_invariants());
  h.entropies.push_back({Multiplier::fixed("l", "λ", 1), slot(1)});
  h.no_knowledge.insert(slot(1));
  EXPECT_EQ(code_of([&] { h.check_invariants(); }), ErrorCode::Duplicate);
}

TEST(Evaluate, RejectsBadValues) {
  const auto h = normalized(2, 1.0, 1.0);
  ProbabilityAssignment a;
  a.set(slot(0), -0.1);
  a.set(slot(1), 0.5);
  EXPECT_EQ(code_of([&] { evaluate(h, a); }), ErrorCode::NegativeProbability);
  a.set(slot(0), 1.5);
  EXPECT_EQ(code_of([&] { evaluate(h, a); }), ErrorCode::InvalidArgument);
  a.set_mode(AssignmentMode::Anticipation);
  EXPECT_NO_THROW(evaluate(h, a));
  ProbabilityAssignment missing;
  missing.set(slot(0), 0.5);
  EXPECT_EQ(code_of([&] { evaluate(h, missing); }), ErrorCode::MissingSlot);
}

TEST(Gradient, SingularAtZero) {
  const auto h = normalized(2, 1.0, 1.0);
  ProbabilityAssignment a;
  a.set(slot(0), 0.0);
  a.set(slot(1), 1.0);
  EXPECT_EQ(code_of([&] { grad_probability(h, slot(0), a); }), ErrorCode::LogSingularity);
}

// Property: analytic dH/dp against central differences, 100 functionals x 100 points.
TEST(Gradient, MatchesCentralDifferences) {
  Generator gen;
  double worst = 0.0;
  for (int f = 0; f < 100; ++f) {
    const auto h = gen.functional();
    for (int k = 0; k < 100; ++k) {
      auto a = gen.point(h);
      for (const auto& s : h.slots()) {
        const double p = a.at(s);
        const double step = 1e-6 * p;
        auto up = a, down = a;
        up.set(s, p + step);
        down.set(s, p - step);
        const double numeric = (evaluate(h, up) - evaluate(h, down)) / (2.0 * step);
        const double analytic = grad_probability(h, s, a);
        const double err = std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
        worst = std::max(worst, err);
      }
    }
  }
  EXPECT_LE(worst, 1e-6);
}

// Property: dH/dm equals the term the multiplier weights.
TEST(Gradient, MultiplierDerivativeIsTheTerm) {
  Generator gen;
  for (int f = 0; f < 50; ++f) {
    const auto h = gen.functional();
    const auto a = gen.point(h);
    for (const auto& c : h.constraints) {
      const double m = h.resolve(c.multiplier);
      const double bumped = evaluate(h.with_multiplier(c.multiplier.id, m + 1.0), a) - evaluate(h, a);
      EXPECT_NEAR(grad_multiplier(h, c.multiplier.id, a), bumped, 1e-9);
    }
    for (const auto& e : h.entropies)
      EXPECT_DOUBLE_EQ(grad_multiplier(h, e.multiplier.id, a), entropy_density(a.at(e.slot)));
  }
}

TEST(Stationary, NormalizationClosedForm) {
  for (double mu : {0.5, 1.0, 2.0})
    for (double lambda : {0.5, 1.0, 3.0}) {
      const auto r = stationary_assignment(normalized(3, mu, lambda));
      for (const auto& s : slots(3)) EXPECT_NEAR(r.assignment.at(s), std::exp(mu / lambda - 1.0), 1e-12);
    }
  const auto r = stationary_assignment(normalized(4, 1.3, 1.3));
  for (const auto& s : slots(4)) EXPECT_EQ(r.assignment.at(s), 1.0);
}

// Property: the closed form zeroes every slot gradient.
TEST(Stationary, ZeroesTheGradient) {
  Generator gen;
  for (int f = 0; f < 200; ++f) {
    const auto h = gen.functional();
    const auto r = stationary_assignment(h);
    ProbabilityAssignment a(AssignmentMode::Anticipation);
    for (const auto& [s, v] : r.assignment.values()) a.set(s, v);
    for (const auto& s : h.slots())
      if (!a.contains(s)) a.set(s, 0.5);
    for (const auto& e : h.entropies) EXPECT_NEAR(grad_probability(h, e.slot, a), 0.0, 1e-9);
  }
}

TEST(Stationary, SimplexMaximumMatchesGrid) {
  // With equal lambdas the simplex maximum is the stationary point rescaled.
  IgnoranceFunctional h = normalized(3, 1.0, 1.0);
  const std::vector<SlotId> others{slot(1), slot(2)};
  h.constraints.push_back(credence_constraint(Multiplier::fixed("alpha", "α", 1.0), slot(0), others, 0.7));
  const auto r = stationary_assignment(h);
  double sum = 0.0;
  for (const auto& s : slots(3)) sum += r.assignment.at(s);
  auto f = [&](const std::vector<double>& p) {
    ProbabilityAssignment a;
    for (int i = 0; i < 3; ++i) a.set(slot(i), p[static_cast<std::size_t>(i)]);
    return oracle::direct_evaluate(h, a);
  };
  const auto best = oracle::simplex_argmax(f, 3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.assignment.at(slot(i)) / sum, best[static_cast<std::size_t>(i)], 1e-6);
}

TEST(Stationary, BranchesWithoutEntropy) {
  IgnoranceFunctional h = normalized(2, 1.0, 0.0);
  h.constraints.push_back(knowledge_constraint(Multiplier::fixed("k", "μ", 1.0), slot(5)));
  const auto r = stationary_assignment(h);
  EXPECT_EQ(r.no_ignorance.size(), 2u);
  ASSERT_EQ(r.fixed_by_constraint.size(), 1u);
  EXPECT_EQ(r.assignment.at(slot(5)), 1.0);
}

TEST(Stationary, OverUnityFlagged) {
  const auto r = stationary_assignment(normalized(2, 2.0, 1.0));
  EXPECT_EQ(r.over_unity.size(), 2u);
}

TEST(NoKnowledge, FundamentalIgnorance) {
  IgnoranceFunctional h;
  const std::vector<double> lambdas{0.0, 1.0, 2.5};
  for (int i = 0; i < 3; ++i) {
    h.entropies.push_back({Multiplier::fixed("l" + std::to_string(i), "λ", lambdas[static_cast<std::size_t>(i)]), slot(i)});
    h.no_knowledge.insert(slot(i));
  }
  const auto r = no_knowledge_analysis(h);
  EXPECT_NEAR(r.fundamental, std::exp(-1.0) * 3.5, 1e-12);
  EXPECT_TRUE(r.slots[0].no_ignorance);
  EXPECT_FALSE(r.slots[0].stationary);
  EXPECT_NEAR(*r.slots[1].stationary, std::exp(-1.0), 1e-12);
  EXPECT_EQ(code_of([] { no_knowledge_analysis(normalized(2, 1, 1)); }), ErrorCode::Precondition);
}

TEST(ExponentCheck, VanishesOnTheSurface) {
  std::mt19937_64 rng(7);
  for (int n = 2; n <= 6; ++n)
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> p(4);
      double sum = 0.0;
      for (auto& v : p) sum += v = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
      for (auto& v : p) v /= sum;
      EXPECT_EQ(constraint_exponent_check(n, p, 1e-12), 0.0);
    }
  const std::vector<double> off{0.5, 0.6};
  EXPECT_EQ(code_of([&] { constraint_exponent_check(2, off); }), ErrorCode::Precondition);
  const std::vector<double> ok{0.5, 0.5};
  EXPECT_EQ(code_of([&] { constraint_exponent_check(1, ok); }), ErrorCode::Precondition);
}

TEST(Collapse, OneBasisAssignmentPerSlot) {
  IgnoranceFunctional h = normalized(3, 1.0, 1.0);
  h.constraints.push_back(knowledge_constraint(Multiplier::fixed("k", "μ", 1.0), slot(9)));
  h.entropies.push_back({Multiplier::fixed("l9", "λ", 1.0), slot(8)});
  h.constraints.push_back(knowledge_constraint(Multiplier::fixed("k8", "μ", 1.0), slot(8)));
  const auto branches = collapse_assignments(h);
  ASSERT_EQ(branches.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0.0;
    for (const auto& s : slots(3)) sum += branches[i].at(s);
    EXPECT_EQ(sum, 1.0);
    EXPECT_EQ(branches[i].at(slot(static_cast<int>(i))), 1.0);
    EXPECT_EQ(branches[i].at(slot(9)), 1.0);
  }
}

TEST(Solver, EnforcesNormalization) {
  IgnoranceFunctional h = normalized(4, 1.0, 1.0);
  h.constraints[0].multiplier = Multiplier::unknown("mu", "μ");
  const std::vector<std::string> enforce{"mu"};
  const auto r = solve_multipliers(h, enforce);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r.multipliers.at("mu"), 1.0 - std::log(4.0), 1e-8);
}

TEST(Solver, ReportsInfeasibility) {
  // Entropy tied to mu: every slot sits at e^0 = 1 whatever mu is.
  IgnoranceFunctional h = normalized(3, 1.0, 1.0);
  h.constraints[0].multiplier = Multiplier::unknown("mu", "μ");
  for (auto& e : h.entropies) e.multiplier = Multiplier::tied(e.multiplier.id, "λ", "mu", 1.0);
  const std::vector<std::string> enforce{"mu"};
  const auto r = solve_multipliers(h, enforce);
  ASSERT_FALSE(r.ok());
  EXPECT_FALSE(r.infeasible->reason.empty());
  EXPECT_NEAR(r.infeasible->residuals.at(0).second, 2.0, 1e-9);
}

TEST(Serialization, FunctionalRoundTrips) {
  Generator gen;
  for (int f = 0; f < 30; ++f) {
    auto h = gen.functional();
    h.entropies[0].multiplier = Multiplier::tied(h.entropies[0].multiplier.id, "λ", h.constraints[0].multiplier.id, 0.5);
    const auto back = functional_from_json(to_json(h));
    EXPECT_EQ(back, h);
    EXPECT_EQ(to_json(back).dump(), to_json(h).dump());
    const auto a = gen.point(h);
    EXPECT_EQ(assignment_from_json(to_json(a)), a);
  }
}
