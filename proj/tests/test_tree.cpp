#include <gtest/gtest.h>

#include <random>

#include "ignorance/error.hpp"
#include "ignorance/oracle.hpp"
#include "ignorance/tree.hpp"

using namespace ignorance;

namespace {

Proposition event(const std::string& id) { return {id, id, PropositionKind::Event}; }

BeliefTree corridor() {
  BeliefTree t;
  const std::vector<Proposition> props{event("E1"), event("E2")};
  t.expand(0, props, "Z1");
  return t;
}

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

TEST(Expand, AddsOneResidualAfterTheEvents) {
  const BeliefTree t = corridor();
  const auto& root = t.root();
  ASSERT_EQ(root.children.size(), 3u);
  EXPECT_EQ(root.children[0].proposition.id, "E1");
  EXPECT_EQ(root.children[1].proposition.id, "E2");
  EXPECT_TRUE(root.children[2].proposition.is_residual());
  EXPECT_EQ(root.children[0].probability.variable().name, "P(E1|Z1)");
  EXPECT_EQ(root.context, "Z1");
}

TEST(Expand, Rejections) {
  BeliefTree t = corridor();
  const std::vector<Proposition> again{event("E3")};
  EXPECT_EQ(code_of([&] { t.expand(0, again); }), ErrorCode::Precondition);

  BeliefTree fresh;
  const std::vector<Proposition> none;
  EXPECT_EQ(code_of([&] { fresh.expand(0, none); }), ErrorCode::Precondition);
  const std::vector<Proposition> twice{event("E1"), event("E1")};
  EXPECT_EQ(code_of([&] { fresh.expand(0, twice); }), ErrorCode::Duplicate);
  const std::vector<Proposition> residual{{"E_M", "else", PropositionKind::Residual}};
  EXPECT_EQ(code_of([&] { fresh.expand(0, residual); }), ErrorCode::InvalidArgument);
}

TEST(Expand, ResidualsAreFreshEveryTime) {
  BeliefTree t;
  const std::vector<Proposition> a{event("A")}, b{event("B")};
  t.expand(0, a);
  const auto next = t.descend(0, "A");
  t.expand(next, b);
  EXPECT_NE(t.root().children.back().proposition.id, t.state(next).children.back().proposition.id);
}

TEST(Tree, IndicesIncreaseFromRootToLeaf) {
  BeliefTree t = corridor();
  auto a = t.descend(0, "E1");
  const std::vector<Proposition> more{event("E3")};
  t.expand(a, more);
  auto b = t.descend(a, "E3");
  EXPECT_LT(0u, a);
  EXPECT_LT(a, b);
  EXPECT_EQ(*t.state(b).parent, a);
  EXPECT_EQ(t.descend(0, "E1"), a);
}

TEST(Tree, VerifiedEdgeIsUnique) {
  BeliefTree t = corridor();
  t.mark_verified(0, "E1");
  t.mark_verified(0, "E1");
  EXPECT_EQ(code_of([&] { t.mark_verified(0, "E2"); }), ErrorCode::Precondition);
  EXPECT_EQ(code_of([&] { t.mark_verified(0, "nope"); }), ErrorCode::Unregistered);
}

TEST(Slots, FixedValuesAreChecked) {
  EXPECT_EQ(code_of([] { ProbabilitySlot::fixed(-0.1); }), ErrorCode::NegativeProbability);
  EXPECT_EQ(code_of([] { ProbabilitySlot::fixed(1.5); }), ErrorCode::InvalidArgument);
  EXPECT_TRUE(ProbabilitySlot::fixed(1.5, Provenance::Anticipated).over_unity());
}

TEST(PathCount, LawForSmallAndLargeDepths) {
  EXPECT_EQ(count_joint_paths(1), 0u);
  EXPECT_EQ(count_joint_paths(2), 2u);
  EXPECT_EQ(count_joint_paths(5), 20u);
  for (int n = 1; n <= 64; ++n) EXPECT_EQ(count_joint_paths(n), static_cast<std::uint64_t>(n * n - n)) << n;
  EXPECT_EQ(code_of([] { count_joint_paths(0); }), ErrorCode::Precondition);
}

TEST(PathCount, EnumerationMatchesBruteForce) {
  const BeliefTree t = corridor();
  for (int n = 1; n <= 6; ++n) {
    const auto paths = enumerate_joint_paths(t, {"E1", "E2"}, n);
    std::vector<std::vector<std::string>> sigs;
    for (const auto& p : paths) sigs.push_back(p.signature());
    EXPECT_EQ(sigs, oracle::joint_signatures(t.root(), {"E1", "E2"}, n)) << n;
    EXPECT_EQ(paths.size(), count_joint_paths(n)) << n;
  }
}

// Extra frontier propositions never appear on a joint path: only the targets
// and residuals can.
TEST(PathCount, IndependentOfFrontierWidth) {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 20; ++trial) {
    const int width = 2 + static_cast<int>(rng() % 5);
    std::vector<Proposition> props;
    for (int i = 0; i < width; ++i) props.push_back(event("E" + std::to_string(i)));
    BeliefTree t;
    t.expand(0, props);
    const int depth = 1 + static_cast<int>(rng() % 5);
    const auto paths = enumerate_joint_paths(t, {"E0", "E1"}, depth);
    EXPECT_EQ(paths.size(), count_joint_paths(depth));
    std::vector<std::vector<std::string>> sigs;
    for (const auto& p : paths) sigs.push_back(p.signature());
    EXPECT_EQ(sigs, oracle::joint_signatures(t.root(), {"E0", "E1"}, depth));
  }
}

TEST(Paths, SignatureAndConcat) {
  const BeliefTree t = corridor();
  const auto paths = enumerate_joint_paths(t, {"E1", "E2"}, 3);
  ASSERT_EQ(paths.size(), 6u);
  EXPECT_EQ(paths.front().signature(), (std::vector<std::string>{"E1", "E2", "~2"}));
  const Path joined = paths[0].concat(paths[1]);
  EXPECT_EQ(joined.steps.size(), 6u);
}

TEST(Paths, ProbabilityIsTheProductOfEdges) {
  const BeliefTree t = corridor();
  const auto paths = enumerate_joint_paths(t, {"E1", "E2"}, 2);
  ProbabilityAssignment a;
  a.set({"P(E1|Z1)"}, 0.5);
  a.set({"P(E2|E1,Z1)"}, 0.25);
  EXPECT_DOUBLE_EQ(path_probability(paths[0], a), 0.125);
  EXPECT_EQ(code_of([&] { path_probability(paths[1], a); }), ErrorCode::MissingSlot);
}

TEST(Paths, TargetsMustBeRegisteredEvents) {
  const BeliefTree t = corridor();
  EXPECT_EQ(code_of([&] { enumerate_joint_paths(t, {"E1", "E9"}, 2); }), ErrorCode::Unregistered);
  EXPECT_EQ(code_of([&] { enumerate_joint_paths(t, {"E1", "E1"}, 2); }), ErrorCode::InvalidArgument);
}

TEST(AnticipationChildren, SkipUsedPropositions) {
  const std::vector<Proposition> frontier{event("A"), event("B"), event("C")};
  const std::vector<std::string> prefix{"B"};
  const auto edges = anticipation_children(frontier, prefix, "Z2");
  ASSERT_EQ(edges.size(), 3u);
  EXPECT_EQ(edges[0].probability.variable().name, "P(A|B,Z2)");
  EXPECT_EQ(edges[1].proposition.id, "C");
  EXPECT_EQ(edges[2].proposition.id, "E_M@1");
}

TEST(Serialization, TreeRoundTrips) {
  BeliefTree t = corridor();
  t.mark_verified(0, "E1");
  t.set_probability(0, "E1", ProbabilitySlot::fixed(1.0));
  const auto child = t.descend(0, "E1");
  const std::vector<Proposition> more{event("E3")};
  t.expand(child, more);
  const BeliefTree back = tree_from_json(to_json(t));
  EXPECT_EQ(back, t);
  EXPECT_EQ(to_json(back).dump(), to_json(t).dump());
}
