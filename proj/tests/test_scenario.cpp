#include <gtest/gtest.h>

#include "ignorance/error.hpp"
#include "ignorance/scenario.hpp"

using namespace ignorance;

namespace {

std::string rejection(const std::string& text, bool lenient = false) {
  try {
    parse_scenario(text, lenient);
  } catch (const Error& e) {
    EXPECT_EQ(exit_code(e), 2) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "accepted";
  return {};
}

const char* minimal = R"({
  "version": "v1", "name": "tiny",
  "events": [{"kind": "learn", "propositions": [{"id": "E1"}, {"id": "E2"}]}],
  "queries": [{"kind": "stationary"}]
})";

}  // namespace

TEST(Parse, Howard) {
  const auto s = parse_scenario(fixture_source("howard-corridor"));
  EXPECT_EQ(s.name, "howard-corridor");
  EXPECT_EQ(s.events.size(), 2u);
  EXPECT_FALSE(s.queries.empty());
}

TEST(Parse, Minimal) {
  const auto s = parse_scenario(minimal);
  EXPECT_EQ(s.events.size(), 1u);
  ASSERT_EQ(s.queries.size(), 1u);
  EXPECT_EQ(s.queries[0].kind, QueryKind::Stationary);
}

TEST(Parse, EveryFixtureRoundTrips) {
  for (const auto& name : list_fixtures()) {
    const auto s = parse_scenario(fixture_source(name));
    const auto back = parse_scenario(to_json(s).dump());
    EXPECT_EQ(back, s) << name;
  }
}

TEST(Parse, Rejections) {
  EXPECT_NE(rejection(R"({"version": "v1", "name": "x", "events": [], "queries": []})").find("$.events"),
            std::string::npos);
  EXPECT_NE(rejection(R"({"version": "v2", "name": "x", "events": [], "queries": []})").find("version"),
            std::string::npos);
  rejection("{not json");
  const std::string bad_event = R"({"version": "v1", "name": "x",
    "events": [{"kind": "learn", "propositions": [{"id": "E1"}]}, {"kind": "teleport"}], "queries": []})";
  EXPECT_NE(rejection(bad_event).find("$.events[1]"), std::string::npos);
  const std::string bad_param = R"({"version": "v1", "name": "x",
    "events": [{"kind": "learn", "propositions": [{"id": "E1"}]}],
    "queries": [{"kind": "joint_paths", "params": {"depth": "two", "targets": ["E1", "E2"]}}]})";
  EXPECT_NE(rejection(bad_param).find("$.queries[0].params.depth"), std::string::npos);
}

TEST(Parse, LenientSkipsUnknownFields) {
  const std::string extra = R"({"version": "v1", "name": "x", "colour": "blue",
    "events": [{"kind": "learn", "propositions": [{"id": "E1"}]}],
    "queries": [{"kind": "stationary", "params": {"shiny": true}}]})";
  rejection(extra);
  std::vector<std::string> warnings;
  const auto s = parse_scenario(extra, true, &warnings);
  EXPECT_EQ(warnings.size(), 2u);
  EXPECT_EQ(s.queries.size(), 1u);
}

TEST(Fixtures, ListedSorted) {
  const std::vector<std::string> expected{"coin-dice-duck", "howard-corridor", "joint-anticipation", "no-knowledge",
                                          "nyarlathotep-credence"};
  EXPECT_EQ(list_fixtures(), expected);
  EXPECT_THROW(fixture_source("missing"), Error);
  EXPECT_NE(scenario_schema().find("\"v1\""), std::string::npos);
}

TEST(Run, EveryFixturePassesItsOracles) {
  for (auto mode : {AssignmentMode::Anticipation, AssignmentMode::Normalized})
    for (const auto& name : list_fixtures()) {
      const auto report = run(parse_scenario(fixture_source(name)), {mode, 1e-6, true});
      EXPECT_EQ(exit_code(report), 0) << name << "\n" << render_text(report);
      for (const auto& q : report.queries)
        if (q.oracle.checked) EXPECT_TRUE(q.oracle.ok) << name << " query " << q.index << ": " << q.oracle.detail;
    }
}

TEST(Run, ReportsAreDeterministic) {
  for (const auto& name : list_fixtures()) {
    const auto script = parse_scenario(fixture_source(name));
    EXPECT_EQ(render_json(run(script, {AssignmentMode::Anticipation, 1e-6, true})),
              render_json(run(script, {AssignmentMode::Anticipation, 1e-6, true})));
    EXPECT_EQ(render_text(run(script, {})), render_text(run(script, {})));
  }
}

TEST(Run, HowardCorridor) {
  const auto report = run(parse_scenario(fixture_source("howard-corridor")), {});
  EXPECT_EQ(report.events, 2u);
  EXPECT_EQ(report.digest.size(), 64u);
  const auto& joint = report.queries.back();
  EXPECT_EQ(joint.kind, QueryKind::JointPaths);
  EXPECT_EQ(joint.result["count"], 2);
}

TEST(Run, InfeasibilityStatus) {
  auto script = parse_scenario(minimal);
  script.queries = {{QueryKind::Expectation, {{"k", 1.0}, {"beta", 0.7}, {"x", 5}, {"enforce_normalization", true}}}};
  auto report = run(script, {});
  EXPECT_EQ(report.status, RunStatus::Infeasible);
  EXPECT_EQ(exit_code(report), 5);

  script.queries[0].params["expect_infeasible"] = true;
  report = run(script, {});
  EXPECT_EQ(exit_code(report), 0);

  script.queries[0].params["enforce_normalization"] = false;
  report = run(script, {});
  EXPECT_EQ(report.status, RunStatus::OracleMismatch);
  EXPECT_EQ(exit_code(report), 4);
}

TEST(Run, EngineErrorsNameTheStep) {
  auto script = parse_scenario(minimal);
  script.queries = {{QueryKind::JointPaths, {{"depth", 2}, {"targets", {"E1", "E9"}}}}};
  try {
    run(script, {});
    FAIL() << "accepted";
  } catch (const Error& e) {
    EXPECT_EQ(exit_code(e), 3);
    EXPECT_NE(std::string(e.what()).find("query 0"), std::string::npos);
  }
  EXPECT_THROW(run(script, {AssignmentMode::Anticipation, 0.0, false}), Error);
}
