#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ignorance/error.hpp"
#include "ignorance/update.hpp"

using namespace ignorance;

namespace {

Proposition event(const std::string& id) { return {id, id, PropositionKind::Event}; }

Session play(const std::vector<UpdateEvent>& events) {
  Session s;
  for (const auto& ev : events) s = apply(std::move(s), ev);
  return s;
}

std::vector<UpdateEvent> corridor() {
  return {UpdateEvent::assertion(event("E0")), UpdateEvent::learn({event("E1"), event("E2")})};
}

std::vector<UpdateEvent> object_scene() {
  auto ev = corridor();
  ev.push_back(UpdateEvent::assertion(event("E_a")));
  ev.push_back(UpdateEvent::learn({event("E_c"), event("E_d"), event("E_s")}));
  return ev;
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

int active_normalizations(const IgnoranceFunctional& h) {
  int n = 0;
  for (const auto& c : h.constraints)
    if (c.kind == ConstraintKind::Normalization && h.resolve(c.multiplier) != 0.0) ++n;
  return n;
}

// Random, always-legal event sequences.
struct Script {
  std::mt19937_64 rng;
  int next_id = 0;
  explicit Script(std::uint64_t seed) : rng(seed) {}

  int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

  std::vector<Proposition> fresh(int n) {
    std::vector<Proposition> out;
    for (int i = 0; i < n; ++i) out.push_back(event("R" + std::to_string(next_id++)));
    return out;
  }

  std::optional<UpdateEvent> step(const Session& s) {
    std::vector<std::string> open, asserted, undoubted;
    for (const auto& p : s.frontier())
      if (!p.is_residual()) open.push_back(p.id);
    for (const auto& k : s.knowledge()) {
      asserted.push_back(k.proposition.id);
      if (!k.doubt) undoubted.push_back(k.proposition.id);
    }
    switch (pick(6)) {
      case 0: return UpdateEvent::learn(fresh(1 + pick(3)));
      case 1:
        if (open.empty()) return std::nullopt;
        return UpdateEvent::assertion(event(open[static_cast<std::size_t>(pick(static_cast<int>(open.size())))]));
      case 2: return UpdateEvent::assertion(fresh(1).front());
      case 3:
        if (open.empty()) return std::nullopt;
        return UpdateEvent::inform(event(open[static_cast<std::size_t>(pick(static_cast<int>(open.size())))]),
                                   0.05 + 0.9 * (pick(100) / 100.0), "someone");
      case 4:
        if (asserted.empty()) return std::nullopt;
        return UpdateEvent::forget(asserted[static_cast<std::size_t>(pick(static_cast<int>(asserted.size())))]);
      default:
        if (undoubted.empty()) return std::nullopt;
        return UpdateEvent::doubt(undoubted[static_cast<std::size_t>(pick(static_cast<int>(undoubted.size())))], 0.5);
    }
  }

  std::vector<UpdateEvent> events(int length) {
    std::vector<UpdateEvent> out{UpdateEvent::learn(fresh(2))};
    Session s = play(out);
    while (static_cast<int>(out.size()) < length) {
      auto ev = step(s);
      if (!ev) continue;
      s = apply(std::move(s), *ev);
      out.push_back(*ev);
    }
    return out;
  }
};

}  // namespace

TEST(Labels, OrdinalsAndLabels) {
  EXPECT_EQ(state_label(0), "Z");
  EXPECT_EQ(state_label(1), "Z0");
  EXPECT_EQ(state_label(12), "Z11");
  for (std::size_t n = 0; n < 50; ++n) EXPECT_EQ(state_ordinal(state_label(n)), n);
  for (const char* bad : {"", "Y1", "Z01", "Zx", "Z-1"})
    EXPECT_EQ(code_of([&] { state_ordinal(bad); }), ErrorCode::InvalidArgument) << bad;
}

TEST(Assert, FirstKnowledge) {
  const Session s = play({UpdateEvent::assertion(event("E0"))});
  EXPECT_EQ(s.label(), "Z0");
  ASSERT_EQ(s.knowledge().size(), 1u);
  const auto& c = s.functional().constraints.front();
  EXPECT_EQ(c.kind, ConstraintKind::Knowledge);
  EXPECT_EQ(c.coefficients.front().slot.name, "P(E0|Z)");
  EXPECT_EQ(s.tree().root().verified, "E0");
  EXPECT_TRUE(s.tree().root().edge("E0")->probability.is_fixed());
}

TEST(Learn, CorridorFrontier) {
  const Session s = play(corridor());
  EXPECT_EQ(s.label(), "Z1");
  ASSERT_EQ(s.frontier().size(), 3u);
  EXPECT_TRUE(s.frontier().back().is_residual());
  EXPECT_EQ(active_normalizations(s.functional()), 1);
  EXPECT_EQ(s.slot("E1").name, "P(E1|Z0)");
}

TEST(Assert, Rejections) {
  const Session s = play(corridor());
  EXPECT_EQ(code_of([&] { apply(s, UpdateEvent::assertion(event("E0"))); }), ErrorCode::Precondition);
  EXPECT_EQ(code_of([&] { apply(s, UpdateEvent::assertion(s.frontier().back())); }), ErrorCode::InvalidArgument);
  const Session later = apply(s, UpdateEvent::assertion(event("E1")));
  // E2 is still open, but a registered proposition off the frontier is not.
  EXPECT_NO_THROW(apply(later, UpdateEvent::assertion(event("E2"))));
}

TEST(Learn, Rejections) {
  const Session s = play(corridor());
  EXPECT_EQ(code_of([&] { apply(s, UpdateEvent::learn({event("E1")})); }), ErrorCode::Duplicate);
  EXPECT_EQ(code_of([&] { apply(s, UpdateEvent::learn({})); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { apply(s, UpdateEvent::learn({event("E9"), event("E9")})); }), ErrorCode::Duplicate);
}

TEST(Inform, CredenceCoefficients) {
  auto events = object_scene();
  events.push_back(UpdateEvent::inform(event("E_c"), 0.7, "Nobody"));
  const Session s = play(events);
  const LinearConstraint* credence = nullptr;
  for (const auto& c : s.functional().constraints)
    if (c.kind == ConstraintKind::Credence) credence = &c;
  ASSERT_NE(credence, nullptr);
  EXPECT_EQ(credence->coefficients.size(), 6u);
  EXPECT_DOUBLE_EQ(credence->coefficient(s.slot("E_c")), 1.0 - 0.7);
  EXPECT_DOUBLE_EQ(credence->coefficient(s.slot("E1")), -0.7);
  EXPECT_EQ(credence->offset, 0.0);
}

TEST(Inform, Rejections) {
  const Session s = play(object_scene());
  EXPECT_EQ(code_of([&] { apply(s, UpdateEvent::inform(event("E_c"), 1.2, "x")); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { apply(s, UpdateEvent::inform(event("E0"), 0.5, "x")); }), ErrorCode::Precondition);
  EXPECT_EQ(code_of([&] { apply(s, UpdateEvent::inform(event("E9"), 0.5, "x")); }), ErrorCode::Unregistered);
}

TEST(Forget, ZeroesTheKnowledgeTerm) {
  auto events = corridor();
  const Session before = play(events);
  events.push_back(UpdateEvent::forget("E0"));
  const Session after = play(events);
  const auto& h = after.functional();
  ASSERT_EQ(h.constraints.size(), before.functional().constraints.size());
  EXPECT_EQ(h.resolve("mu:E0"), 0.0);

  // H with the forgotten term equals H without it everywhere.
  IgnoranceFunctional stripped = h;
  std::erase_if(stripped.constraints, [](const LinearConstraint& c) { return c.multiplier.id == "mu:E0"; });
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    ProbabilityAssignment a(AssignmentMode::Anticipation);
    for (const auto& slot : h.slots()) a.set(slot, std::uniform_real_distribution<double>(0.01, 2.0)(rng));
    EXPECT_DOUBLE_EQ(evaluate(h, a), evaluate(stripped, a));
  }
  EXPECT_EQ(code_of([&] { apply(after, UpdateEvent::forget("E7")); }), ErrorCode::Unregistered);
}

TEST(Doubt, AddsOneEntropyTerm) {
  auto events = corridor();
  const Session before = play(events);
  events.push_back(UpdateEvent::doubt("E0", 0.4));
  const Session after = play(events);
  EXPECT_EQ(after.functional().entropies.size(), before.functional().entropies.size() + 1);
  const LinearConstraint* doubt = nullptr;
  for (const auto& c : after.functional().constraints)
    if (c.kind == ConstraintKind::Doubt) doubt = &c;
  ASSERT_NE(doubt, nullptr);
  EXPECT_DOUBLE_EQ(doubt->offset, -0.4);
  EXPECT_EQ(code_of([&] { apply(after, UpdateEvent::doubt("E0", 0.2)); }), ErrorCode::Precondition);
}

TEST(Sequence, EventsAreSerial) {
  Session s;
  auto ev = UpdateEvent::learn({event("E1")});
  ev.sequence = 2;
  EXPECT_EQ(code_of([&] { apply(s, ev); }), ErrorCode::Sequence);
  ev.sequence = 1;
  s = apply(s, ev);
  EXPECT_EQ(s.sequence(), 1u);
}

TEST(Memory, RecallReturnsFrozenSouvenirs) {
  const Session s = play(object_scene());
  const auto at1 = recall(s.ledger(), 1);
  ASSERT_EQ(at1.size(), 2u);
  EXPECT_EQ(at1[0].kind, ConstraintKind::Normalization);
  EXPECT_EQ(at1[1].coefficients.front().slot.name, "P(E0|Z)");
  EXPECT_TRUE(recall(s.ledger(), 2).empty());
  EXPECT_EQ(code_of([&] { recall(s.ledger(), 99); }), ErrorCode::Precondition);
}

TEST(Renormalize, EquiprobableAfterAssert) {
  auto events = object_scene();
  events.push_back(UpdateEvent::assertion(event("E_c")));
  const Session s = play(events);
  const auto r = renormalize_after_assert(s.last_assert());
  EXPECT_EQ(r.frontier.size(), 5u);
  for (const auto& [slot, v] : r.frontier.values()) EXPECT_NEAR(v, 0.2, 1e-15) << slot.name;
  EXPECT_EQ(active_normalizations(r.functional), 1);
  EXPECT_EQ(code_of([] { renormalize_after_assert(std::nullopt); }), ErrorCode::Precondition);
}

TEST(Renormalize, CredenceMultiplierMovesToMemory) {
  auto events = object_scene();
  events.push_back(UpdateEvent::inform(event("E_c"), 0.7, "Nobody", 2.0));
  events.push_back(UpdateEvent::assertion(event("E_c")));
  const Session s = play(events);
  const auto r = renormalize_after_assert(s.last_assert());
  const auto& kept = r.functional.memory.back();
  EXPECT_EQ(kept.kind, ConstraintKind::Souvenir);
  EXPECT_EQ(r.functional.resolve(kept.multiplier), 2.0);
  double sum = 0.0;
  for (const auto& [_, v] : r.frontier.values()) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

// Properties over random event sequences.
TEST(Properties, RandomHistories) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Script script(seed);
    const auto events = script.events(12);
    Session s;
    std::vector<Souvenir> previous;
    for (const auto& ev : events) {
      s = apply(std::move(s), ev);
      const auto& h = s.functional();
      EXPECT_NO_THROW(h.check_invariants());
      EXPECT_EQ(active_normalizations(h), 1) << "seed " << seed;

      // Souvenirs are append-only and never rewritten.
      const auto& now = s.ledger().souvenirs;
      ASSERT_GE(now.size(), previous.size());
      EXPECT_TRUE(std::equal(previous.begin(), previous.end(), now.begin()));
      previous = now;

      // The evolving chain is exactly the live knowledge.
      std::vector<LinearConstraint> live;
      for (const auto& c : h.constraints)
        if (c.kind == ConstraintKind::Knowledge || c.kind == ConstraintKind::Doubt) live.push_back(c);
      EXPECT_EQ(s.ledger().evolving, live);
      EXPECT_EQ(s.ledger().current, s.ordinal());

      if (ev.kind == EventKind::Assert) {
        const auto r = renormalize_after_assert(s.last_assert());
        double sum = 0.0;
        for (const auto& [_, v] : r.frontier.values()) {
          EXPECT_GE(v, 0.0);
          sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
        EXPECT_EQ(active_normalizations(r.functional), 1);
      }
    }
  }
}

TEST(Serialization, EventLogRoundTrip) {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    Script script(seed);
    const auto events = script.events(10);
    const std::string log = write_event_log(events);
    const auto back = read_event_log(log);
    ASSERT_EQ(back.size(), events.size());
    EXPECT_EQ(write_event_log(back), log);
    EXPECT_EQ(digest(replay(back)), digest(play(events)));
    EXPECT_EQ(replay(back), play(events));
  }
}

TEST(Serialization, LedgerRoundTrip) {
  auto events = object_scene();
  events.push_back(UpdateEvent::inform(event("E_c"), 0.7, "Nobody"));
  events.push_back(UpdateEvent::assertion(event("E_c")));
  const Session s = play(events);
  EXPECT_EQ(ledger_from_json(to_json(s.ledger())), s.ledger());
}

TEST(Serialization, EventsRejectUnknownFields) {
  EXPECT_EQ(code_of([] { event_from_json(json{{"kind", "learn"}, {"propositions", {"E1"}}, {"beta", 0.1}}); }),
            ErrorCode::Schema);
  EXPECT_EQ(code_of([] { event_from_json(json{{"kind", "teleport"}}); }), ErrorCode::Schema);
  const auto ev = event_from_json(json{{"kind", "inform"}, {"proposition", "E_c"}, {"beta", 0.7}, {"source", "Nobody"}});
  EXPECT_EQ(event_from_json(to_json(ev)), ev);
}

TEST(Digest, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(digest(play(corridor())), digest(play(corridor())));
  EXPECT_NE(digest(play(corridor())), digest(play(object_scene())));
}
