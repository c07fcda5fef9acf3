#include <gtest/gtest.h>

#include <fstream>

#include "prmnav/error.hpp"
#include "prmnav/refine.hpp"
#include "prmnav/simenv.hpp"

using namespace prmnav;

namespace {

std::string fixture(const std::string& name) { return std::string(PRMNAV_FIXTURES) + "/" + name; }

struct UnlockSuite {
  sim::TaskScript script = sim::load_task_script(fixture("reflection_unlock.json"));
  ScriptedPolicy policy = load_policy();

  ScriptedPolicy load_policy() const {
    std::ifstream in(fixture("reflection_unlock_policy.json"));
    std::map<std::string, ActionSpace> spaces;
    for (const auto& t : script.tasks) spaces.emplace(t.task.id, t.task.space);
    return ScriptedPolicy::from_json(nlohmann::json::parse(in), spaces);
  }

  PolicyFactory factory() const {
    return [this](std::uint64_t) { return std::make_unique<ScriptedPolicy>(policy); };
  }

  FinalOutcome run(const std::string& id, int rounds) const {
    const auto& st = script.task(id);
    sim::SimEnv env(script.app, st);
    DeterministicSummarizer summ;
    SimEvaluator eval;
    DefaultReflector refl;
    return run_with_retries(st.task, env, factory(), nullptr, summ, Strategy::make(StrategyKind::dp), {}, eval, refl,
                            {rounds, 100});
  }
};

Trajectory scrolling_trajectory(int n) {
  Trajectory t;
  t.task_id = "t";
  for (int i = 0; i < n; ++i) {
    TrajectoryStep s;
    s.action = i == 0 ? Action::click(4) : Action::scroll(Direction::down);
    t.steps.push_back(s);
  }
  t.outcome = Outcome::truncated;
  t.failure_reason = "max turns";
  return t;
}

Task task() { return {"t", "Open the calculator", ActionSpace::aitw(), "t", 6}; }

}  // namespace

TEST(ParseVerdict, Forms) {
  EXPECT_TRUE(parse_verdict("SUCCESS").success);
  EXPECT_TRUE(parse_verdict("  success: the results page is open").success);
  auto f = parse_verdict("FAILURE: never pressed enter\n");
  EXPECT_FALSE(f.success);
  EXPECT_EQ(f.reason, "never pressed enter");
  EXPECT_EQ(parse_verdict("Failure").reason, "unknown");
  EXPECT_THROW(parse_verdict("I think it worked"), ParseError);
  EXPECT_THROW(parse_verdict(""), ParseError);
}

TEST(SimEvaluator, VerdictMatchesGoal) {
  auto script = sim::load_task_script(fixture("search_app.json"));
  const auto& st = script.tasks[0];
  sim::SimEnv env(script.app, st);
  SimEvaluator eval;
  Trajectory t;
  t.outcome = Outcome::success;
  env.reset();
  EXPECT_FALSE(eval.evaluate(t, st.task, env).success);  // claimed success, goal not reached
  for (std::size_t i = 0; i + 1 < st.demo.size(); ++i) env.apply(st.demo[i]);
  EXPECT_TRUE(eval.evaluate(t, st.task, env).success);
  t.outcome = Outcome::truncated;
  EXPECT_EQ(eval.evaluate(t, st.task, env).reason, "max turns");
}

TEST(DefaultReflector, NamesRepeatedAction) {
  DefaultReflector r;
  auto th = reflect(r, scrolling_trajectory(6), task(), {false, "max turns"}, 1);
  EXPECT_NE(th.text.find("avoid repeating: scroll down"), std::string::npos) << th.text;
  EXPECT_NE(th.text.find("max turns"), std::string::npos);
  EXPECT_EQ(th.round, 1);
  EXPECT_EQ(th.verdict_of_previous, CauseKnown::failure_cause_identified);
  auto empty = reflect(r, Trajectory{}, task(), {false, ""}, 2);
  EXPECT_EQ(empty.verdict_of_previous, CauseKnown::unknown);
  EXPECT_NE(empty.text.find("none"), std::string::npos);
}

TEST(DefaultReflector, PreconditionErrors) {
  DefaultReflector r;
  EXPECT_THROW(reflect(r, scrolling_trajectory(2), task(), {true, ""}, 1), ConfigError);
  EXPECT_THROW(reflect(r, scrolling_trajectory(2), task(), {false, "x"}, 0), ConfigError);
}

TEST(RunWithRetries, FirstRoundSuccess) {
  UnlockSuite s;
  auto out = s.run("open_notes", 3);
  EXPECT_TRUE(out.success);
  EXPECT_EQ(out.rounds_used, 1);
  ASSERT_EQ(out.rounds.size(), 1u);
  EXPECT_FALSE(out.rounds[0].reflection.has_value());
  EXPECT_EQ(out.rounds[0].seed, 100u);
}

TEST(RunWithRetries, ReflectionUnlocksRoundTwo) {
  UnlockSuite s;
  auto out = s.run("open_calculator", 3);
  EXPECT_TRUE(out.success);
  EXPECT_EQ(out.rounds_used, 2);
  ASSERT_EQ(out.rounds.size(), 2u);
  EXPECT_FALSE(out.rounds[0].verdict.success);
  EXPECT_EQ(out.rounds[0].verdict.reason, "premature completion");
  ASSERT_TRUE(out.rounds[0].reflection.has_value());
  EXPECT_EQ(out.rounds[0].reflection->round, 1);
  EXPECT_TRUE(out.rounds[1].verdict.success);
  EXPECT_EQ(out.rounds[1].seed, 101u);
  EXPECT_EQ(out.total_turns(), static_cast<int>(out.rounds[0].trajectory.steps.size() +
                                                 out.rounds[1].trajectory.steps.size()));

  auto one = s.run("open_calculator", 1);
  EXPECT_FALSE(one.success);
  EXPECT_EQ(one.rounds_used, 1);
}

TEST(RunWithRetries, ExhaustsRounds) {
  UnlockSuite s;
  auto out = s.run("open_weather", 3);
  EXPECT_FALSE(out.success);
  EXPECT_EQ(out.rounds_used, 3);
  ASSERT_EQ(out.rounds.size(), 3u);
  for (int r = 0; r < 3; ++r) {
    EXPECT_EQ(out.rounds[static_cast<std::size_t>(r)].round, r + 1);
    ASSERT_TRUE(out.rounds[static_cast<std::size_t>(r)].reflection.has_value());
    EXPECT_EQ(out.rounds[static_cast<std::size_t>(r)].reflection->round, r + 1);
  }
}

TEST(RunWithRetries, ReflectionsReachThePolicy) {
  UnlockSuite s;
  const auto& st = s.script.task("open_weather");
  sim::SimEnv env(s.script.app, st);
  std::vector<std::vector<std::string>> seen;
  struct Spy final : PolicyBackend {
    std::vector<std::vector<std::string>>* seen;
    PolicyReply propose(const PolicyRequest& req) override {
      if (req.step_index == 0) seen->push_back(req.reflections);
      CandidateSet c;
      c.k = 1;
      c.candidates = {{Action::bare(ActionType::task_complete), "", 1.0, false}};
      return {c, {}};
    }
  };
  PolicyFactory make = [&](std::uint64_t) {
    auto p = std::make_unique<Spy>();
    p->seen = &seen;
    return p;
  };
  DeterministicSummarizer summ;
  SimEvaluator eval;
  DefaultReflector refl;
  auto out = run_with_retries(st.task, env, make, nullptr, summ, Strategy::make(StrategyKind::dp), {}, eval, refl,
                              {5, 0});
  ASSERT_EQ(seen.size(), 5u);
  EXPECT_TRUE(seen[0].empty());
  EXPECT_EQ(seen[1].size(), 1u);
  EXPECT_EQ(seen[2].size(), 2u);
  EXPECT_EQ(seen[3].size(), 3u);
  EXPECT_EQ(seen[4].size(), 3u);  // capped, oldest dropped
  EXPECT_EQ(seen[4][0], out.rounds[1].reflection->text);
  EXPECT_THROW(run_with_retries(st.task, env, make, nullptr, summ, Strategy::make(StrategyKind::dp), {}, eval, refl,
                                {0, 0}),
               ConfigError);
}

TEST(RunWithRetries, MonotoneInRounds) {
  UnlockSuite s;
  int prev = -1;
  for (int m = 1; m <= 3; ++m) {
    int wins = 0;
    for (const auto& t : s.script.tasks) wins += s.run(t.task.id, m).success ? 1 : 0;
    EXPECT_GE(wins, prev);
    prev = wins;
  }
  EXPECT_EQ(prev, 3);
}
