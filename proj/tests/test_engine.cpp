#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "prmnav/engine.hpp"
#include "prmnav/error.hpp"
#include "prmnav/simenv.hpp"
#include "prmnav/suite.hpp"

using namespace prmnav;

namespace {

std::string fixture(const std::string& name) { return std::string(PRMNAV_FIXTURES) + "/" + name; }

CandidateSet set_of(std::vector<Action> actions) {
  CandidateSet s;
  s.k = static_cast<int>(actions.size());
  for (auto& a : actions) s.candidates.push_back({std::move(a), "", 1.0 / static_cast<double>(s.k), false});
  return s;
}

// Policy driven by a callback; counts calls and records the k it was asked for.
class FnPolicy final : public PolicyBackend {
 public:
  using Fn = std::function<CandidateSet(const PolicyRequest&, int call)>;
  explicit FnPolicy(Fn fn) : fn_(std::move(fn)) {}
  PolicyReply propose(const PolicyRequest& req) override {
    ++calls;
    requested_k.push_back(req.k);
    return {fn_(req, calls), {10, 5}};
  }
  int calls = 0;
  std::vector<int> requested_k;

 private:
  Fn fn_;
};

class FailingReward final : public RewardBackend {
 public:
  RewardScore score(const RewardQuery&) const override { throw TransportError("reward endpoint down"); }
};

class ConstReward final : public RewardBackend {
 public:
  explicit ConstReward(std::vector<double> by_index) : v_(std::move(by_index)) {}
  RewardScore score(const RewardQuery& q) const override {
    // scores keyed by clicked element id
    return {v_.at(q.action.id.value_or(0)), {1, 1}};
  }

 private:
  std::vector<double> v_;
};

LabeledScreen screen() {
  std::vector<ElementBox> boxes{{{0, 0, 540, 200}, "Search"}, {{0, 400, 540, 600}, "Chrome"},
                                {{540, 400, 1080, 600}, "Maps"}};
  return assign_labels(boxes, {1080, 1920});
}

Task aitw_task(int max_turns = 6) { return {"t", "Search for walmart", ActionSpace::aitw(), "t", max_turns}; }

}  // namespace

TEST(Select, ArgmaxAndTies) {
  auto c = set_of({Action::click(0), Action::click(1), Action::click(2)});
  const auto g = Strategy::make(StrategyKind::guidnav);
  EXPECT_EQ(select(c, std::vector<double>{0.3, 0.9, 0.4}, g), 1);
  EXPECT_EQ(select(c, std::vector<double>{0.9, 0.9, 0.1}, g), 0);
  EXPECT_EQ(select(c, std::vector<double>{0.1, 0.5, 0.5}, g), 1);
  EXPECT_EQ(select(c, std::vector<double>{0.3, 0.9, 0.4}, Strategy::make(StrategyKind::topk_first)), 0);
  EXPECT_EQ(select(c, {}, Strategy::make(StrategyKind::topk_first)), 0);
  EXPECT_THROW(select(c, std::vector<double>{0.1}, g), ConfigError);
  EXPECT_THROW(select(CandidateSet{}, {}, g), ConfigError);
}

TEST(Select, TieRuleAgainstEnumeration) {
  std::mt19937 rng(5);
  const auto g = Strategy::make(StrategyKind::oracle_topk);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 3;
    std::vector<Action> acts;
    std::vector<double> scores;
    for (std::size_t i = 0; i < n; ++i) {
      acts.push_back(Action::click(static_cast<std::uint32_t>(i)));
      scores.push_back(static_cast<double>(rng() % 3) / 2.0);
    }
    // first index whose score is not beaten by any other
    std::size_t expect = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool best = true;
      for (std::size_t j = 0; j < n; ++j) best = best && scores[j] <= scores[i];
      if (best) {
        expect = i;
        break;
      }
    }
    const int got = select(set_of(acts), scores, g);
    EXPECT_EQ(got, static_cast<int>(expect));
    // strictly increasing transform leaves the choice alone
    std::vector<double> t;
    for (double s : scores) t.push_back(std::exp(3 * s) - 7);
    EXPECT_EQ(select(set_of(acts), t, g), got);
  }
}

TEST(Strategy, DpForcesSingleCandidate) {
  EXPECT_EQ(Strategy::make(StrategyKind::dp, 3).k, 1);
  EXPECT_EQ(Strategy::make(StrategyKind::guidnav, 3).k, 3);
  EXPECT_THROW(Strategy::make(StrategyKind::guidnav, 0), ConfigError);
  EXPECT_THROW(Strategy::make(StrategyKind::guidnav, 3, 0), ConfigError);
  EXPECT_EQ(strategy_from_string("topk_first"), StrategyKind::topk_first);
  EXPECT_THROW(strategy_from_string("beam"), ConfigError);
  for (auto k : {StrategyKind::dp, StrategyKind::topk_first, StrategyKind::guidnav, StrategyKind::oracle_topk}) {
    EXPECT_EQ(strategy_from_string(to_string(k)), k);
  }
}

TEST(History, ClausesInOrder) {
  DeterministicSummarizer summ;
  Trajectory traj;
  Usage u;
  EXPECT_EQ(summ.summarize(traj, u).text, "");
  EXPECT_EQ(summ.summarize(traj, u).turns_covered, 0);
  TrajectoryStep a;
  a.screen = screen();
  a.action = Action::click(0);
  TrajectoryStep b;
  b.screen = screen();
  b.action = Action::type_text("walmart");
  traj.steps = {a, b};
  auto h = summ.summarize(traj, u);
  EXPECT_EQ(h.text, "clicked element 0 (Search); typed 'walmart'");
  EXPECT_EQ(h.turns_covered, 2);
  EXPECT_EQ(u, (Usage{}));
}

TEST(History, CapKeepsRecentSteps) {
  DeterministicSummarizer summ(1000);
  Trajectory traj;
  for (int i = 0; i < 50; ++i) {
    TrajectoryStep s;
    s.screen = screen();
    s.action = Action::type_text("query number " + std::to_string(i) + " with some padding text");
    traj.steps.push_back(s);
  }
  Usage u;
  auto h = summ.summarize(traj, u);
  EXPECT_LE(h.text.size(), 1000u);
  EXPECT_NE(h.text.find("query number 49 "), std::string::npos);
  EXPECT_EQ(h.text.find("query number 0 "), std::string::npos);
  EXPECT_EQ(h.text.rfind("typed 'query number 49 with some padding text'"),
            h.text.size() - std::string("typed 'query number 49 with some padding text'").size());

  for (std::size_t cap : {0u, 5u, 40u, 41u, 100u, 333u}) {
    std::vector<std::string> clauses{"aaaaaaaaaa", "bbbbbbbbbbbbbbbbbbbb", "cccccccccccccccccccccccccccccc"};
    EXPECT_LE(join_clauses_capped(clauses, cap).size(), cap) << cap;
  }
}

TEST(Step, GuidnavPicksOracleMatch) {
  const Task t = aitw_task();
  FnPolicy p([](const PolicyRequest&, int) {
    return set_of({Action::scroll(Direction::down), Action::click(0), Action::click(2)});
  });
  OracleReward reward;
  DeterministicSummarizer summ;
  const auto s = screen();
  const auto gt = to_ground_truth(Action::click(0), s);
  EpisodeContext ctx{t, p, &reward, summ, Strategy::make(StrategyKind::guidnav), {}, {}, 0};
  auto rec = step(ctx, {"home", s}, Trajectory{}, gt);
  EXPECT_EQ(rec.scores, (std::vector<double>{0, 1, 0}));
  EXPECT_EQ(rec.chosen_index, 1);
  EXPECT_EQ(rec.action, Action::click(0));
  EXPECT_EQ(rec.usage, (Usage{10, 5}));

  EpisodeContext octx{t, p, nullptr, summ, Strategy::make(StrategyKind::oracle_topk), {}, {}, 0};
  auto orec = step(octx, {"home", s}, Trajectory{}, gt);
  EXPECT_EQ(orec.scores, rec.scores);
  EXPECT_EQ(orec.chosen_index, 1);
}

TEST(Step, DpRequestsOneCandidate) {
  const Task t = aitw_task();
  FnPolicy p([](const PolicyRequest& r, int) {
    std::vector<Action> acts{Action::click(1), Action::click(2), Action::click(0)};
    acts.resize(static_cast<std::size_t>(r.k));
    return set_of(acts);
  });
  DeterministicSummarizer summ;
  EpisodeContext ctx{t, p, nullptr, summ, Strategy::make(StrategyKind::dp, 3), {}, {}, 0};
  auto rec = step(ctx, {"home", screen()}, Trajectory{}, std::nullopt);
  EXPECT_EQ(p.requested_k, std::vector<int>{1});
  EXPECT_EQ(rec.candidates.size(), 1u);
  EXPECT_EQ(rec.action, Action::click(1));
  EXPECT_TRUE(rec.scores.empty());
}

TEST(Step, TruncatesAndDropsInvalid) {
  const Task t = aitw_task();
  FnPolicy p([](const PolicyRequest&, int) {
    return set_of({Action::longpress(0), Action::click(2), Action::click(1), Action::click(0)});
  });
  DeterministicSummarizer summ;
  EpisodeContext ctx{t, p, nullptr, summ, Strategy::make(StrategyKind::topk_first, 3), {}, {}, 0};
  auto rec = step(ctx, {"home", screen()}, Trajectory{}, std::nullopt);
  ASSERT_EQ(rec.candidates.size(), 2u);  // cut to 3, then longpress dropped
  EXPECT_EQ(rec.action, Action::click(2));
  EXPECT_EQ(rec.notes.size(), 2u);

  FnPolicy bad([](const PolicyRequest&, int) { return set_of({Action::longpress(0)}); });
  EpisodeContext bctx{t, bad, nullptr, summ, Strategy::make(StrategyKind::topk_first, 3), {}, {}, 0};
  EXPECT_THROW(step(bctx, {"home", screen()}, Trajectory{}, std::nullopt), StepFailure);
}

TEST(Step, PolicyRetriedOnceThenFails) {
  const Task t = aitw_task();
  FnPolicy flaky([](const PolicyRequest&, int call) {
    if (call == 1) throw ParseError("garbled reply");
    return set_of({Action::click(0)});
  });
  DeterministicSummarizer summ;
  EpisodeContext ctx{t, flaky, nullptr, summ, Strategy::make(StrategyKind::topk_first), {}, {}, 0};
  auto rec = step(ctx, {"home", screen()}, Trajectory{}, std::nullopt);
  EXPECT_EQ(flaky.calls, 2);
  EXPECT_EQ(rec.action, Action::click(0));
  EXPECT_FALSE(rec.notes.empty());

  FnPolicy dead([](const PolicyRequest&, int) -> CandidateSet { throw TransportError("down"); });
  EpisodeContext dctx{t, dead, nullptr, summ, Strategy::make(StrategyKind::topk_first), {}, {}, 0};
  EXPECT_THROW(step(dctx, {"home", screen()}, Trajectory{}, std::nullopt), StepFailure);
  EXPECT_EQ(dead.calls, 2);
}

TEST(Step, RewardFailureDegrades) {
  const Task t = aitw_task();
  FnPolicy p([](const PolicyRequest&, int) { return set_of({Action::click(2), Action::click(0)}); });
  FailingReward reward;
  DeterministicSummarizer summ;
  EpisodeContext ctx{t, p, &reward, summ, Strategy::make(StrategyKind::guidnav), {}, {}, 0};
  auto rec = step(ctx, {"home", screen()}, Trajectory{}, std::nullopt);
  EXPECT_TRUE(rec.degraded);
  EXPECT_EQ(rec.chosen_index, 0);
  EXPECT_EQ(rec.action, Action::click(2));

  EpisodeContext octx{t, p, nullptr, summ, Strategy::make(StrategyKind::oracle_topk), {}, {}, 0};
  auto orec = step(octx, {"home", screen()}, Trajectory{}, std::nullopt);
  EXPECT_TRUE(orec.degraded);
  EXPECT_EQ(orec.chosen_index, 0);

  EpisodeContext nctx{t, p, nullptr, summ, Strategy::make(StrategyKind::guidnav), {}, {}, 0};
  EXPECT_THROW(step(nctx, {"home", screen()}, Trajectory{}, std::nullopt), ConfigError);
}

TEST(Step, AllZeroScoresStillExecute) {
  const Task t = aitw_task();
  FnPolicy p([](const PolicyRequest&, int) { return set_of({Action::click(1), Action::click(2)}); });
  ConstReward reward({0, 0, 0});
  DeterministicSummarizer summ;
  EpisodeContext ctx{t, p, &reward, summ, Strategy::make(StrategyKind::guidnav), {}, {}, 0};
  auto rec = step(ctx, {"home", screen()}, Trajectory{}, std::nullopt);
  EXPECT_TRUE(rec.all_zero);
  EXPECT_EQ(rec.chosen_index, 0);
  EXPECT_EQ(rec.usage, (Usage{12, 7}));
}

TEST(RunEpisode, DemoPolicySucceeds) {
  auto script = sim::load_task_script(fixture("search_app.json"));
  const auto& st = script.tasks[0];
  FnPolicy p([&](const PolicyRequest& r, int) { return set_of({st.demo.at(r.step_index)}); });
  DeterministicSummarizer summ;
  sim::SimEnv env(script.app, st);
  EpisodeContext ctx{st.task, p, nullptr, summ, Strategy::make(StrategyKind::dp), {}, {}, 7};
  auto traj = run_episode(ctx, env);
  EXPECT_EQ(traj.outcome, Outcome::success);
  EXPECT_EQ(traj.steps.size(), st.demo.size());
  EXPECT_EQ(traj.seed, 7u);
  EXPECT_EQ(traj.steps[2].summary_before, "clicked element 0 (Search bar); typed 'walmart'");
}

TEST(RunEpisode, ScrollingTruncates) {
  auto script = sim::load_task_script(fixture("search_app.json"));
  const auto& st = script.tasks[0];
  FnPolicy p([](const PolicyRequest&, int) { return set_of({Action::scroll(Direction::down)}); });
  DeterministicSummarizer summ;
  sim::SimEnv env(script.app, st);
  EpisodeContext ctx{st.task, p, nullptr, summ, Strategy::make(StrategyKind::dp), {}, {}, 0};
  auto traj = run_episode(ctx, env);
  EXPECT_EQ(traj.outcome, Outcome::truncated);
  EXPECT_EQ(static_cast<int>(traj.steps.size()), st.task.max_turns);
  EXPECT_EQ(traj.failure_reason, "max turns");
}

TEST(RunEpisode, PrematureCompletionFails) {
  auto script = sim::load_task_script(fixture("search_app.json"));
  const auto& st = script.tasks[0];
  FnPolicy p([](const PolicyRequest& r, int) {
    return set_of({r.step_index == 0 ? Action::click(0) : Action::bare(ActionType::task_complete)});
  });
  DeterministicSummarizer summ;
  sim::SimEnv env(script.app, st);
  EpisodeContext ctx{st.task, p, nullptr, summ, Strategy::make(StrategyKind::dp), {}, {}, 0};
  auto traj = run_episode(ctx, env);
  EXPECT_EQ(traj.outcome, Outcome::failure);
  EXPECT_EQ(traj.failure_reason, "premature completion");
  EXPECT_EQ(traj.steps.size(), 2u);
  EXPECT_FALSE(env.goal_reached());
}

TEST(RunEpisode, PolicyAbortIsFailure) {
  auto script = sim::load_task_script(fixture("search_app.json"));
  const auto& st = script.tasks[0];
  FnPolicy p([](const PolicyRequest& r, int) -> CandidateSet {
    if (r.step_index == 1) throw TransportError("gone");
    return set_of({Action::click(0)});
  });
  DeterministicSummarizer summ;
  sim::SimEnv env(script.app, st);
  EpisodeContext ctx{st.task, p, nullptr, summ, Strategy::make(StrategyKind::dp), {}, {}, 0};
  auto traj = run_episode(ctx, env);
  EXPECT_EQ(traj.outcome, Outcome::failure);
  EXPECT_EQ(traj.steps.size(), 1u);
  EXPECT_NE(traj.failure_reason.find("gone"), std::string::npos);
}

TEST(RunEpisode, NeverExceedsMaxTurns) {
  auto script = sim::load_task_script(fixture("suite_aitw.json"));
  DeterministicSummarizer summ;
  OracleReward reward;
  for (const auto& st : script.tasks) {
    sim::SimEnv env(script.app, st);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      for (auto kind : {StrategyKind::dp, StrategyKind::topk_first, StrategyKind::guidnav}) {
        NoisyExpertPolicy p(env_expert(env), {}, seed);
        EpisodeContext ctx{st.task, p, &reward, summ, Strategy::make(kind), {}, {}, seed};
        auto traj = run_episode(ctx, env);
        EXPECT_LE(static_cast<int>(traj.steps.size()), st.task.max_turns);
        EXPECT_NE(traj.outcome, Outcome::running);
        if (traj.outcome == Outcome::success) EXPECT_TRUE(env.goal_reached());
      }
    }
  }
}

TEST(RunStatic, SuccessIffAllMatch) {
  auto script = sim::load_task_script(fixture("suite_mind2web.json"));
  const auto& st = script.tasks[0];
  auto steps = static_replay_steps(*script.app, st);
  ASSERT_EQ(steps.size(), st.demo.size());
  DeterministicSummarizer summ;
  FnPolicy good([&](const PolicyRequest& r, int) { return set_of({st.demo.at(r.step_index)}); });
  EpisodeContext ctx{st.task, good, nullptr, summ, Strategy::make(StrategyKind::dp), {}, {}, 0};
  auto traj = run_static(ctx, steps);
  EXPECT_EQ(traj.outcome, Outcome::success);
  EXPECT_EQ(traj.steps.size(), steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) EXPECT_EQ(traj.steps[i].ground_truth, steps[i].ground_truth);

  FnPolicy off([&](const PolicyRequest& r, int) {
    if (r.step_index == steps.size() - 1) return set_of({Action::type_text("zzzz", 0)});
    return set_of({st.demo.at(r.step_index)});
  });
  EpisodeContext octx{st.task, off, nullptr, summ, Strategy::make(StrategyKind::dp), {}, {}, 0};
  auto bad = run_static(octx, steps);
  EXPECT_EQ(bad.outcome, Outcome::failure);
  EXPECT_EQ(bad.steps.size(), steps.size());  // static replay does not stop early
}

TEST(PassAtN, AnyTrialSucceeds) {
  auto script = sim::load_task_script(fixture("search_app.json"));
  const auto& st = script.tasks[0];
  sim::SimEnv env(script.app, st);
  DeterministicSummarizer summ;
  // seed 1 follows the demo, other seeds scroll forever
  PolicyFactory make = [&](std::uint64_t seed) -> std::unique_ptr<PolicyBackend> {
    return std::make_unique<FnPolicy>([&st, seed](const PolicyRequest& r, int) {
      return set_of({seed == 1 ? st.demo.at(r.step_index) : Action::scroll(Direction::down)});
    });
  };
  const std::vector<std::uint64_t> seeds{0, 1, 2};
  auto r = pass_at_n(st.task, env, make, nullptr, summ, Strategy::make(StrategyKind::dp, 1, 3), {}, seeds);
  EXPECT_TRUE(r.success);
  ASSERT_EQ(r.trials.size(), 3u);
  EXPECT_NE(r.trials[0].outcome, Outcome::success);
  EXPECT_EQ(r.trials[1].outcome, Outcome::success);
  EXPECT_NE(r.trials[2].outcome, Outcome::success);

  auto one = pass_at_n(st.task, env, make, nullptr, summ, Strategy::make(StrategyKind::dp), {}, seeds);
  EXPECT_FALSE(one.success);
  ASSERT_EQ(one.trials.size(), 1u);
  FnPolicy direct([](const PolicyRequest&, int) { return set_of({Action::scroll(Direction::down)}); });
  EpisodeContext ctx{st.task, direct, nullptr, summ, Strategy::make(StrategyKind::dp), {}, {}, 0};
  EXPECT_EQ(trajectory_to_jsonl(one.trials[0]), trajectory_to_jsonl(run_episode(ctx, env)));

  const std::vector<std::uint64_t> short_seeds{0};
  EXPECT_THROW(pass_at_n(st.task, env, make, nullptr, summ, Strategy::make(StrategyKind::dp, 1, 3), {}, short_seeds),
               ConfigError);
}
