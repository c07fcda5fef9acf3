#include "prmnav/engine.hpp"

#include <algorithm>

#include "prmnav/log.hpp"

namespace prmnav {

std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::dp: return "dp";
    case StrategyKind::topk_first: return "topk_first";
    case StrategyKind::guidnav: return "guidnav";
    case StrategyKind::oracle_topk: return "oracle_topk";
  }
  return "guidnav";
}

StrategyKind strategy_from_string(std::string_view s) {
  if (s == "dp") return StrategyKind::dp;
  if (s == "topk_first" || s == "topk") return StrategyKind::topk_first;
  if (s == "guidnav") return StrategyKind::guidnav;
  if (s == "oracle_topk") return StrategyKind::oracle_topk;
  throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

Strategy Strategy::make(StrategyKind kind, int k, std::optional<int> pass_n) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (pass_n && *pass_n < 1) throw ConfigError("pass_n must be >= 1");
  return {kind, kind == StrategyKind::dp ? 1 : k, pass_n};
}

int select(const CandidateSet& cands, std::span<const double> scores, const Strategy& strategy) {
  if (cands.empty()) throw ConfigError("cannot select from an empty candidate set");
  if (!strategy.uses_scores()) return 0;
  if (scores.size() != cands.size()) {
    throw ConfigError("got " + std::to_string(scores.size()) + " scores for " + std::to_string(cands.size()) +
                      " candidates");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return static_cast<int>(best);
}

std::string history_clause(const TrajectoryStep& step) {
  const auto& a = step.action;
  auto element = [&](std::uint32_t id) {
    std::string s = "element " + std::to_string(id);
    if (const auto* el = step.screen.find(id); el && !el->name.empty()) s += " (" + el->name + ")";
    return s;
  };
  switch (a.type) {
    case ActionType::click: return "clicked " + element(a.id.value_or(0));
    case ActionType::longpress: return "long-pressed " + element(a.id.value_or(0));
    case ActionType::type: {
      std::string s = "typed '" + a.text.value_or("") + "'";
      if (a.id) s += " into " + element(*a.id);
      return s;
    }
    case ActionType::scroll:
      return "scrolled " + std::string(a.direction ? to_string(*a.direction) : "?");
    case ActionType::navigate_home: return "went to the home screen";
    case ActionType::navigate_back: return "went back";
    case ActionType::enter: return "pressed enter";
    case ActionType::task_complete: return "marked the task complete";
  }
  return "did something";
}

std::string join_clauses_capped(const std::vector<std::string>& clauses, std::size_t cap) {
  constexpr std::string_view kSep = "; ";
  constexpr std::string_view kElided = "...; ";
  std::string out;
  // Newest clause first, prepending while the result fits.
  std::size_t used = 0;
  for (std::size_t n = 0; n < clauses.size(); ++n) {
    const auto& c = clauses[clauses.size() - 1 - n];
    const std::size_t extra = c.size() + (n == 0 ? 0 : kSep.size());
    const bool more_before = n + 1 < clauses.size();
    if (used + extra + (more_before ? kElided.size() : 0) > cap) {
      if (n == 0) {
        // A single clause longer than the cap keeps its tail.
        return c.size() <= cap ? c : c.substr(c.size() - cap);
      }
      return std::string(kElided) + out;
    }
    out = n == 0 ? c : c + std::string(kSep) + out;
    used += extra;
  }
  return out;
}

HistorySummary DeterministicSummarizer::summarize(const Trajectory& traj, Usage& /*usage*/) {
  std::vector<std::string> clauses;
  clauses.reserve(traj.steps.size());
  for (const auto& s : traj.steps) clauses.push_back(history_clause(s));
  return {join_clauses_capped(clauses, cap_), static_cast<int>(traj.steps.size())};
}

std::string WireSummarizer::render_prompt(const std::string& previous, const std::string& latest) {
  return "Summary of the previous actions so far:\n" + previous +
         "\nThe step just executed:\n" + latest +
         "\nRewrite the summary so it also covers the step just executed and the resulting screen state. "
         "Be brief and descriptive, and do not guess the next move.\nSummary:";
}

HistorySummary WireSummarizer::summarize(const Trajectory& traj, Usage& usage) {
  if (traj.steps.empty()) return {"", 0};
  const auto& last = traj.steps.back();
  try {
    auto reply = client_.complete(render_prompt(last.summary_before, history_clause(last)));
    usage += reply.usage;
    std::string text = reply.content;
    if (text.size() > cap_) text = text.substr(text.size() - cap_);
    return {text, static_cast<int>(traj.steps.size())};
  } catch (const Error& e) {
    log::warn(std::string("summarizer failed, using deterministic summary: ") + e.what());
    return fallback_.summarize(traj, usage);
  }
}

TrajectoryStep step(const EpisodeContext& ctx, const Observation& obs, const Trajectory& traj,
                    const std::optional<GroundTruthAction>& ground_truth) {
  const auto& space = ctx.task.space;
  TrajectoryStep rec;
  rec.screen_id = obs.screen_id;
  rec.screen = obs.screen;
  rec.ground_truth = ground_truth;

  const auto summary = ctx.summarizer.summarize(traj, rec.usage);
  rec.summary_before = summary.text;

  PolicyRequest req{ctx.task, summary.text, obs.screen, obs.screen_id, ctx.strategy.k, traj.steps.size(),
                    ctx.reflections, std::nullopt};
  std::optional<PolicyReply> reply;
  std::string policy_error;
  for (int attempt = 0; attempt < 2 && !reply; ++attempt) {
    try {
      reply = ctx.policy.propose(req);
    } catch (const Error& e) {
      policy_error = e.what();
      rec.notes.push_back("policy attempt " + std::to_string(attempt + 1) + " failed: " + policy_error);
      log::warn("policy call failed for task '" + ctx.task.id + "': " + policy_error);
    }
  }
  if (!reply) throw StepFailure("policy failure: " + policy_error);
  rec.usage += reply->usage;

  CandidateSet cands = std::move(reply->candidates);
  if (static_cast<int>(cands.size()) > ctx.strategy.k) {
    cands.candidates.resize(static_cast<std::size_t>(ctx.strategy.k));
    rec.notes.push_back("truncated candidates to k=" + std::to_string(ctx.strategy.k));
  }
  cands.k = ctx.strategy.k;
  std::erase_if(cands.candidates, [&](const Candidate& c) {
    auto v = validate_action(c.action, space);
    if (!v.empty()) rec.notes.push_back("dropped invalid candidate: " + v.front());
    return !v.empty();
  });
  if (cands.empty()) throw StepFailure("policy produced no valid candidates");
  rec.candidates = std::move(cands);

  const auto& list = rec.candidates.candidates;
  if (ctx.strategy.kind == StrategyKind::oracle_topk) {
    if (ground_truth) {
      for (const auto& c : list) {
        rec.scores.push_back(match_action(c.action, *ground_truth, obs.screen, ctx.config.match) ? 1.0 : 0.0);
      }
    } else {
      rec.degraded = true;
      rec.notes.push_back("no ground truth for this step; executing first candidate");
    }
  } else if (ctx.strategy.kind == StrategyKind::guidnav) {
    if (!ctx.reward) throw ConfigError("guidnav needs a reward backend");
    try {
      std::vector<double> scores;
      for (const auto& c : list) {
        RewardQuery q{ctx.task.instruction, summary.text, obs.screen, c.action, traj.steps.size(),
                      ground_truth ? &*ground_truth : nullptr};
        auto s = ctx.reward->score(q);
        rec.usage += s.usage;
        scores.push_back(s.value);
      }
      rec.scores = std::move(scores);
    } catch (const Error& e) {
      rec.degraded = true;
      rec.notes.push_back(std::string("reward failure, executing first candidate: ") + e.what());
      log::warn(std::string("reward backend failed: ") + e.what());
    }
  }

  if (!rec.scores.empty()) {
    rec.all_zero = std::all_of(rec.scores.begin(), rec.scores.end(), [](double s) { return s <= 0.0; });
    if (rec.all_zero) rec.notes.push_back("all candidates scored zero");
    rec.chosen_index = select(rec.candidates, rec.scores, ctx.strategy);
  } else {
    rec.chosen_index = 0;
  }
  rec.action = list[static_cast<std::size_t>(rec.chosen_index)].action;
  return rec;
}

namespace {

Trajectory start_trajectory(const EpisodeContext& ctx) {
  ctx.task.validate();
  if (ctx.strategy.kind == StrategyKind::guidnav && !ctx.reward) throw ConfigError("guidnav needs a reward backend");
  Trajectory t;
  t.task_id = ctx.task.id;
  t.instruction = ctx.task.instruction;
  t.space = ctx.task.space.name();
  t.max_turns = ctx.task.max_turns;
  t.strategy = ctx.strategy.name();
  t.seed = ctx.seed;
  return t;
}

}  // namespace

Trajectory run_episode(const EpisodeContext& ctx, Environment& env) {
  Trajectory traj = start_trajectory(ctx);
  const auto& space = ctx.task.space;
  Observation obs = env.reset();

  while (static_cast<int>(traj.steps.size()) < ctx.task.max_turns) {
    const int remaining = ctx.task.max_turns - static_cast<int>(traj.steps.size());
    TrajectoryStep rec;
    try {
      rec = step(ctx, obs, traj, env.ground_truth(remaining));
    } catch (const StepFailure& e) {
      traj.outcome = Outcome::failure;
      traj.failure_reason = e.what();
      return traj;
    }
    const Action action = rec.action;
    traj.steps.push_back(std::move(rec));

    if (action.type == ActionType::task_complete) {
      if (env.goal_reached()) {
        traj.outcome = Outcome::success;
      } else {
        traj.outcome = Outcome::failure;
        traj.failure_reason = "premature completion";
      }
      return traj;
    }
    try {
      obs = env.apply(action);
    } catch (const Error& e) {
      traj.outcome = Outcome::failure;
      traj.failure_reason = std::string("environment error: ") + e.what();
      return traj;
    }
    if (!space.has_task_complete() && env.goal_reached()) {
      traj.outcome = Outcome::success;
      return traj;
    }
  }
  traj.outcome = Outcome::truncated;
  traj.failure_reason = "max turns";
  return traj;
}

Trajectory run_static(const EpisodeContext& ctx, std::span<const StaticStep> steps) {
  Trajectory traj = start_trajectory(ctx);
  bool all_match = true;
  for (const auto& s : steps) {
    if (static_cast<int>(traj.steps.size()) >= ctx.task.max_turns) break;
    TrajectoryStep rec;
    try {
      rec = step(ctx, {s.screen_id, s.screen}, traj, s.ground_truth);
    } catch (const StepFailure& e) {
      traj.outcome = Outcome::failure;
      traj.failure_reason = e.what();
      return traj;
    }
    all_match = all_match && match_action(rec.action, s.ground_truth, s.screen, ctx.config.match);
    traj.steps.push_back(std::move(rec));
  }
  traj.outcome = all_match && traj.steps.size() == steps.size() ? Outcome::success : Outcome::failure;
  if (traj.outcome == Outcome::failure) traj.failure_reason = "mismatched steps";
  return traj;
}

PassAtNResult pass_at_n(const Task& task, Environment& env, const PolicyFactory& make_policy,
                        const RewardBackend* reward, Summarizer& summarizer, const Strategy& strategy,
                        const EngineConfig& config, std::span<const std::uint64_t> seeds) {
  const int n = strategy.pass_n.value_or(1);
  if (n < 1) throw ConfigError("pass_n must be >= 1");
  if (seeds.size() < static_cast<std::size_t>(n)) {
    throw ConfigError("pass@" + std::to_string(n) + " needs " + std::to_string(n) + " seeds, got " +
                      std::to_string(seeds.size()));
  }
  PassAtNResult result;
  for (int i = 0; i < n; ++i) {
    const auto seed = seeds[static_cast<std::size_t>(i)];
    auto policy = make_policy(seed);
    EpisodeContext ctx{task, *policy, reward, summarizer, strategy, config, {}, seed};
    Trajectory t;
    try {
      t = run_episode(ctx, env);
    } catch (const Error& e) {
      t.task_id = task.id;
      t.outcome = Outcome::failure;
      t.failure_reason = e.what();
    }
    result.success = result.success || t.outcome == Outcome::success;
    result.trials.push_back(std::move(t));
  }
  return result;
}

}  // namespace prmnav
