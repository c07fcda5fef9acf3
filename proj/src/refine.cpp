#include "prmnav/refine.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "prmnav/log.hpp"

namespace prmnav {

Verdict SimEvaluator::evaluate(const Trajectory& traj, const Task& /*task*/, const Environment& env) {
  if (traj.outcome == Outcome::success && env.goal_reached()) return {true, ""};
  switch (traj.outcome) {
    case Outcome::truncated: return {false, "max turns"};
    case Outcome::failure:
      return {false, traj.failure_reason.empty() ? std::string("goal not reached") : traj.failure_reason};
    case Outcome::running: return {false, "episode did not finish"};
    case Outcome::success: return {false, "goal not reached"};
  }
  return {false, "goal not reached"};
}

Verdict parse_verdict(const std::string& reply) {
  std::string s = reply;
  s.erase(0, s.find_first_not_of(" \t\r\n"));
  std::string head;
  for (char c : s.substr(0, 7)) head.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  auto rest = [&](std::size_t n) {
    std::string r = s.substr(n);
    r.erase(0, r.find_first_not_of(" \t\r\n:.-"));
    while (!r.empty() && std::isspace(static_cast<unsigned char>(r.back()))) r.pop_back();
    return r;
  };
  if (head == "SUCCESS") return {true, ""};
  if (head == "FAILURE") {
    auto reason = rest(7);
    return {false, reason.empty() ? std::string("unknown") : reason};
  }
  throw ParseError("evaluator reply does not start with SUCCESS or FAILURE");
}

std::string WireEvaluator::render_prompt(const Trajectory& traj, const Task& task) {
  std::ostringstream os;
  os << "Task: " << task.instruction << "\nSteps taken:\n";
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    os << i + 1 << ". on screen '" << traj.steps[i].screen_id << "': " << history_clause(traj.steps[i]) << "\n";
  }
  os << "Did these steps accomplish the task? Answer SUCCESS or FAILURE on the first line, then a one-sentence reason.";
  return os.str();
}

Verdict WireEvaluator::evaluate(const Trajectory& traj, const Task& task, const Environment& /*env*/) {
  return parse_verdict(client_.complete(render_prompt(traj, task)).content);
}

ReflectionThought DefaultReflector::reflect(const Trajectory& traj, const Task& /*task*/, const Verdict& verdict,
                                            int round) {
  std::vector<std::string> clauses;
  for (const auto& s : traj.steps) clauses.push_back(describe(s.action));

  std::ostringstream os;
  os << "Attempt " << round << " failed";
  if (!verdict.reason.empty()) os << ": " << verdict.reason;
  os << ". Last actions: ";
  const std::size_t from = clauses.size() > 3 ? clauses.size() - 3 : 0;
  if (from == clauses.size()) os << "none";
  for (std::size_t i = from; i < clauses.size(); ++i) os << (i > from ? "; " : "") << clauses[i];
  os << ".";

  if (!clauses.empty()) {
    std::map<std::string, int> counts;
    for (const auto& c : clauses) ++counts[c];
    // Most frequent; ties go to the most recent.
    std::string worst = clauses.back();
    for (auto it = clauses.rbegin(); it != clauses.rend(); ++it) {
      if (counts[*it] > counts[worst]) worst = *it;
    }
    os << " Try a different approach; avoid repeating: " << worst << ".";
  }

  ReflectionThought t;
  t.text = os.str();
  t.round = round;
  t.verdict_of_previous = verdict.reason.empty() || verdict.reason == "unknown" ? CauseKnown::unknown
                                                                                 : CauseKnown::failure_cause_identified;
  return t;
}

ReflectionThought WireReflector::reflect(const Trajectory& traj, const Task& task, const Verdict& verdict, int round) {
  try {
    std::ostringstream os;
    os << WireEvaluator::render_prompt(traj, task) << "\nThe attempt failed";
    if (!verdict.reason.empty()) os << " (" << verdict.reason << ")";
    os << ". In at most three sentences, state what went wrong and what to do differently next time.";
    auto reply = client_.complete(os.str());
    if (reply.content.find_first_not_of(" \t\r\n") == std::string::npos) throw ParseError("empty reflection");
    return {reply.content, round,
            verdict.reason.empty() ? CauseKnown::unknown : CauseKnown::failure_cause_identified};
  } catch (const Error& e) {
    log::warn(std::string("reflection backend failed, using default reflector: ") + e.what());
    return fallback_.reflect(traj, task, verdict, round);
  }
}

ReflectionThought reflect(Reflector& reflector, const Trajectory& traj, const Task& task, const Verdict& verdict,
                          int round) {
  if (verdict.success) throw ConfigError("cannot reflect on a successful trajectory");
  if (round < 1) throw ConfigError("reflection round must be >= 1");
  return reflector.reflect(traj, task, verdict, round);
}

int FinalOutcome::total_turns() const {
  int n = 0;
  for (const auto& r : rounds) n += static_cast<int>(r.trajectory.steps.size());
  return n;
}

Usage FinalOutcome::total_usage() const {
  Usage u;
  for (const auto& r : rounds) u += r.trajectory.total_usage();
  return u;
}

FinalOutcome run_with_retries(const Task& task, Environment& env, const PolicyFactory& make_policy,
                              const RewardBackend* reward, Summarizer& summarizer, const Strategy& strategy,
                              const EngineConfig& config, TrajectoryEvaluator& evaluator, Reflector& reflector,
                              const RetryConfig& retry) {
  if (retry.max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
  FinalOutcome out;
  std::vector<std::string> reflections;
  for (int round = 1; round <= retry.max_rounds; ++round) {
    RoundRecord rec;
    rec.round = round;
    rec.seed = retry.seed + static_cast<std::uint64_t>(round - 1);
    auto policy = make_policy(rec.seed);
    EpisodeContext ctx{task, *policy, reward, summarizer, strategy, config, reflections, rec.seed};
    try {
      rec.trajectory = run_episode(ctx, env);
      rec.verdict = evaluator.evaluate(rec.trajectory, task, env);
    } catch (const Error& e) {
      rec.trajectory.task_id = task.id;
      rec.trajectory.outcome = Outcome::failure;
      rec.trajectory.failure_reason = e.what();
      rec.verdict = {false, e.what()};
    }
    out.rounds_used = round;
    if (rec.verdict.success) {
      out.success = true;
      out.rounds.push_back(std::move(rec));
      break;
    }
    // Also reflect after the last round so every failure has an audit record.
    rec.reflection = reflect(reflector, rec.trajectory, task, rec.verdict, round);
    reflections.push_back(rec.reflection->text);
    if (reflections.size() > kMaxReflections) reflections.erase(reflections.begin());
    out.rounds.push_back(std::move(rec));
  }
  return out;
}

}  // namespace prmnav
