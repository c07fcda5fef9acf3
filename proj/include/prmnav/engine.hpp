#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prmnav/environment.hpp"
#include "prmnav/error.hpp"
#include "prmnav/matcher.hpp"
#include "prmnav/policy.hpp"
#include "prmnav/reward.hpp"
#include "prmnav/trajectory.hpp"
#include "prmnav/wire.hpp"

namespace prmnav {

// dp: one candidate, executed as-is. topk_first: k candidates, the first is
// executed. guidnav: argmax of the reward model over k candidates.
// oracle_topk: argmax of ground-truth matching over k candidates.
enum class StrategyKind { dp, topk_first, guidnav, oracle_topk };

std::string_view to_string(StrategyKind k);
StrategyKind strategy_from_string(std::string_view s);  // throws ConfigError

struct Strategy {
  StrategyKind kind = StrategyKind::guidnav;
  int k = 3;
  std::optional<int> pass_n;

  // Validates and normalizes: dp always uses k = 1.
  static Strategy make(StrategyKind kind, int k = 3, std::optional<int> pass_n = std::nullopt);

  bool uses_scores() const { return kind == StrategyKind::guidnav || kind == StrategyKind::oracle_topk; }
  std::string name() const { return std::string(to_string(kind)); }
};

// Index of the candidate to execute. Score-based strategies take the argmax
// with ties going to the lowest index; the others take index 0. Throws
// ConfigError on an empty set or a score/candidate count mismatch.
int select(const CandidateSet& cands, std::span<const double> scores, const Strategy& strategy);

struct HistorySummary {
  std::string text;
  int turns_covered = 0;
};

// Past-tense clause for one executed step, e.g. "clicked element 5 (Search)".
std::string history_clause(const TrajectoryStep& step);

// Joins per-step clauses with "; ", dropping the oldest ones to stay within cap.
std::string join_clauses_capped(const std::vector<std::string>& clauses, std::size_t cap);

class Summarizer {
 public:
  virtual ~Summarizer() = default;
  virtual HistorySummary summarize(const Trajectory& traj, Usage& usage) = 0;
};

class DeterministicSummarizer final : public Summarizer {
 public:
  explicit DeterministicSummarizer(std::size_t cap = 1000) : cap_(cap) {}
  HistorySummary summarize(const Trajectory& traj, Usage& usage) override;

 private:
  std::size_t cap_;
};

// Incremental remote summary: previous summary plus the latest step, via the
// summarization prompt. Transport or parse failures fall back to the
// deterministic summarizer.
class WireSummarizer final : public Summarizer {
 public:
  WireSummarizer(WireConfig cfg, std::size_t cap = 1000) : client_(std::move(cfg)), fallback_(cap), cap_(cap) {}
  HistorySummary summarize(const Trajectory& traj, Usage& usage) override;

  static std::string render_prompt(const std::string& previous, const std::string& latest);

 private:
  ChatClient client_;
  DeterministicSummarizer fallback_;
  std::size_t cap_;
};

struct EngineConfig {
  std::size_t history_cap = 1000;
  MatchConfig match;
};

// Raised when a step cannot produce an executable action; ends the episode.
class StepFailure : public Error {
 public:
  using Error::Error;
};

// Everything one episode needs. Backends are borrowed and must outlive it.
struct EpisodeContext {
  const Task& task;
  PolicyBackend& policy;
  const RewardBackend* reward = nullptr;  // required for guidnav
  Summarizer& summarizer;
  Strategy strategy;
  EngineConfig config;
  std::vector<std::string> reflections;
  std::uint64_t seed = 0;
};

// Summarize, propose, score, select. Policy errors are retried once before
// raising StepFailure; a failing reward model degrades the step to the first
// candidate.
TrajectoryStep step(const EpisodeContext& ctx, const Observation& obs, const Trajectory& traj,
                    const std::optional<GroundTruthAction>& ground_truth);

// Runs until task_complete (spaces that have it), the goal predicate
// (spaces without it), an aborted step, or max_turns.
Trajectory run_episode(const EpisodeContext& ctx, Environment& env);

struct StaticStep {
  std::string screen_id;
  LabeledScreen screen;
  GroundTruthAction ground_truth;
};

// Static replay: one engine step per reference screen regardless of what the
// agent picks. Outcome is success iff every executed action matches.
Trajectory run_static(const EpisodeContext& ctx, std::span<const StaticStep> steps);

using PolicyFactory = std::function<std::unique_ptr<PolicyBackend>(std::uint64_t seed)>;

struct PassAtNResult {
  bool success = false;
  std::vector<Trajectory> trials;
};

// N = strategy.pass_n (default 1) independent episodes with seeds[0..N).
// Success iff any trial succeeds.
PassAtNResult pass_at_n(const Task& task, Environment& env, const PolicyFactory& make_policy,
                        const RewardBackend* reward, Summarizer& summarizer, const Strategy& strategy,
                        const EngineConfig& config, std::span<const std::uint64_t> seeds);

}  // namespace prmnav
