#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prmnav/engine.hpp"
#include "prmnav/environment.hpp"
#include "prmnav/trajectory.hpp"
#include "prmnav/wire.hpp"

// Outcome-level evaluate / reflect / retry around whole episodes.

namespace prmnav {

struct Verdict {
  bool success = false;
  std::string reason;  // empty on success
};

class TrajectoryEvaluator {
 public:
  virtual ~TrajectoryEvaluator() = default;
  // Called right after the episode, while `env` still holds its final state.
  virtual Verdict evaluate(const Trajectory& traj, const Task& task, const Environment& env) = 0;
};

// Judges by the environment's goal predicate; sound by construction.
class SimEvaluator final : public TrajectoryEvaluator {
 public:
  Verdict evaluate(const Trajectory& traj, const Task& task, const Environment& env) override;
};

class WireEvaluator final : public TrajectoryEvaluator {
 public:
  explicit WireEvaluator(WireConfig cfg) : client_(std::move(cfg)) {}
  Verdict evaluate(const Trajectory& traj, const Task& task, const Environment& env) override;

  static std::string render_prompt(const Trajectory& traj, const Task& task);

 private:
  ChatClient client_;
};

// First line must start with SUCCESS or FAILURE (any case); the rest of the
// reply is the reason. Throws ParseError otherwise.
Verdict parse_verdict(const std::string& reply);

enum class CauseKnown { failure_cause_identified, unknown };

struct ReflectionThought {
  std::string text;
  int round = 1;
  CauseKnown verdict_of_previous = CauseKnown::unknown;
};

class Reflector {
 public:
  virtual ~Reflector() = default;
  virtual ReflectionThought reflect(const Trajectory& traj, const Task& task, const Verdict& verdict, int round) = 0;
};

// Names the last three actions, the failure reason, and the most repeated
// action to avoid.
class DefaultReflector final : public Reflector {
 public:
  ReflectionThought reflect(const Trajectory& traj, const Task& task, const Verdict& verdict, int round) override;
};

// Remote reflection; falls back to DefaultReflector on any failure.
class WireReflector final : public Reflector {
 public:
  explicit WireReflector(WireConfig cfg) : client_(std::move(cfg)) {}
  ReflectionThought reflect(const Trajectory& traj, const Task& task, const Verdict& verdict, int round) override;

 private:
  ChatClient client_;
  DefaultReflector fallback_;
};

// Throws ConfigError when `verdict` is a success: there is nothing to reflect on.
ReflectionThought reflect(Reflector& reflector, const Trajectory& traj, const Task& task, const Verdict& verdict,
                          int round);

inline constexpr std::size_t kMaxReflections = 3;

struct RoundRecord {
  int round = 1;
  std::uint64_t seed = 0;
  Trajectory trajectory;
  Verdict verdict;
  std::optional<ReflectionThought> reflection;  // produced after a failed round
};

struct FinalOutcome {
  bool success = false;
  int rounds_used = 0;
  std::vector<RoundRecord> rounds;

  int total_turns() const;
  Usage total_usage() const;
};

struct RetryConfig {
  int max_rounds = 3;
  std::uint64_t seed = 0;  // round r uses seed + r - 1
};

// Round 1 is a plain episode; every later round carries the reflections of
// earlier failures (at most kMaxReflections, newest kept). Stops at the first
// success.
FinalOutcome run_with_retries(const Task& task, Environment& env, const PolicyFactory& make_policy,
                              const RewardBackend* reward, Summarizer& summarizer, const Strategy& strategy,
                              const EngineConfig& config, TrajectoryEvaluator& evaluator, Reflector& reflector,
                              const RetryConfig& retry);

}  // namespace prmnav
