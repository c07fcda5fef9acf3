#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prmnav/action.hpp"
#include "prmnav/matcher.hpp"
#include "prmnav/som.hpp"

namespace prmnav {

struct Task {
  std::string id;
  std::string instruction;
  ActionSpace space = ActionSpace::aitw();
  std::string goal_id;  // names the environment-side goal predicate
  int max_turns = 10;

  // Throws ConfigError on an empty instruction or max_turns < 1.
  void validate() const;
};

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  Usage& operator+=(const Usage& o) {
    prompt_tokens += o.prompt_tokens;
    completion_tokens += o.completion_tokens;
    return *this;
  }
  friend bool operator==(const Usage&, const Usage&) = default;
};

struct Candidate {
  Action action;
  std::string rationale;
  double confidence = 0.0;
  bool confidence_clamped = false;  // the model reported a value outside [0,1]

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Candidates in the order the policy emitted them; index 0 is its first choice.
struct CandidateSet {
  std::vector<Candidate> candidates;
  int k = 1;

  std::size_t size() const { return candidates.size(); }
  bool empty() const { return candidates.empty(); }
  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

enum class Outcome { running, success, failure, truncated };

std::string_view to_string(Outcome o);
Outcome outcome_from_string(std::string_view s);

struct TrajectoryStep {
  std::string screen_id;
  LabeledScreen screen;
  std::string summary_before;
  CandidateSet candidates;
  std::vector<double> scores;
  int chosen_index = 0;
  Action action;
  std::optional<GroundTruthAction> ground_truth;
  bool degraded = false;     // reward backend failed; first candidate executed
  bool all_zero = false;     // every candidate scored zero
  Usage usage;
  std::vector<std::string> notes;
};

struct Trajectory {
  std::string task_id;
  std::string instruction;
  SpaceName space = SpaceName::aitw;
  int max_turns = 0;
  std::string strategy;
  std::uint64_t seed = 0;
  std::vector<TrajectoryStep> steps;
  Outcome outcome = Outcome::running;
  std::string failure_reason;

  Usage total_usage() const;
};

// Header line (kind "header") carrying task metadata and outcome, then one
// line per step.
void write_trajectory_jsonl(std::ostream& out, const Trajectory& t);
Trajectory read_trajectory_jsonl(std::istream& in);

std::string trajectory_to_jsonl(const Trajectory& t);

}  // namespace prmnav
