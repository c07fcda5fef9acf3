#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prmnav/matcher.hpp"
#include "prmnav/trajectory.hpp"

namespace prmnav {

// Fraction of steps whose executed action matches the aligned ground truth.
// Throws ConfigError on a length mismatch or an empty trajectory.
double static_score(const Trajectory& pred, std::span<const GroundTruthAction> gt, const MatchConfig& cfg);

// Uses the ground truth recorded on each step.
double static_score(const Trajectory& pred, const MatchConfig& cfg);

struct ElementStepScore {
  double element_accuracy = 0.0;
  double step_success_rate = 0.0;
};

// Element: the predicted id is one of the acceptable labels. Step: element
// plus operation type plus payload. Throws ConfigError when a ground-truth
// step has no element candidates.
ElementStepScore element_and_step_sr(const Trajectory& pred, std::span<const GroundTruthAction> gt,
                                     const MatchConfig& cfg = {});

// successes / total; throws ConfigError on an empty list.
double dynamic_success(std::span<const Outcome> outcomes);
double dynamic_success(const std::vector<bool>& successes);

struct Pricing {
  double rate_per_million_prompt = 5.0;
  double rate_per_million_completion = 5.0;

  static Pricing flat(double rate) { return {rate, rate}; }
  void validate() const;  // rates >= 0
  static Pricing from_json(const nlohmann::json& j);
  double cost(std::int64_t prompt_tokens, std::int64_t completion_tokens) const;
};

struct RunRecord {
  std::string task_id;
  std::string strategy;
  Outcome outcome = Outcome::failure;
  int turns = 0;  // executed steps summed over all rounds
  std::int64_t tokens_prompt = 0;
  std::int64_t tokens_completion = 0;
  int rounds_used = 1;
  std::optional<double> static_score;
  std::optional<double> element_accuracy;
  std::optional<double> step_success_rate;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// One record from a single episode, or from several rounds/trials of one task.
RunRecord record_from_trajectory(const Trajectory& t);
RunRecord record_from_rounds(std::span<const Trajectory> rounds, bool success);

struct Aggregates {
  std::optional<double> static_score;
  std::optional<double> element_accuracy;
  std::optional<double> step_success_rate;
  double dynamic_success_rate = 0.0;
  double avg_tokens = 0.0;
  double avg_cost = 0.0;
  double avg_turns = 0.0;

  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

// Pure fold over records. Optional metrics average over the records that
// carry them. Throws ConfigError on an empty list.
Aggregates usage_report(std::span<const RunRecord> records, const Pricing& pricing);

struct RunReport {
  std::string suite_hash;
  std::string strategy;
  int k = 1;
  Pricing pricing;
  std::vector<RunRecord> records;
  Aggregates aggregates;

  void recompute() { aggregates = usage_report(records, pricing); }
};

nlohmann::ordered_json report_to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);  // throws ParseError
std::string report_to_csv(const RunReport& r);       // one line per record

struct ComparisonRow {
  std::string strategy;
  int k = 1;
  std::size_t tasks = 0;
  Aggregates aggregates;

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct ComparisonTable {
  std::string suite_hash;
  std::vector<ComparisonRow> rows;

  std::string to_text() const;
  std::string to_csv() const;
  static ComparisonTable from_csv(const std::string& csv);  // throws ParseError

  friend bool operator==(const ComparisonTable&, const ComparisonTable&) = default;
};

// One row per run, in input order. Throws ConfigError when the runs come from
// different suites or when `runs` is empty.
ComparisonTable compare_report(std::span<const RunReport> runs);

}  // namespace prmnav
