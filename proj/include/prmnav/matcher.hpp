#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prmnav/action.hpp"
#include "prmnav/reward_sample.hpp"
#include "prmnav/som.hpp"

namespace prmnav {

// Reference action as recorded by a benchmark. Clicks carry a pixel point
// (AitW-style), a set of acceptable element labels (Mind2Web-style), or both.
struct GroundTruthAction {
  ActionType type = ActionType::click;
  std::optional<Point> point;
  std::optional<std::string> text;
  std::optional<Direction> direction;
  std::optional<std::vector<std::uint32_t>> element_candidates;
  // Detected box around the reference point, when the dataset provides one.
  std::optional<Box> box;

  friend bool operator==(const GroundTruthAction&, const GroundTruthAction&) = default;
};

struct MatchConfig {
  double click_distance_fraction = 0.14;  // of the screen diagonal
  double box_expand_factor = 2.4;         // linear, about the box center
  bool normalize_text = true;

  // Throws ConfigError unless fraction in (0,1) and factor >= 1.
  void validate() const;
  static MatchConfig from_json(const nlohmann::json& j);
};

// Converts an executed action to the ground truth it would have produced:
// clicks become the element center, plus the element itself as the single
// acceptable target.
GroundTruthAction to_ground_truth(const Action& a, const LabeledScreen& screen);

bool match_click(std::uint32_t pred_id, const GroundTruthAction& gt, const LabeledScreen& screen,
                 const MatchConfig& cfg);

bool match_action(const Action& pred, const GroundTruthAction& gt, const LabeledScreen& screen,
                  const MatchConfig& cfg);

bool text_matches(std::string_view pred, std::string_view gt, const MatchConfig& cfg);

struct PredictedStep {
  LabeledScreen screen;
  Action action;
  std::string summary;
  std::size_t step_index = 0;
};

// One sample per step, reward 1.0 on match and 0.0 otherwise. Throws
// ConfigError when the lists differ in length.
std::vector<RewardSample> annotate_trajectory(const std::string& instruction,
                                              std::span<const PredictedStep> pred,
                                              std::span<const GroundTruthAction> gt,
                                              const MatchConfig& cfg);

// Demonstration steps are correct by assumption: every reward is 1.0.
std::vector<RewardSample> human_demo_samples(const std::string& instruction,
                                             std::span<const PredictedStep> demo);

nlohmann::ordered_json ground_truth_to_json(const GroundTruthAction& gt);
GroundTruthAction ground_truth_from_json(const nlohmann::json& j);

}  // namespace prmnav
