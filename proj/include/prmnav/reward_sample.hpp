#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "prmnav/action.hpp"
#include "prmnav/som.hpp"

namespace prmnav {

enum class SampleSource { human_demo, self_play };

// One reward-model training record: instruction, history summary, screen,
// candidate action, and its label.
struct RewardSample {
  std::string instruction;
  std::string summary;
  LabeledScreen screen;
  Action action;
  double reward = 0.0;
  SampleSource source = SampleSource::self_play;
  std::size_t step_index = 0;
  SpaceName space = SpaceName::aitw;
};

std::string_view to_string(SampleSource s);

nlohmann::ordered_json sample_to_json(const RewardSample& s);
RewardSample sample_from_json(const nlohmann::json& j);

void write_samples_jsonl(std::ostream& out, const std::vector<RewardSample>& samples);
std::vector<RewardSample> read_samples_jsonl(std::istream& in);

}  // namespace prmnav
