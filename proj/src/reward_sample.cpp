#include "prmnav/reward_sample.hpp"

#include <istream>
#include <ostream>

#include "prmnav/error.hpp"

namespace prmnav {

std::string_view to_string(SampleSource s) {
  return s == SampleSource::human_demo ? "human_demo" : "self_play";
}

nlohmann::ordered_json sample_to_json(const RewardSample& s) {
  nlohmann::ordered_json j;
  j["instruction"] = s.instruction;
  j["summary"] = s.summary;
  j["space"] = to_string(s.space);
  j["step_index"] = s.step_index;
  j["screen"] = screen_to_json(s.screen);
  j["action"] = action_to_json(s.action);
  j["reward"] = s.reward;
  j["source"] = to_string(s.source);
  return j;
}

RewardSample sample_from_json(const nlohmann::json& j) {
  try {
    RewardSample s;
    s.instruction = j.at("instruction").get<std::string>();
    s.summary = j.value("summary", std::string{});
    auto space = space_from_string(j.value("space", std::string("aitw")));
    if (!space) throw ParseError("unknown space in sample");
    s.space = *space;
    s.step_index = j.value("step_index", std::size_t{0});
    s.screen = screen_from_json(j.at("screen"));
    s.action = action_from_json(j.at("action"), ActionSpace::of(s.space));
    s.reward = j.at("reward").get<double>();
    if (!(s.reward >= 0.0 && s.reward <= 1.0)) throw ParseError("sample reward outside [0,1]");
    const auto source = j.value("source", std::string("self_play"));
    if (source == "human_demo") {
      s.source = SampleSource::human_demo;
    } else if (source == "self_play") {
      s.source = SampleSource::self_play;
    } else {
      throw ParseError("unknown sample source '" + source + "'");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad reward sample: ") + e.what());
  }
}

void write_samples_jsonl(std::ostream& out, const std::vector<RewardSample>& samples) {
  for (const auto& s : samples) out << sample_to_json(s).dump() << '\n';
}

std::vector<RewardSample> read_samples_jsonl(std::istream& in) {
  std::vector<RewardSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(sample_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace prmnav
