#include "prmnav/trajectory.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "prmnav/error.hpp"

namespace prmnav {

void Task::validate() const {
  if (instruction.empty()) throw ConfigError("task '" + id + "': empty instruction");
  if (max_turns < 1) throw ConfigError("task '" + id + "': max_turns must be >= 1");
}

Usage Trajectory::total_usage() const {
  Usage u;
  for (const auto& s : steps) u += s.usage;
  return u;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::running: return "running";
    case Outcome::success: return "success";
    case Outcome::failure: return "failure";
    case Outcome::truncated: return "truncated";
  }
  return "running";
}

Outcome outcome_from_string(std::string_view s) {
  if (s == "success") return Outcome::success;
  if (s == "failure") return Outcome::failure;
  if (s == "truncated") return Outcome::truncated;
  if (s == "running") return Outcome::running;
  throw ParseError("unknown outcome '" + std::string(s) + "'");
}

namespace {

nlohmann::ordered_json step_to_json(std::size_t index, const TrajectoryStep& s) {
  nlohmann::ordered_json j;
  j["kind"] = "step";
  j["index"] = index;
  j["screen_id"] = s.screen_id;
  j["screen"] = screen_to_json(s.screen);
  j["summary_before"] = s.summary_before;
  auto cands = nlohmann::ordered_json::array();
  for (const auto& c : s.candidates.candidates) {
    nlohmann::ordered_json cj;
    cj["action"] = action_to_json(c.action);
    cj["rationale"] = c.rationale;
    cj["confidence"] = c.confidence;
    if (c.confidence_clamped) cj["confidence_clamped"] = true;
    cands.push_back(std::move(cj));
  }
  j["k"] = s.candidates.k;
  j["candidates"] = std::move(cands);
  j["scores"] = s.scores;
  j["chosen_index"] = s.chosen_index;
  j["action"] = action_to_json(s.action);
  if (s.ground_truth) j["ground_truth"] = ground_truth_to_json(*s.ground_truth);
  if (s.degraded) j["degraded"] = true;
  if (s.all_zero) j["all_zero"] = true;
  j["usage"] = {{"prompt_tokens", s.usage.prompt_tokens}, {"completion_tokens", s.usage.completion_tokens}};
  if (!s.notes.empty()) j["notes"] = s.notes;
  return j;
}

TrajectoryStep step_from_json(const nlohmann::json& j, const ActionSpace& space) {
  TrajectoryStep s;
  s.screen_id = j.value("screen_id", std::string{});
  s.screen = screen_from_json(j.at("screen"));
  s.summary_before = j.value("summary_before", std::string{});
  s.candidates.k = j.value("k", 1);
  for (const auto& cj : j.at("candidates")) {
    Candidate c;
    c.action = action_from_json(cj.at("action"), space);
    c.rationale = cj.value("rationale", std::string{});
    c.confidence = cj.value("confidence", 0.0);
    c.confidence_clamped = cj.value("confidence_clamped", false);
    s.candidates.candidates.push_back(std::move(c));
  }
  s.scores = j.value("scores", std::vector<double>{});
  s.chosen_index = j.at("chosen_index").get<int>();
  s.action = action_from_json(j.at("action"), space);
  if (auto it = j.find("ground_truth"); it != j.end()) s.ground_truth = ground_truth_from_json(*it);
  s.degraded = j.value("degraded", false);
  s.all_zero = j.value("all_zero", false);
  if (auto it = j.find("usage"); it != j.end()) {
    s.usage.prompt_tokens = it->value("prompt_tokens", std::int64_t{0});
    s.usage.completion_tokens = it->value("completion_tokens", std::int64_t{0});
  }
  s.notes = j.value("notes", std::vector<std::string>{});
  if (s.chosen_index < 0 || static_cast<std::size_t>(s.chosen_index) >= s.candidates.size()) {
    throw ParseError("chosen_index out of candidate bounds");
  }
  return s;
}

}  // namespace

void write_trajectory_jsonl(std::ostream& out, const Trajectory& t) {
  nlohmann::ordered_json h;
  h["kind"] = "header";
  h["task_id"] = t.task_id;
  h["instruction"] = t.instruction;
  h["space"] = to_string(t.space);
  h["max_turns"] = t.max_turns;
  h["strategy"] = t.strategy;
  h["seed"] = t.seed;
  h["outcome"] = to_string(t.outcome);
  if (!t.failure_reason.empty()) h["failure_reason"] = t.failure_reason;
  h["steps"] = t.steps.size();
  out << h.dump() << '\n';
  for (std::size_t i = 0; i < t.steps.size(); ++i) out << step_to_json(i, t.steps[i]).dump() << '\n';
}

std::string trajectory_to_jsonl(const Trajectory& t) {
  std::ostringstream os;
  write_trajectory_jsonl(os, t);
  return os.str();
}

Trajectory read_trajectory_jsonl(std::istream& in) {
  std::string line;
  Trajectory t;
  bool have_header = false;
  std::size_t expected = 0;
  std::size_t lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto j = nlohmann::json::parse(line);
      const auto kind = j.value("kind", std::string{});
      if (!have_header) {
        if (kind != "header") throw ParseError("first line must be the trajectory header");
        t.task_id = j.at("task_id").get<std::string>();
        t.instruction = j.value("instruction", std::string{});
        auto space = space_from_string(j.at("space").get<std::string>());
        if (!space) throw ParseError("unknown space in trajectory header");
        t.space = *space;
        t.max_turns = j.value("max_turns", 0);
        t.strategy = j.value("strategy", std::string{});
        t.seed = j.value("seed", std::uint64_t{0});
        t.outcome = outcome_from_string(j.at("outcome").get<std::string>());
        t.failure_reason = j.value("failure_reason", std::string{});
        expected = j.value("steps", std::size_t{0});
        have_header = true;
        continue;
      }
      if (kind != "step") throw ParseError("expected a step line");
      t.steps.push_back(step_from_json(j, ActionSpace::of(t.space)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("trajectory line " + std::to_string(lineno) + ": " + e.what());
  }
  if (!have_header) throw ParseError("empty trajectory file");
  if (t.steps.size() != expected) {
    throw ParseError("trajectory declares " + std::to_string(expected) + " steps but has " +
                     std::to_string(t.steps.size()));
  }
  return t;
}

}  // namespace prmnav
