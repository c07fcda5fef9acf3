#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prmnav/action.hpp"
#include "prmnav/environment.hpp"
#include "prmnav/matcher.hpp"
#include "prmnav/som.hpp"
#include "prmnav/trajectory.hpp"

namespace prmnav::sim {

inline constexpr int kSchemaVersion = 1;

enum class TriggerKind { click, longpress, type, scroll, enter, navigate_back };

struct Trigger {
  TriggerKind kind = TriggerKind::click;
  std::optional<std::uint32_t> label;  // click/longpress target; optional type target
  std::optional<std::string> token;    // type: fires when the committed text contains this token
  std::optional<Direction> direction;  // scroll
};

struct Transition {
  std::string from;
  Trigger trigger;
  std::string to;
};

struct SimScreen {
  std::string id;
  LabeledScreen screen;
  std::optional<std::string> back;  // navigate_back target; home when unset
};

struct SimApp {
  std::string name;
  std::string home;
  std::map<std::string, SimScreen> screens;
  std::vector<Transition> transitions;

  const SimScreen& screen(const std::string& id) const;  // throws LookupError
};

struct SimState {
  std::string screen_id;
  std::vector<std::string> typed_log;
  std::optional<std::string> pending_text;  // typed but not yet committed with enter
  std::optional<std::uint32_t> pending_label;
  std::set<std::string> visited;

  friend bool operator==(const SimState&, const SimState&) = default;
};

// All listed conditions must hold.
struct GoalPredicate {
  std::optional<std::string> screen;
  std::vector<std::string> typed_contains;  // tokens, matched case-insensitively
  std::vector<std::string> visited;

  bool holds(const SimState& s) const;
};

struct SimTask {
  Task task;
  std::string start;
  GoalPredicate goal;
  std::vector<Action> demo;
};

struct TaskScript {
  std::shared_ptr<const SimApp> app;
  std::vector<SimTask> tasks;
  std::string suite_hash;  // hash of the canonical script JSON

  const SimTask& task(const std::string& id) const;  // throws LookupError
};

// Parses and validates a script: transition targets exist, every screen is
// reachable from home, and each demo reaches its goal within max_turns.
// Throws ConfigError / ParseError.
TaskScript parse_task_script(const nlohmann::json& j);
TaskScript load_task_script(const std::string& path);

SimState initial_state(const SimTask& task);

// Pure transition function. Unmatched triggers leave the state unchanged.
SimState step_state(const SimApp& app, const ActionSpace& space, const SimState& s, const Action& a);

struct DemoStep {
  std::string screen_id;
  LabeledScreen screen;
  Action action;
  GroundTruthAction ground_truth;
  SimState state_before;
};

// Replays the demo from the start state, pairing each action with the screen
// it was taken on. Throws Error if the replay diverges from the script.
std::vector<DemoStep> demo_trajectory(const SimApp& app, const SimTask& task);

// Next action of a shortest completion from `s` within `remaining_turns`.
// On the demo's own path the demo action is returned.
std::optional<Action> expert_action(const SimApp& app, const SimTask& task, const SimState& s, int remaining_turns);

class SimEnv final : public Environment {
 public:
  SimEnv(std::shared_ptr<const SimApp> app, SimTask task);

  Observation reset() override;
  Observation apply(const Action& a) override;
  bool goal_reached() const override;
  std::optional<GroundTruthAction> ground_truth(int remaining_turns) const override;

  std::optional<Action> expert(int remaining_turns) const;
  const SimState& state() const { return state_; }
  const SimTask& task() const { return task_; }
  const SimApp& app() const { return *app_; }

 private:
  Observation observe() const;

  std::shared_ptr<const SimApp> app_;
  SimTask task_;
  SimState state_;
};

}  // namespace prmnav::sim
