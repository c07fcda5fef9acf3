#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace prmnav {

enum class ActionType {
  click,
  longpress,
  type,
  navigate_home,
  navigate_back,
  enter,
  scroll,
  task_complete,
};

inline constexpr int kActionTypeCount = 8;

enum class Direction { up, down, left, right };

enum class SpaceName { aitw, gui_odyssey, mind2web };

std::string_view to_string(ActionType t);
std::string_view to_string(Direction d);
std::string_view to_string(SpaceName s);

std::optional<ActionType> action_type_from_string(std::string_view s);
std::optional<Direction> direction_from_string(std::string_view s);
std::optional<SpaceName> space_from_string(std::string_view s);

// The set of action types a benchmark exposes to the agent.
class ActionSpace {
 public:
  static ActionSpace aitw();
  static ActionSpace gui_odyssey();
  static ActionSpace mind2web();
  static ActionSpace of(SpaceName name);
  static ActionSpace from_name(std::string_view name);  // throws ConfigError

  SpaceName name() const { return name_; }
  const std::vector<ActionType>& allowed() const { return allowed_; }
  bool allows(ActionType t) const;

  // Spaces with an explicit enter key commit typed text on enter; the rest
  // commit on type.
  bool has_enter() const { return allows(ActionType::enter); }
  bool has_task_complete() const { return allows(ActionType::task_complete); }
  bool type_requires_target() const { return name_ == SpaceName::mind2web; }

  friend bool operator==(const ActionSpace& a, const ActionSpace& b) { return a.name_ == b.name_; }

 private:
  ActionSpace(SpaceName name, std::vector<ActionType> allowed)
      : name_(name), allowed_(std::move(allowed)) {}

  SpaceName name_;
  std::vector<ActionType> allowed_;
};

struct Action {
  ActionType type = ActionType::click;
  std::optional<std::uint32_t> id;
  std::optional<std::string> text;
  std::optional<Direction> direction;

  static Action click(std::uint32_t id) { return {ActionType::click, id, {}, {}}; }
  static Action longpress(std::uint32_t id) { return {ActionType::longpress, id, {}, {}}; }
  static Action type_text(std::string text, std::optional<std::uint32_t> id = {}) {
    return {ActionType::type, id, std::move(text), {}};
  }
  static Action scroll(Direction d) { return {ActionType::scroll, {}, {}, d}; }
  static Action bare(ActionType t) { return {t, {}, {}, {}}; }

  friend bool operator==(const Action&, const Action&) = default;
};

// Returns every invariant the action breaks under `space`. Never throws.
std::vector<std::string> validate_action(const Action& a, const ActionSpace& space);

// Strict parse of one action object. Unknown keys, wrong payloads, and types
// outside the space raise ParseError.
Action parse_action(std::string_view json_text, const ActionSpace& space);
Action action_from_json(const nlohmann::json& j, const ActionSpace& space);

// Canonical form: keys ordered action_type, id, text, direction; absent
// fields omitted.
std::string serialize_action(const Action& a);
nlohmann::ordered_json action_to_json(const Action& a);

// Short human-readable clause, e.g. "click element 5" or "scroll down".
std::string describe(const Action& a);

}  // namespace prmnav
