#include "prmnav/action.hpp"

#include <algorithm>
#include <array>

#include "prmnav/error.hpp"

namespace prmnav {
namespace {

constexpr std::array<std::string_view, kActionTypeCount> kTypeNames = {
    "click", "longpress", "type", "navigate_home", "navigate_back", "enter", "scroll", "task_complete",
};

constexpr std::array<std::string_view, 4> kDirectionNames = {"up", "down", "left", "right"};

constexpr std::array<std::string_view, 3> kSpaceNames = {"aitw", "gui_odyssey", "mind2web"};

constexpr std::array<std::string_view, 4> kActionKeys = {"action_type", "id", "text", "direction"};

bool takes_target(ActionType t) { return t == ActionType::click || t == ActionType::longpress; }

}  // namespace

std::string_view to_string(ActionType t) { return kTypeNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(Direction d) { return kDirectionNames[static_cast<std::size_t>(d)]; }
std::string_view to_string(SpaceName s) { return kSpaceNames[static_cast<std::size_t>(s)]; }

std::optional<ActionType> action_type_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
    if (kTypeNames[i] == s) return static_cast<ActionType>(i);
  }
  return std::nullopt;
}

std::optional<Direction> direction_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kDirectionNames.size(); ++i) {
    if (kDirectionNames[i] == s) return static_cast<Direction>(i);
  }
  return std::nullopt;
}

std::optional<SpaceName> space_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kSpaceNames.size(); ++i) {
    if (kSpaceNames[i] == s) return static_cast<SpaceName>(i);
  }
  return std::nullopt;
}

ActionSpace ActionSpace::aitw() {
  using enum ActionType;
  return ActionSpace(SpaceName::aitw,
                     {click, type, navigate_home, navigate_back, enter, scroll, task_complete});
}

ActionSpace ActionSpace::gui_odyssey() {
  using enum ActionType;
  return ActionSpace(SpaceName::gui_odyssey,
                     {click, longpress, type, navigate_home, navigate_back, scroll});
}

ActionSpace ActionSpace::mind2web() {
  return ActionSpace(SpaceName::mind2web, {ActionType::click, ActionType::type});
}

ActionSpace ActionSpace::of(SpaceName name) {
  switch (name) {
    case SpaceName::aitw: return aitw();
    case SpaceName::gui_odyssey: return gui_odyssey();
    case SpaceName::mind2web: return mind2web();
  }
  return aitw();
}

ActionSpace ActionSpace::from_name(std::string_view name) {
  auto s = space_from_string(name);
  if (!s) throw ConfigError("unknown action space '" + std::string(name) + "'");
  return of(*s);
}

bool ActionSpace::allows(ActionType t) const {
  return std::find(allowed_.begin(), allowed_.end(), t) != allowed_.end();
}

std::vector<std::string> validate_action(const Action& a, const ActionSpace& space) {
  std::vector<std::string> v;
  const std::string name(to_string(a.type));
  if (!space.allows(a.type)) {
    v.push_back("action_type '" + name + "' is not available in " + std::string(to_string(space.name())));
  }
  switch (a.type) {
    case ActionType::click:
    case ActionType::longpress:
      if (!a.id) v.push_back(name + ": missing id");
      if (a.text) v.push_back(name + ": unexpected text");
      if (a.direction) v.push_back(name + ": unexpected direction");
      break;
    case ActionType::type:
      if (!a.text) {
        v.push_back("type: missing text");
      } else if (a.text->empty()) {
        v.push_back("type: empty text");
      }
      if (space.type_requires_target()) {
        if (!a.id) v.push_back("type: mind2web type requires target id");
      } else if (a.id) {
        v.push_back("type: unexpected id");
      }
      if (a.direction) v.push_back("type: unexpected direction");
      break;
    case ActionType::scroll:
      if (!a.direction) v.push_back("scroll: missing direction");
      if (a.id) v.push_back("scroll: unexpected id");
      if (a.text) v.push_back("scroll: unexpected text");
      break;
    case ActionType::navigate_home:
    case ActionType::navigate_back:
    case ActionType::enter:
    case ActionType::task_complete:
      if (a.id || a.text || a.direction) v.push_back(name + ": takes no payload");
      break;
  }
  return v;
}

Action action_from_json(const nlohmann::json& j, const ActionSpace& space) {
  if (!j.is_object()) throw ParseError("action must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(kActionKeys.begin(), kActionKeys.end(), key) == kActionKeys.end()) {
      throw ParseError("unknown action key '" + key + "'");
    }
  }
  auto type_it = j.find("action_type");
  if (type_it == j.end() || !type_it->is_string()) throw ParseError("missing string field 'action_type'");
  const auto type_name = type_it->get<std::string>();
  auto type = action_type_from_string(type_name);
  if (!type || !space.allows(*type)) {
    throw ParseError("unknown action_type '" + type_name + "' for " + std::string(to_string(space.name())));
  }

  Action a;
  a.type = *type;
  if (auto it = j.find("id"); it != j.end()) {
    if (!it->is_number_unsigned()) throw ParseError("'id' must be a non-negative integer");
    const auto raw = it->get<std::uint64_t>();
    if (raw > UINT32_MAX) throw ParseError("'id' out of range");
    a.id = static_cast<std::uint32_t>(raw);
  }
  if (auto it = j.find("text"); it != j.end()) {
    if (!it->is_string()) throw ParseError("'text' must be a string");
    a.text = it->get<std::string>();
  }
  if (auto it = j.find("direction"); it != j.end()) {
    if (!it->is_string()) throw ParseError("'direction' must be a string");
    auto d = direction_from_string(it->get<std::string>());
    if (!d) throw ParseError("unknown direction '" + it->get<std::string>() + "'");
    a.direction = *d;
  }

  auto violations = validate_action(a, space);
  if (!violations.empty()) throw ParseError("invalid action: " + violations.front());
  return a;
}

Action parse_action(std::string_view json_text, const ActionSpace& space) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed action JSON: ") + e.what());
  }
  return action_from_json(j, space);
}

nlohmann::ordered_json action_to_json(const Action& a) {
  nlohmann::ordered_json j;
  j["action_type"] = to_string(a.type);
  if (a.id) j["id"] = *a.id;
  if (a.text) j["text"] = *a.text;
  if (a.direction) j["direction"] = to_string(*a.direction);
  return j;
}

std::string serialize_action(const Action& a) { return action_to_json(a).dump(); }

std::string describe(const Action& a) {
  const auto id = a.id ? std::to_string(*a.id) : std::string("?");
  switch (a.type) {
    case ActionType::click: return "click element " + id;
    case ActionType::longpress: return "longpress element " + id;
    case ActionType::type: {
      std::string s = "type '" + a.text.value_or("") + "'";
      if (a.id) s += " into element " + id;
      return s;
    }
    case ActionType::scroll:
      return "scroll " + std::string(a.direction ? to_string(*a.direction) : "?");
    case ActionType::navigate_home: return "navigate home";
    case ActionType::navigate_back: return "navigate back";
    case ActionType::enter: return "press enter";
    case ActionType::task_complete: return "task complete";
  }
  return "unknown";
}

}  // namespace prmnav
