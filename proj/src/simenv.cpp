#include "prmnav/simenv.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <sstream>

#include "prmnav/error.hpp"
#include "prmnav/text.hpp"

namespace prmnav::sim {
namespace {

bool text_contains(std::string_view haystack, std::string_view token) {
  return text::normalize(haystack).find(text::normalize(token)) != std::string::npos;
}

std::string joined_log(const SimState& s) {
  std::string out;
  for (const auto& t : s.typed_log) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

void enter_screen(SimState& s, const std::string& to) {
  if (to != s.screen_id) {
    s.pending_text.reset();
    s.pending_label.reset();
  }
  s.screen_id = to;
  s.visited.insert(to);
}

const Transition* find_transition(const SimApp& app, const std::string& from, TriggerKind kind,
                                  const std::function<bool(const Trigger&)>& pred) {
  for (const auto& t : app.transitions) {
    if (t.from == from && t.trigger.kind == kind && pred(t.trigger)) return &t;
  }
  return nullptr;
}

const Transition* find_type_commit(const SimApp& app, const std::string& from, const std::string& typed,
                                   std::optional<std::uint32_t> label) {
  return find_transition(app, from, TriggerKind::type, [&](const Trigger& tr) {
    if (tr.label && label && *tr.label != *label) return false;
    return tr.token && text_contains(typed, *tr.token);
  });
}

Trigger trigger_from_json(const nlohmann::json& on) {
  Trigger t;
  if (on.is_string()) {
    const auto s = on.get<std::string>();
    if (s == "enter") {
      t.kind = TriggerKind::enter;
    } else if (s == "navigate_back") {
      t.kind = TriggerKind::navigate_back;
    } else {
      throw ConfigError("unknown trigger '" + s + "'");
    }
    return t;
  }
  if (auto it = on.find("click"); it != on.end()) {
    t.kind = TriggerKind::click;
    t.label = it->get<std::uint32_t>();
  } else if (auto it = on.find("longpress"); it != on.end()) {
    t.kind = TriggerKind::longpress;
    t.label = it->get<std::uint32_t>();
  } else if (auto it = on.find("type"); it != on.end()) {
    t.kind = TriggerKind::type;
    t.token = it->get<std::string>();
    if (auto l = on.find("label"); l != on.end()) t.label = l->get<std::uint32_t>();
  } else if (auto it = on.find("scroll"); it != on.end()) {
    t.kind = TriggerKind::scroll;
    auto d = direction_from_string(it->get<std::string>());
    if (!d) throw ConfigError("unknown scroll direction in trigger");
    t.direction = *d;
  } else {
    throw ConfigError("unrecognized trigger " + on.dump());
  }
  return t;
}

std::vector<SimState> replay_states(const SimApp& app, const SimTask& task) {
  std::vector<SimState> states{initial_state(task)};
  for (const auto& a : task.demo) states.push_back(step_state(app, task.task.space, states.back(), a));
  return states;
}

// Candidate moves from `s`, in a fixed order.
std::vector<Action> enumerate_moves(const SimApp& app, const SimTask& task, const SimState& s) {
  const auto& space = task.task.space;
  std::vector<Action> moves;
  auto add = [&](Action a) {
    if (validate_action(a, space).empty() && std::find(moves.begin(), moves.end(), a) == moves.end()) {
      moves.push_back(std::move(a));
    }
  };
  for (const auto& t : app.transitions) {
    if (t.from != s.screen_id) continue;
    switch (t.trigger.kind) {
      case TriggerKind::click: add(Action::click(*t.trigger.label)); break;
      case TriggerKind::longpress: add(Action::longpress(*t.trigger.label)); break;
      case TriggerKind::scroll: add(Action::scroll(*t.trigger.direction)); break;
      case TriggerKind::enter: add(Action::bare(ActionType::enter)); break;
      case TriggerKind::navigate_back: add(Action::bare(ActionType::navigate_back)); break;
      case TriggerKind::type: {
        std::optional<std::uint32_t> id;
        if (space.type_requires_target()) id = t.trigger.label;
        add(Action::type_text(*t.trigger.token, id));
        break;
      }
    }
  }
  const auto log = joined_log(s);
  for (const auto& tok : task.goal.typed_contains) {
    if (!text_contains(log, tok)) add(Action::type_text(tok));
  }
  if (s.pending_text) add(Action::bare(ActionType::enter));
  add(Action::bare(ActionType::navigate_back));
  add(Action::bare(ActionType::navigate_home));
  return moves;
}

// Abstract state for search: typed history only matters through the goal's tokens.
std::string search_key(const SimTask& task, const SimState& s) {
  std::string key = s.screen_id + "\x1f" + s.pending_text.value_or("\x02") + "\x1f" +
                    (s.pending_label ? std::to_string(*s.pending_label) : "-") + "\x1f";
  const auto log = joined_log(s);
  for (const auto& tok : task.goal.typed_contains) key.push_back(text_contains(log, tok) ? '1' : '0');
  key.push_back('\x1f');
  for (const auto& v : task.goal.visited) key.push_back(s.visited.count(v) ? '1' : '0');
  return key;
}

}  // namespace

const SimScreen& SimApp::screen(const std::string& id) const {
  auto it = screens.find(id);
  if (it == screens.end()) throw LookupError("unknown screen '" + id + "'");
  return it->second;
}

bool GoalPredicate::holds(const SimState& s) const {
  if (screen && s.screen_id != *screen) return false;
  const auto log = joined_log(s);
  for (const auto& tok : typed_contains) {
    if (!text_contains(log, tok)) return false;
  }
  for (const auto& v : visited) {
    if (!s.visited.count(v)) return false;
  }
  return true;
}

const SimTask& TaskScript::task(const std::string& id) const {
  for (const auto& t : tasks) {
    if (t.task.id == id) return t;
  }
  throw LookupError("unknown task '" + id + "'");
}

SimState initial_state(const SimTask& task) {
  SimState s;
  s.screen_id = task.start;
  s.visited.insert(task.start);
  return s;
}

SimState step_state(const SimApp& app, const ActionSpace& space, const SimState& s, const Action& a) {
  SimState next = s;
  const auto& cur = app.screen(s.screen_id);
  auto fire = [&](const Transition* t) {
    if (t) enter_screen(next, t->to);
  };
  switch (a.type) {
    case ActionType::click:
    case ActionType::longpress: {
      if (!a.id || !cur.screen.find(*a.id)) break;
      const auto kind = a.type == ActionType::click ? TriggerKind::click : TriggerKind::longpress;
      fire(find_transition(app, s.screen_id, kind, [&](const Trigger& tr) { return tr.label == a.id; }));
      break;
    }
    case ActionType::scroll:
      fire(find_transition(app, s.screen_id, TriggerKind::scroll,
                           [&](const Trigger& tr) { return tr.direction == a.direction; }));
      break;
    case ActionType::type: {
      const auto& typed = a.text.value_or("");
      next.typed_log.push_back(typed);
      if (space.has_enter()) {
        next.pending_text = typed;
        next.pending_label = a.id;
      } else {
        fire(find_type_commit(app, s.screen_id, typed, a.id));
      }
      break;
    }
    case ActionType::enter: {
      const Transition* t = nullptr;
      if (s.pending_text) t = find_type_commit(app, s.screen_id, *s.pending_text, s.pending_label);
      if (!t) t = find_transition(app, s.screen_id, TriggerKind::enter, [](const Trigger&) { return true; });
      next.pending_text.reset();
      next.pending_label.reset();
      fire(t);
      break;
    }
    case ActionType::navigate_home:
      next.pending_text.reset();
      next.pending_label.reset();
      enter_screen(next, app.home);
      break;
    case ActionType::navigate_back: {
      const auto* t = find_transition(app, s.screen_id, TriggerKind::navigate_back, [](const Trigger&) { return true; });
      enter_screen(next, t ? t->to : cur.back.value_or(app.home));
      break;
    }
    case ActionType::task_complete:
      break;
  }
  return next;
}

std::vector<DemoStep> demo_trajectory(const SimApp& app, const SimTask& task) {
  std::vector<DemoStep> out;
  SimState s = initial_state(task);
  for (std::size_t i = 0; i < task.demo.size(); ++i) {
    const auto& a = task.demo[i];
    const auto& screen = app.screen(s.screen_id).screen;
    if (a.id && !screen.find(*a.id)) {
      throw Error("demo for task '" + task.task.id + "' diverges at step " + std::to_string(i) + ": label " +
                  std::to_string(*a.id) + " not on screen '" + s.screen_id + "'");
    }
    out.push_back({s.screen_id, screen, a, to_ground_truth(a, screen), s});
    s = step_state(app, task.task.space, s, a);
  }
  return out;
}

std::optional<Action> expert_action(const SimApp& app, const SimTask& task, const SimState& s, int remaining_turns) {
  if (remaining_turns <= 0) return std::nullopt;
  const auto& space = task.task.space;
  if (task.goal.holds(s)) {
    if (space.has_task_complete()) return Action::bare(ActionType::task_complete);
    return std::nullopt;
  }

  const auto demo_states = replay_states(app, task);
  for (std::size_t i = 0; i < task.demo.size(); ++i) {
    if (demo_states[i] == s && static_cast<int>(task.demo.size() - i) <= remaining_turns) return task.demo[i];
  }

  // Breadth-first search for the shortest completion.
  const int finish_cost = space.has_task_complete() ? 1 : 0;
  struct Node {
    SimState state;
    Action first;
    int depth;
  };
  std::deque<Node> queue;
  std::set<std::string> seen{search_key(task, s)};
  auto expand = [&](const SimState& from, const std::optional<Action>& first, int depth) -> std::optional<Action> {
    for (const auto& a : enumerate_moves(app, task, from)) {
      auto next = step_state(app, space, from, a);
      const Action head = first.value_or(a);
      if (task.goal.holds(next) && depth + 1 + finish_cost <= remaining_turns) return head;
      if (!seen.insert(search_key(task, next)).second) continue;
      if (depth + 1 + finish_cost < remaining_turns) queue.push_back({std::move(next), head, depth + 1});
    }
    return std::nullopt;
  };
  if (auto hit = expand(s, std::nullopt, 0)) return hit;
  while (!queue.empty()) {
    Node n = std::move(queue.front());
    queue.pop_front();
    if (auto hit = expand(n.state, n.first, n.depth)) return hit;
  }
  return std::nullopt;
}

TaskScript parse_task_script(const nlohmann::json& j) {
  TaskScript script;
  auto app = std::make_shared<SimApp>();
  try {
    const int version = j.value("schema_version", 0);
    if (version != kSchemaVersion) throw ConfigError("unsupported task-script schema_version " + std::to_string(version));
    const auto& ja = j.at("app");
    app->name = ja.value("name", std::string{});
    app->home = ja.at("home").get<std::string>();
    const double default_w = ja.value("width", 1080.0);
    const double default_h = ja.value("height", 1920.0);
    for (const auto& js : ja.at("screens")) {
      SimScreen sc;
      sc.id = js.at("id").get<std::string>();
      if (auto b = js.find("back"); b != js.end()) sc.back = b->get<std::string>();
      nlohmann::json screen_json = {{"width", js.value("width", default_w)},
                                    {"height", js.value("height", default_h)},
                                    {"elements", js.value("elements", nlohmann::json::array())}};
      sc.screen = screen_from_json(screen_json);
      if (!app->screens.emplace(sc.id, sc).second) throw ConfigError("duplicate screen id '" + sc.id + "'");
    }
    for (const auto& jt : ja.value("transitions", nlohmann::json::array())) {
      Transition t;
      t.from = jt.at("from").get<std::string>();
      t.to = jt.at("to").get<std::string>();
      t.trigger = trigger_from_json(jt.at("on"));
      app->transitions.push_back(std::move(t));
    }

    if (!app->screens.count(app->home)) throw ConfigError("home screen '" + app->home + "' does not exist");
    for (const auto& t : app->transitions) {
      if (!app->screens.count(t.from)) throw ConfigError("transition from missing screen '" + t.from + "'");
      if (!app->screens.count(t.to)) throw ConfigError("transition to missing screen '" + t.to + "'");
      if (t.trigger.label && !app->screens.at(t.from).screen.find(*t.trigger.label)) {
        throw ConfigError("transition from '" + t.from + "' references unknown label " + std::to_string(*t.trigger.label));
      }
    }
    for (const auto& [id, sc] : app->screens) {
      if (sc.back && !app->screens.count(*sc.back)) throw ConfigError("screen '" + id + "' has missing back target");
    }

    std::set<std::string> reachable{app->home};
    std::deque<std::string> frontier{app->home};
    while (!frontier.empty()) {
      const auto cur = frontier.front();
      frontier.pop_front();
      auto visit = [&](const std::string& to) {
        if (reachable.insert(to).second) frontier.push_back(to);
      };
      for (const auto& t : app->transitions) {
        if (t.from == cur) visit(t.to);
      }
      visit(app->screens.at(cur).back.value_or(app->home));
    }
    for (const auto& [id, _] : app->screens) {
      if (!reachable.count(id)) throw ConfigError("screen '" + id + "' is unreachable from home");
    }

    for (const auto& jt : j.at("tasks")) {
      SimTask st;
      st.task.id = jt.at("id").get<std::string>();
      st.task.instruction = jt.at("instruction").get<std::string>();
      st.task.space = ActionSpace::from_name(jt.value("space", std::string("aitw")));
      st.task.goal_id = st.task.id;
      st.task.max_turns = jt.value("max_turns", 10);
      st.task.validate();
      st.start = jt.value("start", app->home);
      if (!app->screens.count(st.start)) throw ConfigError("task '" + st.task.id + "' starts on missing screen");
      const auto& jg = jt.at("goal");
      if (auto it = jg.find("screen"); it != jg.end()) st.goal.screen = it->get<std::string>();
      st.goal.typed_contains = jg.value("typed_contains", std::vector<std::string>{});
      st.goal.visited = jg.value("visited", std::vector<std::string>{});
      for (const auto& ja2 : jt.at("demo")) st.demo.push_back(action_from_json(ja2, st.task.space));
      script.tasks.push_back(std::move(st));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad task script: ") + e.what());
  } catch (const ParseError& e) {
    throw ParseError(std::string("bad task script: ") + e.what());
  }

  std::set<std::string> ids;
  for (const auto& st : script.tasks) {
    if (!ids.insert(st.task.id).second) throw ConfigError("duplicate task id '" + st.task.id + "'");
    if (static_cast<int>(st.demo.size()) > st.task.max_turns) {
      throw ConfigError("demo for task '" + st.task.id + "' is longer than max_turns");
    }
    demo_trajectory(*app, st);  // throws on divergence
    const auto states = replay_states(*app, st);
    bool ok = false;
    if (st.task.space.has_task_complete()) {
      ok = !st.demo.empty() && st.demo.back().type == ActionType::task_complete &&
           st.goal.holds(states[states.size() - 2]);
    } else {
      ok = st.goal.holds(states.back());
    }
    if (!ok) throw ConfigError("demo for task '" + st.task.id + "' does not reach its goal");
  }

  script.app = std::move(app);
  script.suite_hash = text::hex64(text::fnv1a(j.dump()));
  return script;
}

TaskScript load_task_script(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open task script '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("task script '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_task_script(j);
}

SimEnv::SimEnv(std::shared_ptr<const SimApp> app, SimTask task)
    : app_(std::move(app)), task_(std::move(task)), state_(initial_state(task_)) {}

Observation SimEnv::observe() const { return {state_.screen_id, app_->screen(state_.screen_id).screen}; }

Observation SimEnv::reset() {
  state_ = initial_state(task_);
  return observe();
}

Observation SimEnv::apply(const Action& a) {
  state_ = step_state(*app_, task_.task.space, state_, a);
  return observe();
}

bool SimEnv::goal_reached() const { return task_.goal.holds(state_); }

std::optional<Action> SimEnv::expert(int remaining_turns) const {
  return expert_action(*app_, task_, state_, remaining_turns);
}

std::optional<GroundTruthAction> SimEnv::ground_truth(int remaining_turns) const {
  auto a = expert(remaining_turns);
  if (!a) return std::nullopt;
  return to_ground_truth(*a, app_->screen(state_.screen_id).screen);
}

}  // namespace prmnav::sim
