#include "prmnav/suite.hpp"

namespace prmnav {

std::vector<StaticStep> static_replay_steps(const sim::SimApp& app, const sim::SimTask& task) {
  std::vector<StaticStep> out;
  for (auto& d : sim::demo_trajectory(app, task)) {
    out.push_back({std::move(d.screen_id), std::move(d.screen), std::move(d.ground_truth)});
  }
  return out;
}

ExpertFn demo_expert(const sim::SimTask& task) {
  return [demo = task.demo](const PolicyRequest& req) -> std::optional<Action> {
    if (req.step_index >= demo.size()) return std::nullopt;
    return demo[req.step_index];
  };
}

ExpertFn env_expert(const sim::SimEnv& env) {
  return [&env](const PolicyRequest& req) {
    return env.expert(req.task.max_turns - static_cast<int>(req.step_index));
  };
}

}  // namespace prmnav
