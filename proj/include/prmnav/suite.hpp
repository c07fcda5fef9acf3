#pragma once

#include <vector>

#include "prmnav/engine.hpp"
#include "prmnav/policy.hpp"
#include "prmnav/simenv.hpp"

// Glue between the simulator and the engine.

namespace prmnav {

// The task's demo as reference screens for static replay.
std::vector<StaticStep> static_replay_steps(const sim::SimApp& app, const sim::SimTask& task);

// Expert for static replay: the demo action at the request's step index.
ExpertFn demo_expert(const sim::SimTask& task);

// Expert for live episodes: the environment's shortest completion from its
// current state. `env` must outlive the returned function.
ExpertFn env_expert(const sim::SimEnv& env);

}  // namespace prmnav
