#pragma once

#include <optional>
#include <string>

#include "prmnav/action.hpp"
#include "prmnav/matcher.hpp"
#include "prmnav/som.hpp"

namespace prmnav {

struct Observation {
  std::string screen_id;
  LabeledScreen screen;
};

// What the engine needs from a GUI environment. One instance per episode.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Observation reset() = 0;
  // Total on valid actions: unmatched actions leave the state unchanged.
  virtual Observation apply(const Action& a) = 0;
  virtual bool goal_reached() const = 0;
  // Reference action for the current state, if the environment can supply
  // one within `remaining_turns`.
  virtual std::optional<GroundTruthAction> ground_truth(int remaining_turns) const {
    (void)remaining_turns;
    return std::nullopt;
  }
};

}  // namespace prmnav
