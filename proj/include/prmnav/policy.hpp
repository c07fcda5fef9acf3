#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "prmnav/action.hpp"
#include "prmnav/som.hpp"
#include "prmnav/trajectory.hpp"
#include "prmnav/wire.hpp"

namespace prmnav {

// Inference prompt with named placeholders. {instruction}, {available_actions},
// {previous_actions} and {k} must each appear exactly once; {screen_elements}
// is optional and may appear at most once.
struct PromptTemplate {
  std::string name;
  std::string body;

  void validate() const;  // throws ConfigError naming the offending placeholder

  static PromptTemplate default_inference();
  static PromptTemplate load(const std::string& path);
};

std::string describe_available_actions(const ActionSpace& space);
std::string describe_screen(const LabeledScreen& screen);

// The answer-slot block G1/P1 .. Gk/Pk appended after the template body.
std::string answer_slots(int k);

// `summary` is inserted verbatim under the previous-actions heading, even
// when empty.
std::string render_inference_prompt(const PromptTemplate& tpl, const Task& task, const std::string& summary,
                                    const ActionSpace& space, int k,
                                    const LabeledScreen* screen = nullptr);

// Parses up to k "Gi: <rationale> So the next one action is:{...}" blocks
// with their "Pi: <p>" lines. Confidences outside [0,1] are clamped and
// flagged. Throws ParseError if nothing parses or an action JSON is invalid.
CandidateSet parse_topk_response(const std::string& text, const ActionSpace& space, int k);

// Inverse of parse_topk_response for well-formed candidate sets.
std::string synthesize_topk_response(const CandidateSet& set);

struct PolicyRequest {
  Task task;
  std::string summary;
  LabeledScreen screen;
  std::string screen_id;
  int k = 1;
  std::size_t step_index = 0;
  std::vector<std::string> reflections;  // oldest first
  std::optional<std::string> image_base64;
};

struct PolicyReply {
  CandidateSet candidates;
  Usage usage;
};

// Reflections are prepended to the history summary in the prompt.
std::string history_with_reflections(const PolicyRequest& req);

class PolicyBackend {
 public:
  virtual ~PolicyBackend() = default;
  virtual PolicyReply propose(const PolicyRequest& req) = 0;
};

// Deterministic test double: returns the candidate set scripted for
// (task_id, step_index). When the request carries reflections, the
// reflected script is consulted first.
class ScriptedPolicy final : public PolicyBackend {
 public:
  using Key = std::pair<std::string, std::size_t>;
  using Script = std::map<Key, CandidateSet>;

  explicit ScriptedPolicy(Script script, Script reflected = {})
      : script_(std::move(script)), reflected_(std::move(reflected)) {}

  // {"scripts":[{"task_id":..., "steps":[[candidate...]...], "reflected_steps":[...]}]}
  // Candidate: {"action":{...}, "rationale":"...", "confidence":0.5}.
  static ScriptedPolicy from_json(const nlohmann::json& j, const std::map<std::string, ActionSpace>& spaces);

  PolicyReply propose(const PolicyRequest& req) override;

 private:
  Script script_;
  Script reflected_;
};

// Chooses the correct action for a request. Simulation-backed policies use the
// environment's expert.
using ExpertFn = std::function<std::optional<Action>(const PolicyRequest&)>;

struct NoisyExpertConfig {
  // rank_weights[r] = probability that the expert action is emitted at rank r.
  // Remaining mass means the expert action is missing from the set.
  std::vector<double> rank_weights{0.5, 0.3, 0.1};
  int generation_k = 3;  // candidates generated before truncation to the requested k
  // When non-empty, distractors are drawn from this pool only; otherwise from
  // the screen's elements, scrolls and navigate_back.
  std::vector<Action> distractor_pool;

  static NoisyExpertConfig from_json(const nlohmann::json& j, const ActionSpace& space);
};

// Stochastic scripted policy. For a fixed seed the candidate set depends only
// on (task_id, step_index, screen_id), so every selection strategy sees the
// same candidate stream. Reports estimated token usage of the rendered prompt
// and synthesized reply.
class NoisyExpertPolicy final : public PolicyBackend {
 public:
  NoisyExpertPolicy(ExpertFn expert, NoisyExpertConfig cfg, std::uint64_t seed,
                    PromptTemplate tpl = PromptTemplate::default_inference());

  PolicyReply propose(const PolicyRequest& req) override;

 private:
  ExpertFn expert_;
  NoisyExpertConfig cfg_;
  std::uint64_t seed_;
  PromptTemplate tpl_;
};

// Remote VLM adapter over the chat-completions wire format.
class WirePolicy final : public PolicyBackend {
 public:
  WirePolicy(WireConfig cfg, PromptTemplate tpl = PromptTemplate::default_inference());

  PolicyReply propose(const PolicyRequest& req) override;

 private:
  ChatClient client_;
  PromptTemplate tpl_;
};

}  // namespace prmnav
