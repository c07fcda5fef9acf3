#include "prmnav/policy.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "prmnav/error.hpp"
#include "prmnav/text.hpp"

namespace prmnav {
namespace {

constexpr std::string_view kActionMarker = "So the next one action is:";

constexpr std::array<std::string_view, 4> kRequiredPlaceholders = {
    "{instruction}", "{available_actions}", "{previous_actions}", "{k}"};
constexpr std::string_view kScreenPlaceholder = "{screen_elements}";

std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Position just past "<letter><digits>\s*:" if one starts at i.
std::optional<std::pair<int, std::size_t>> marker_at(std::string_view s, std::size_t i, char letter) {
  if (s[i] != letter) return std::nullopt;
  if (i > 0 && std::isalnum(static_cast<unsigned char>(s[i - 1]))) return std::nullopt;
  std::size_t j = i + 1;
  int index = 0;
  const std::size_t digits_start = j;
  while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])) && j - digits_start < 6) {
    index = index * 10 + (s[j] - '0');
    ++j;
  }
  if (j == digits_start) return std::nullopt;
  while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
  if (j >= s.size() || s[j] != ':') return std::nullopt;
  return std::make_pair(index, j + 1);
}

// Returns [begin, end) of the balanced {...} object starting at or after `from`.
std::optional<std::pair<std::size_t, std::size_t>> json_object_span(std::string_view s, std::size_t from) {
  const auto open = s.find('{', from);
  if (open == std::string_view::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return std::make_pair(open, i + 1);
    }
  }
  return std::nullopt;
}

struct Block {
  int index;
  std::size_t body_begin;
  std::size_t end;
};

std::vector<Block> find_blocks(std::string_view s) {
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto m = marker_at(s, i, 'G');
    if (!m) continue;
    if (!blocks.empty()) blocks.back().end = i;
    blocks.push_back({m->first, m->second, s.size()});
    i = m->second - 1;
  }
  return blocks;
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& task_id, std::size_t step, const std::string& screen_id) {
  std::uint64_t h = text::fnv1a(std::to_string(seed));
  h = text::fnv1a("|" + task_id, h);
  h = text::fnv1a("|" + std::to_string(step), h);
  h = text::fnv1a("|" + screen_id, h);
  return h;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

void PromptTemplate::validate() const {
  for (auto ph : kRequiredPlaceholders) {
    const auto n = count_occurrences(body, ph);
    if (n != 1) {
      throw ConfigError("template '" + name + "': placeholder " + std::string(ph) + " appears " + std::to_string(n) +
                        " times (expected once)");
    }
  }
  if (count_occurrences(body, kScreenPlaceholder) > 1) {
    throw ConfigError("template '" + name + "': placeholder {screen_elements} repeated");
  }
}

PromptTemplate PromptTemplate::default_inference() {
  return {"inference",
          "Task: {instruction}\n"
          "\n"
          "Task requirements:\n"
          "You control a phone or browser through its screen. Every interactive element is marked with a numeric ID; "
          "refer to elements only by these IDs. Your action is executed automatically and nobody will intervene. "
          "If the answer the user wants is already visible on the current screen, the task can be marked complete.\n"
          "\n"
          "Screen elements:\n"
          "{screen_elements}\n"
          "\n"
          "Available actions:\n"
          "{available_actions}\n"
          "\n"
          "Summary of previous actions:\n"
          "Previous actions: {previous_actions}\n"
          "\n"
          "Instruction:\n"
          "Think step by step and give your {k} best thought processes, each ending in exactly one next action. "
          "For each action, also give the probability (0.0 to 1.0) that it moves the task forward at this stage.\n"
          "Answer format:\n"};
}

PromptTemplate PromptTemplate::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open prompt template '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  PromptTemplate tpl{path, ss.str()};
  tpl.validate();
  return tpl;
}

std::string describe_available_actions(const ActionSpace& space) {
  std::ostringstream os;
  for (auto t : space.allowed()) {
    switch (t) {
      case ActionType::click:
        os << "- click: tap the element with the given id. {\"action_type\": \"click\", \"id\": <element id>}\n";
        break;
      case ActionType::longpress:
        os << "- longpress: press and hold the element with the given id. "
              "{\"action_type\": \"longpress\", \"id\": <element id>}\n";
        break;
      case ActionType::type:
        if (space.type_requires_target()) {
          os << "- type: enter text into the element with the given id. "
                "{\"action_type\": \"type\", \"id\": <element id>, \"text\": <text>}\n";
        } else {
          os << "- type: enter text into the focused field. {\"action_type\": \"type\", \"text\": <text>}\n";
        }
        break;
      case ActionType::navigate_home:
        os << "- navigate_home: go to the home screen. {\"action_type\": \"navigate_home\"}\n";
        break;
      case ActionType::navigate_back:
        os << "- navigate_back: go to the previous screen. {\"action_type\": \"navigate_back\"}\n";
        break;
      case ActionType::enter:
        os << "- enter: press the enter key. {\"action_type\": \"enter\"}\n";
        break;
      case ActionType::scroll:
        os << "- scroll: scroll up, down, left or right. {\"action_type\": \"scroll\", \"direction\": <direction>}\n";
        break;
      case ActionType::task_complete:
        os << "- task_complete: declare the task finished. {\"action_type\": \"task_complete\"}\n";
        break;
    }
  }
  auto s = os.str();
  if (!s.empty()) s.pop_back();
  return s;
}

std::string describe_screen(const LabeledScreen& screen) {
  std::ostringstream os;
  for (const auto& e : screen.elements) {
    os << "[" << e.label << "] " << (e.name.empty() ? "(unnamed)" : e.name) << " at (" << text::format_double(e.anchor.x)
       << ", " << text::format_double(e.anchor.y) << ")\n";
  }
  auto s = os.str();
  if (!s.empty()) s.pop_back();
  return s;
}

std::string answer_slots(int k) {
  std::ostringstream os;
  for (int i = 1; i <= k; ++i) {
    os << "G" << i << ": <your reasoning, at most three sentences> " << kActionMarker
       << "{\"action_type\": <one of the available actions>, <remaining fields of the action>}\n";
    os << "P" << i << ": <probability between 0.0 and 1.0 that G" << i << " is correct; the number only>\n";
  }
  return os.str();
}

std::string render_inference_prompt(const PromptTemplate& tpl, const Task& task, const std::string& summary,
                                    const ActionSpace& space, int k, const LabeledScreen* screen) {
  if (k < 1) throw ConfigError("k must be >= 1");
  tpl.validate();
  const std::array<std::pair<std::string_view, std::string>, 5> values = {{
      {"{instruction}", task.instruction},
      {"{available_actions}", describe_available_actions(space)},
      {"{previous_actions}", summary},
      {"{k}", std::to_string(k)},
      {kScreenPlaceholder, screen ? describe_screen(*screen) : std::string{}},
  }};
  // Single pass, so substituted text is never rescanned for placeholders.
  std::string out;
  const std::string_view body(tpl.body);
  for (std::size_t i = 0; i < body.size();) {
    bool replaced = false;
    if (body[i] == '{') {
      for (const auto& [ph, value] : values) {
        if (body.substr(i, ph.size()) == ph) {
          out += value;
          i += ph.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(body[i++]);
  }
  if (!out.empty() && out.back() != '\n') out.push_back('\n');
  out += answer_slots(k);
  return out;
}

CandidateSet parse_topk_response(const std::string& text, const ActionSpace& space, int k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  const std::string_view s(text);
  CandidateSet set;
  set.k = k;
  for (const auto& block : find_blocks(s)) {
    if (static_cast<int>(set.candidates.size()) >= k) break;
    const auto body = s.substr(0, block.end);
    auto marker = body.find(kActionMarker, block.body_begin);
    const std::size_t json_from = marker == std::string_view::npos ? block.body_begin : marker + kActionMarker.size();
    auto span = json_object_span(body, json_from);
    if (!span) continue;

    Candidate c;
    c.action = parse_action(body.substr(span->first, span->second - span->first), space);
    const std::size_t rationale_end = marker == std::string_view::npos ? span->first : marker;
    c.rationale = trim(body.substr(block.body_begin, rationale_end - block.body_begin));

    for (std::size_t i = span->second; i < body.size(); ++i) {
      auto p = marker_at(body, i, 'P');
      if (!p) continue;
      const std::string tail(body.substr(p->second, std::min<std::size_t>(64, body.size() - p->second)));
      char* end = nullptr;
      const double v = std::strtod(tail.c_str(), &end);
      if (end != tail.c_str()) {
        if (std::isnan(v)) {
          c.confidence = 0.0;
          c.confidence_clamped = true;
        } else {
          c.confidence = std::clamp(v, 0.0, 1.0);
          c.confidence_clamped = c.confidence != v;
        }
      }
      break;
    }
    set.candidates.push_back(std::move(c));
  }
  if (set.candidates.empty()) throw ParseError("no parseable G/P candidates in model reply");
  return set;
}

std::string synthesize_topk_response(const CandidateSet& set) {
  std::ostringstream os;
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    const auto& c = set.candidates[i];
    os << "G" << i + 1 << ": " << c.rationale << " " << kActionMarker << serialize_action(c.action) << "\n";
    os << "P" << i + 1 << ": " << text::format_double(c.confidence) << "\n";
  }
  return os.str();
}

std::string history_with_reflections(const PolicyRequest& req) {
  if (req.reflections.empty()) return req.summary;
  std::string out = "Lessons from earlier failed attempts:";
  for (const auto& r : req.reflections) out += "\n- " + r;
  out += "\n";
  out += req.summary;
  return out;
}

namespace {

Usage estimate_usage(const PromptTemplate& tpl, const PolicyRequest& req, const CandidateSet& set) {
  const auto prompt =
      render_inference_prompt(tpl, req.task, history_with_reflections(req), req.task.space, req.k, &req.screen);
  return {text::estimate_tokens(prompt), text::estimate_tokens(synthesize_topk_response(set))};
}

CandidateSet candidates_from_json(const nlohmann::json& arr, const ActionSpace& space) {
  CandidateSet set;
  for (const auto& cj : arr) {
    Candidate c;
    c.action = action_from_json(cj.at("action"), space);
    c.rationale = cj.value("rationale", std::string{});
    c.confidence = std::clamp(cj.value("confidence", 0.0), 0.0, 1.0);
    set.candidates.push_back(std::move(c));
  }
  set.k = static_cast<int>(std::max<std::size_t>(1, set.candidates.size()));
  return set;
}

}  // namespace

ScriptedPolicy ScriptedPolicy::from_json(const nlohmann::json& j, const std::map<std::string, ActionSpace>& spaces) {
  Script script;
  Script reflected;
  try {
    for (const auto& entry : j.at("scripts")) {
      const auto task_id = entry.at("task_id").get<std::string>();
      auto sp = spaces.find(task_id);
      if (sp == spaces.end()) throw ConfigError("script references unknown task '" + task_id + "'");
      const auto& steps = entry.at("steps");
      for (std::size_t i = 0; i < steps.size(); ++i) script[{task_id, i}] = candidates_from_json(steps[i], sp->second);
      if (auto it = entry.find("reflected_steps"); it != entry.end()) {
        for (std::size_t i = 0; i < it->size(); ++i) reflected[{task_id, i}] = candidates_from_json((*it)[i], sp->second);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad policy script: ") + e.what());
  }
  return ScriptedPolicy(std::move(script), std::move(reflected));
}

PolicyReply ScriptedPolicy::propose(const PolicyRequest& req) {
  const Key key{req.task.id, req.step_index};
  const CandidateSet* found = nullptr;
  if (!req.reflections.empty()) {
    if (auto it = reflected_.find(key); it != reflected_.end()) found = &it->second;
  }
  if (!found) {
    auto it = script_.find(key);
    if (it == script_.end()) {
      throw LookupError("no scripted candidates for task '" + req.task.id + "' step " + std::to_string(req.step_index));
    }
    found = &it->second;
  }
  PolicyReply reply{*found, {}};
  reply.usage = estimate_usage(PromptTemplate::default_inference(), req, reply.candidates);
  return reply;
}

NoisyExpertConfig NoisyExpertConfig::from_json(const nlohmann::json& j, const ActionSpace& space) {
  NoisyExpertConfig c;
  c.rank_weights = j.value("rank_weights", c.rank_weights);
  c.generation_k = j.value("generation_k", c.generation_k);
  if (auto it = j.find("distractors"); it != j.end()) {
    for (const auto& a : *it) c.distractor_pool.push_back(action_from_json(a, space));
  }
  double total = 0;
  for (double w : c.rank_weights) {
    if (!(w >= 0)) throw ConfigError("rank weights must be non-negative");
    total += w;
  }
  if (total > 1.0 + 1e-12) throw ConfigError("rank weights sum above 1");
  if (c.generation_k < 1) throw ConfigError("generation_k must be >= 1");
  return c;
}

NoisyExpertPolicy::NoisyExpertPolicy(ExpertFn expert, NoisyExpertConfig cfg, std::uint64_t seed, PromptTemplate tpl)
    : expert_(std::move(expert)), cfg_(std::move(cfg)), seed_(seed), tpl_(std::move(tpl)) {}

PolicyReply NoisyExpertPolicy::propose(const PolicyRequest& req) {
  std::mt19937_64 rng(mix_seed(seed_, req.task.id, req.step_index, req.screen_id));
  const auto& space = req.task.space;
  const auto correct = expert_(req);

  std::vector<Action> pool;
  if (!cfg_.distractor_pool.empty()) {
    pool = cfg_.distractor_pool;
  } else {
    for (const auto& e : req.screen.elements) {
      if (space.allows(ActionType::click)) pool.push_back(Action::click(e.label));
    }
    if (space.allows(ActionType::scroll)) {
      for (auto d : {Direction::up, Direction::down, Direction::left, Direction::right}) pool.push_back(Action::scroll(d));
    }
    if (space.allows(ActionType::navigate_back)) pool.push_back(Action::bare(ActionType::navigate_back));
  }
  std::erase_if(pool, [&](const Action& a) { return (correct && a == *correct) || !validate_action(a, space).empty(); });
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng() % i]);

  const double u = unit(rng);
  std::optional<std::size_t> rank;
  double acc = 0;
  for (std::size_t r = 0; r < cfg_.rank_weights.size() && static_cast<int>(r) < cfg_.generation_k; ++r) {
    acc += cfg_.rank_weights[r];
    if (u < acc) {
      rank = r;
      break;
    }
  }
  if (!correct) rank.reset();

  std::vector<Action> actions;
  const std::size_t n_distract = static_cast<std::size_t>(cfg_.generation_k) - (rank ? 1 : 0);
  for (std::size_t i = 0; i < n_distract && i < pool.size(); ++i) actions.push_back(pool[i]);
  if (rank) actions.insert(actions.begin() + static_cast<std::ptrdiff_t>(std::min(*rank, actions.size())), *correct);
  if (actions.empty() && correct) actions.push_back(*correct);
  if (actions.empty()) throw LookupError("noisy expert has no candidate to offer on screen '" + req.screen_id + "'");

  CandidateSet set;
  set.k = req.k;
  for (std::size_t i = 0; i < actions.size() && static_cast<int>(i) < req.k; ++i) {
    Candidate c;
    c.action = actions[i];
    c.rationale = "Option " + std::to_string(i + 1) + ": " + describe(actions[i]) + ".";
    c.confidence = 1.0 / static_cast<double>(i + 2);
    set.candidates.push_back(std::move(c));
  }
  PolicyReply reply{std::move(set), {}};
  reply.usage = estimate_usage(tpl_, req, reply.candidates);
  return reply;
}

WirePolicy::WirePolicy(WireConfig cfg, PromptTemplate tpl) : client_(std::move(cfg)), tpl_(std::move(tpl)) {
  tpl_.validate();
}

PolicyReply WirePolicy::propose(const PolicyRequest& req) {
  const auto prompt =
      render_inference_prompt(tpl_, req.task, history_with_reflections(req), req.task.space, req.k, &req.screen);
  auto reply = client_.complete(prompt, req.image_base64);
  return {parse_topk_response(reply.content, req.task.space, req.k), reply.usage};
}

}  // namespace prmnav
