#include "prmnav/matcher.hpp"

#include <algorithm>
#include <cmath>

#include "prmnav/error.hpp"
#include "prmnav/text.hpp"

namespace prmnav {

void MatchConfig::validate() const {
  if (!(click_distance_fraction > 0.0 && click_distance_fraction < 1.0)) {
    throw ConfigError("click_distance_fraction must lie in (0,1)");
  }
  if (!(box_expand_factor >= 1.0)) throw ConfigError("box_expand_factor must be >= 1");
}

MatchConfig MatchConfig::from_json(const nlohmann::json& j) {
  MatchConfig cfg;
  cfg.click_distance_fraction = j.value("click_distance_fraction", cfg.click_distance_fraction);
  cfg.box_expand_factor = j.value("box_expand_factor", cfg.box_expand_factor);
  cfg.normalize_text = j.value("normalize_text", cfg.normalize_text);
  cfg.validate();
  return cfg;
}

GroundTruthAction to_ground_truth(const Action& a, const LabeledScreen& screen) {
  GroundTruthAction gt;
  gt.type = a.type;
  gt.text = a.text;
  gt.direction = a.direction;
  if (a.id) {
    const auto& el = resolve_label(screen, *a.id);
    gt.element_candidates = std::vector<std::uint32_t>{*a.id};
    if (a.type == ActionType::click || a.type == ActionType::longpress) gt.point = el.anchor;
  }
  return gt;
}

bool match_click(std::uint32_t pred_id, const GroundTruthAction& gt, const LabeledScreen& screen,
                 const MatchConfig& cfg) {
  const auto& el = resolve_label(screen, pred_id);
  if (!gt.point && !gt.element_candidates) {
    throw ConfigError("click ground truth carries neither a point nor element candidates");
  }
  if (gt.element_candidates) {
    const auto& c = *gt.element_candidates;
    if (std::find(c.begin(), c.end(), pred_id) != c.end()) return true;
  }
  if (gt.point) {
    const Point center = el.box.center();
    const double dist = std::hypot(center.x - gt.point->x, center.y - gt.point->y);
    if (dist / screen.size.diagonal() <= cfg.click_distance_fraction) return true;
    if (expand_box(el.box, cfg.box_expand_factor, screen.size).contains(*gt.point)) return true;
  }
  if (gt.box) {
    if (expand_box(*gt.box, cfg.box_expand_factor, screen.size).contains(el.box.center())) return true;
  }
  return false;
}

bool text_matches(std::string_view pred, std::string_view gt, const MatchConfig& cfg) {
  if (!cfg.normalize_text) return pred == gt;
  return text::normalize(pred) == text::normalize(gt);
}

bool match_action(const Action& pred, const GroundTruthAction& gt, const LabeledScreen& screen,
                  const MatchConfig& cfg) {
  if (pred.type != gt.type) return false;
  switch (pred.type) {
    case ActionType::click:
    case ActionType::longpress:
      if (!pred.id || !screen.find(*pred.id)) return false;
      return match_click(*pred.id, gt, screen, cfg);
    case ActionType::scroll:
      return pred.direction.has_value() && pred.direction == gt.direction;
    case ActionType::type:
      return pred.text && gt.text && text_matches(*pred.text, *gt.text, cfg);
    case ActionType::navigate_home:
    case ActionType::navigate_back:
    case ActionType::enter:
    case ActionType::task_complete:
      return true;
  }
  return false;
}

std::vector<RewardSample> annotate_trajectory(const std::string& instruction,
                                              std::span<const PredictedStep> pred,
                                              std::span<const GroundTruthAction> gt,
                                              const MatchConfig& cfg) {
  if (pred.size() != gt.size()) {
    throw ConfigError("prediction/ground-truth length mismatch: " + std::to_string(pred.size()) + " vs " +
                      std::to_string(gt.size()));
  }
  std::vector<RewardSample> out;
  out.reserve(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    RewardSample s;
    s.instruction = instruction;
    s.summary = pred[i].summary;
    s.screen = pred[i].screen;
    s.action = pred[i].action;
    s.reward = match_action(pred[i].action, gt[i], pred[i].screen, cfg) ? 1.0 : 0.0;
    s.source = SampleSource::self_play;
    s.step_index = pred[i].step_index;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<RewardSample> human_demo_samples(const std::string& instruction,
                                             std::span<const PredictedStep> demo) {
  std::vector<RewardSample> out;
  out.reserve(demo.size());
  for (const auto& step : demo) {
    RewardSample s;
    s.instruction = instruction;
    s.summary = step.summary;
    s.screen = step.screen;
    s.action = step.action;
    s.reward = 1.0;
    s.source = SampleSource::human_demo;
    s.step_index = step.step_index;
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::ordered_json ground_truth_to_json(const GroundTruthAction& gt) {
  nlohmann::ordered_json j;
  j["action_type"] = to_string(gt.type);
  if (gt.point) j["point"] = {gt.point->x, gt.point->y};
  if (gt.text) j["text"] = *gt.text;
  if (gt.direction) j["direction"] = to_string(*gt.direction);
  if (gt.element_candidates) j["element_candidates"] = *gt.element_candidates;
  if (gt.box) j["box"] = {gt.box->x0, gt.box->y0, gt.box->x1, gt.box->y1};
  return j;
}

GroundTruthAction ground_truth_from_json(const nlohmann::json& j) {
  try {
    GroundTruthAction gt;
    const auto type_name = j.at("action_type").get<std::string>();
    auto type = action_type_from_string(type_name);
    if (!type) throw ParseError("unknown ground-truth action_type '" + type_name + "'");
    gt.type = *type;
    if (auto it = j.find("point"); it != j.end()) gt.point = Point{(*it).at(0).get<double>(), (*it).at(1).get<double>()};
    if (auto it = j.find("text"); it != j.end()) gt.text = it->get<std::string>();
    if (auto it = j.find("direction"); it != j.end()) {
      auto d = direction_from_string(it->get<std::string>());
      if (!d) throw ParseError("unknown direction in ground truth");
      gt.direction = *d;
    }
    if (auto it = j.find("element_candidates"); it != j.end()) {
      gt.element_candidates = it->get<std::vector<std::uint32_t>>();
    }
    if (auto it = j.find("box"); it != j.end()) {
      gt.box = Box{(*it).at(0).get<double>(), (*it).at(1).get<double>(), (*it).at(2).get<double>(),
                   (*it).at(3).get<double>()};
    }
    return gt;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad ground-truth JSON: ") + e.what());
  }
}

}  // namespace prmnav
