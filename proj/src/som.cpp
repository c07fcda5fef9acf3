#include "prmnav/som.hpp"

#include <algorithm>
#include <cmath>

#include "prmnav/error.hpp"

namespace prmnav {

double ScreenSize::diagonal() const { return std::hypot(width, height); }

const LabeledElement* LabeledScreen::find(std::uint32_t label) const {
  for (const auto& e : elements) {
    if (e.label == label) return &e;
  }
  return nullptr;
}

LabeledScreen assign_labels(std::span<const ElementBox> boxes, ScreenSize size) {
  if (!(size.width > 0) || !(size.height > 0)) throw ConfigError("screen dimensions must be positive");
  LabeledScreen screen;
  screen.size = size;
  screen.elements.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& in = boxes[i];
    if (in.box.degenerate()) throw ConfigError("degenerate box at index " + std::to_string(i));
    Box clamped = clamp_to(in.box, size);
    if (clamped.degenerate()) throw ConfigError("box at index " + std::to_string(i) + " lies outside the screen");
    LabeledElement e;
    e.label = static_cast<std::uint32_t>(i);
    e.box = clamped;
    e.anchor = clamped.center();
    e.name = in.name;
    screen.elements.push_back(std::move(e));
  }

  // Nested boxes both keep their labels; only partial overlaps compete.
  auto& els = screen.elements;
  for (std::size_t i = 0; i < els.size(); ++i) {
    for (std::size_t j = i + 1; j < els.size(); ++j) {
      const Box& a = els[i].box;
      const Box& b = els[j].box;
      if (!a.overlaps(b) || a.contains(b) || b.contains(a)) continue;
      if (b.area() < a.area()) {
        els[j].priority_over.push_back(els[i].label);
      } else {
        els[i].priority_over.push_back(els[j].label);
      }
    }
  }
  for (auto& e : els) std::sort(e.priority_over.begin(), e.priority_over.end());
  return screen;
}

LabeledScreen assign_labels(std::span<const Box> boxes, ScreenSize size) {
  std::vector<ElementBox> named;
  named.reserve(boxes.size());
  for (const auto& b : boxes) named.push_back({b, {}});
  return assign_labels(std::span<const ElementBox>(named), size);
}

const LabeledElement& resolve_label(const LabeledScreen& screen, std::uint32_t label) {
  const auto* e = screen.find(label);
  if (!e) throw LookupError("unknown label " + std::to_string(label));
  return *e;
}

Box scale_about_center(const Box& b, double factor) {
  const Point c = b.center();
  const double hw = b.width() / 2.0 * factor;
  const double hh = b.height() / 2.0 * factor;
  return {c.x - hw, c.y - hh, c.x + hw, c.y + hh};
}

Box clamp_to(const Box& b, ScreenSize size) {
  return {std::clamp(b.x0, 0.0, size.width), std::clamp(b.y0, 0.0, size.height),
          std::clamp(b.x1, 0.0, size.width), std::clamp(b.y1, 0.0, size.height)};
}

Box expand_box(const Box& b, double factor, ScreenSize size) {
  if (!(factor > 0)) throw ConfigError("expansion factor must be positive");
  return clamp_to(scale_about_center(b, factor), size);
}

LabeledScreen screen_from_json(const nlohmann::json& j) {
  try {
    ScreenSize size{j.at("width").get<double>(), j.at("height").get<double>()};
    std::vector<ElementBox> boxes;
    for (const auto& e : j.at("elements")) {
      const auto& arr = e.at("box");
      if (!arr.is_array() || arr.size() != 4) throw ParseError("element box must be [x0,y0,x1,y1]");
      ElementBox eb;
      eb.box = {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>(), arr[3].get<double>()};
      eb.name = e.value("name", std::string{});
      boxes.push_back(std::move(eb));
    }
    return assign_labels(std::span<const ElementBox>(boxes), size);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad screen JSON: ") + e.what());
  }
}

nlohmann::ordered_json screen_to_json(const LabeledScreen& s) {
  nlohmann::ordered_json j;
  j["width"] = s.size.width;
  j["height"] = s.size.height;
  auto elements = nlohmann::ordered_json::array();
  for (const auto& e : s.elements) {
    nlohmann::ordered_json ej;
    ej["label"] = e.label;
    ej["box"] = {e.box.x0, e.box.y0, e.box.x1, e.box.y1};
    if (!e.name.empty()) ej["name"] = e.name;
    ej["anchor"] = {e.anchor.x, e.anchor.y};
    if (!e.priority_over.empty()) ej["priority_over"] = e.priority_over;
    elements.push_back(std::move(ej));
  }
  j["elements"] = std::move(elements);
  return j;
}

}  // namespace prmnav
