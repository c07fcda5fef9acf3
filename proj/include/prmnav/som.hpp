#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

// Set-of-Mark labeling over element boxes supplied by the environment.

namespace prmnav {

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Axis-aligned box in screen pixels; x0 < x1, y0 < y1.
struct Box {
  double x0 = 0;
  double y0 = 0;
  double x1 = 0;
  double y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  Point center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }
  bool degenerate() const { return !(x1 > x0) || !(y1 > y0); }

  // Inclusive of the boundary.
  bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  bool contains(const Box& o) const { return o.x0 >= x0 && o.x1 <= x1 && o.y0 >= y0 && o.y1 <= y1; }
  // Positive-area intersection.
  bool overlaps(const Box& o) const {
    return std::min(x1, o.x1) > std::max(x0, o.x0) && std::min(y1, o.y1) > std::max(y0, o.y0);
  }

  friend bool operator==(const Box&, const Box&) = default;
};

struct ScreenSize {
  double width = 0;
  double height = 0;
  double diagonal() const;
};

struct ElementBox {
  Box box;
  std::string name;
};

struct LabeledElement {
  std::uint32_t label = 0;
  Box box;
  Point anchor;  // where the numeric label is drawn: the box center
  std::string name;
  // Labels of overlapping (non-nested) elements this one outranks when the
  // marks collide: the smaller box wins, equal areas go to the lower label.
  std::vector<std::uint32_t> priority_over;

  bool render_priority() const { return !priority_over.empty(); }
  friend bool operator==(const LabeledElement&, const LabeledElement&) = default;
};

struct LabeledScreen {
  ScreenSize size;
  std::vector<LabeledElement> elements;

  const LabeledElement* find(std::uint32_t label) const;
};

// Labels 0..n-1 in input order. Boxes are clamped to the screen first; a box
// that is degenerate before or after clamping raises ConfigError.
LabeledScreen assign_labels(std::span<const ElementBox> boxes, ScreenSize size);
LabeledScreen assign_labels(std::span<const Box> boxes, ScreenSize size);

// Throws LookupError for an unknown label.
const LabeledElement& resolve_label(const LabeledScreen& screen, std::uint32_t label);

// Width and height scaled by `factor` about the center. No clamping.
Box scale_about_center(const Box& b, double factor);
Box clamp_to(const Box& b, ScreenSize size);
// scale_about_center followed by clamp_to.
Box expand_box(const Box& b, double factor, ScreenSize size);

// Ingest form: {width, height, elements:[{box:[x0,y0,x1,y1], name?}]}.
// Labeled elements in the input (with "label") are re-labeled by position.
LabeledScreen screen_from_json(const nlohmann::json& j);
// Labeled form: ingest form plus label, anchor, priority_over per element.
nlohmann::ordered_json screen_to_json(const LabeledScreen& s);

}  // namespace prmnav
