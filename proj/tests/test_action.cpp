#include <gtest/gtest.h>

#include <random>

#include "prmnav/action.hpp"
#include "prmnav/error.hpp"
#include "prmnav/trajectory.hpp"

using namespace prmnav;

namespace {

bool has(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(ActionSpace, ExactMembership) {
  using enum ActionType;
  EXPECT_EQ(ActionSpace::aitw().allowed(),
            (std::vector<ActionType>{click, type, navigate_home, navigate_back, enter, scroll, task_complete}));
  EXPECT_EQ(ActionSpace::gui_odyssey().allowed(),
            (std::vector<ActionType>{click, longpress, type, navigate_home, navigate_back, scroll}));
  EXPECT_EQ(ActionSpace::mind2web().allowed(), (std::vector<ActionType>{click, type}));
  EXPECT_TRUE(ActionSpace::aitw().has_enter());
  EXPECT_FALSE(ActionSpace::gui_odyssey().has_enter());
  EXPECT_TRUE(ActionSpace::mind2web().type_requires_target());
  EXPECT_THROW(ActionSpace::from_name("android"), ConfigError);
}

TEST(ParseAction, ClickAndScroll) {
  auto a = parse_action(R"({"action_type":"click","id":5})", ActionSpace::aitw());
  EXPECT_EQ(a, Action::click(5));
  auto s = parse_action(R"({"action_type":"scroll","direction":"up"})", ActionSpace::aitw());
  EXPECT_EQ(s, Action::scroll(Direction::up));
}

TEST(ParseAction, LongpressOutsideOdyssey) {
  try {
    parse_action(R"({"action_type":"longpress","id":2})", ActionSpace::aitw());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown action_type"), std::string::npos);
  }
  EXPECT_EQ(parse_action(R"({"action_type":"longpress","id":2})", ActionSpace::gui_odyssey()), Action::longpress(2));
}

TEST(ParseAction, RejectsMalformed) {
  const auto aitw = ActionSpace::aitw();
  EXPECT_THROW(parse_action("{", aitw), ParseError);
  EXPECT_THROW(parse_action("[1]", aitw), ParseError);
  EXPECT_THROW(parse_action(R"({"action_type":"click"})", aitw), ParseError);
  EXPECT_THROW(parse_action(R"({"action_type":"click","id":-1})", aitw), ParseError);
  EXPECT_THROW(parse_action(R"({"action_type":"click","id":1.5})", aitw), ParseError);
  EXPECT_THROW(parse_action(R"({"action_type":"click","id":"3"})", aitw), ParseError);
  EXPECT_THROW(parse_action(R"({"action_type":"click","id":1,"text":"x"})", aitw), ParseError);
  EXPECT_THROW(parse_action(R"({"action_type":"click","id":1,"extra":true})", aitw), ParseError);
  EXPECT_THROW(parse_action(R"({"action_type":"scroll","direction":"sideways"})", aitw), ParseError);
  EXPECT_THROW(parse_action(R"({"action_type":"navigate_home","id":0})", aitw), ParseError);
  EXPECT_THROW(parse_action(R"({"action_type":"type","text":"x"})", ActionSpace::mind2web()), ParseError);
}

TEST(SerializeAction, CanonicalForm) {
  EXPECT_EQ(serialize_action(Action::type_text("walmart")), R"({"action_type":"type","text":"walmart"})");
  EXPECT_EQ(serialize_action(Action::bare(ActionType::navigate_home)), R"({"action_type":"navigate_home"})");
  EXPECT_EQ(serialize_action(Action::type_text("a", 3)), R"({"action_type":"type","id":3,"text":"a"})");
  EXPECT_EQ(serialize_action(Action::scroll(Direction::left)), R"({"action_type":"scroll","direction":"left"})");
}

TEST(ValidateAction, Examples) {
  EXPECT_TRUE(validate_action(Action::click(3), ActionSpace::aitw()).empty());
  Action no_id{ActionType::click, {}, {}, {}};
  EXPECT_TRUE(has(validate_action(no_id, ActionSpace::aitw()), "missing id"));
  EXPECT_TRUE(has(validate_action(Action::type_text("x"), ActionSpace::mind2web()),
                  "mind2web type requires target id"));
  EXPECT_FALSE(validate_action(Action::type_text(""), ActionSpace::aitw()).empty());
  EXPECT_FALSE(validate_action(Action::bare(ActionType::enter), ActionSpace::gui_odyssey()).empty());
  Action overfull{ActionType::scroll, 1u, std::string("t"), Direction::up};
  EXPECT_GE(validate_action(overfull, ActionSpace::aitw()).size(), 2u);
}

TEST(ValidateAction, TotalOnArbitraryInput) {
  std::mt19937 rng(7);
  const ActionSpace spaces[] = {ActionSpace::aitw(), ActionSpace::gui_odyssey(), ActionSpace::mind2web()};
  for (int i = 0; i < 2000; ++i) {
    Action a;
    a.type = static_cast<ActionType>(rng() % 8);
    if (rng() % 2) a.id = rng() % 50;
    if (rng() % 2) a.text = std::string(rng() % 3, 'x');
    if (rng() % 2) a.direction = static_cast<Direction>(rng() % 4);
    for (const auto& sp : spaces) EXPECT_NO_THROW(validate_action(a, sp));
  }
}

TEST(Describe, Clauses) {
  EXPECT_EQ(describe(Action::click(5)), "click element 5");
  EXPECT_EQ(describe(Action::scroll(Direction::down)), "scroll down");
  EXPECT_EQ(describe(Action::bare(ActionType::task_complete)), "task complete");
}

TEST(Task, Validate) {
  Task t{"t", "", ActionSpace::aitw(), "g", 5};
  EXPECT_THROW(t.validate(), ConfigError);
  t.instruction = "go";
  t.max_turns = 0;
  EXPECT_THROW(t.validate(), ConfigError);
  t.max_turns = 1;
  EXPECT_NO_THROW(t.validate());
}
