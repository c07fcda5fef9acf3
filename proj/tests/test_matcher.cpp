#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "prmnav/error.hpp"
#include "prmnav/matcher.hpp"

using namespace prmnav;

namespace {

const ScreenSize kScreen{1080, 1920};

LabeledScreen one(Box b) {
  std::vector<Box> boxes{b};
  return assign_labels(boxes, kScreen);
}

GroundTruthAction click_at(double x, double y) {
  GroundTruthAction gt;
  gt.type = ActionType::click;
  gt.point = Point{x, y};
  return gt;
}

}  // namespace

TEST(MatchClick, DistanceRule) {
  // center (700,1100); distance to (540,960) is about 212.6, threshold about 308.4
  auto s = one({690, 1090, 710, 1110});
  EXPECT_TRUE(match_click(0, click_at(540, 960), s, {}));
  EXPECT_TRUE(oracle::click_matches({690, 1090, 710, 1110}, 540, 960, 1080, 1920));
}

TEST(MatchClick, ExpandedBoxRule) {
  // far from the center in distance terms only if the threshold is small
  MatchConfig tight;
  tight.click_distance_fraction = 0.01;
  auto s = one({100, 100, 200, 150});
  EXPECT_TRUE(match_click(0, click_at(250, 180), s, tight));
  EXPECT_FALSE(match_click(0, click_at(275, 180), s, tight));
}

TEST(MatchClick, ZeroDistance) {
  auto s = one({10, 10, 20, 20});
  EXPECT_TRUE(match_click(0, click_at(15, 15), s, {}));
}

TEST(MatchClick, FarAway) {
  auto s = one({0, 0, 50, 50});
  EXPECT_FALSE(match_click(0, click_at(1000, 1800), s, {}));
}

TEST(MatchClick, ElementCandidates) {
  std::vector<Box> boxes{{0, 0, 50, 50}, {900, 1700, 1000, 1800}};
  auto s = assign_labels(boxes, kScreen);
  GroundTruthAction gt;
  gt.type = ActionType::click;
  gt.element_candidates = std::vector<std::uint32_t>{1};
  EXPECT_TRUE(match_click(1, gt, s, {}));
  EXPECT_FALSE(match_click(0, gt, s, {}));
  EXPECT_THROW(match_click(7, gt, s, {}), LookupError);
  GroundTruthAction empty;
  EXPECT_THROW(match_click(0, empty, s, {}), ConfigError);
}

TEST(MatchClick, SymmetricGroundTruthBox) {
  MatchConfig tight;
  tight.click_distance_fraction = 0.01;
  auto s = one({400, 400, 410, 410});
  GroundTruthAction gt = click_at(100, 100);
  EXPECT_FALSE(match_click(0, gt, s, tight));
  gt.box = Box{200, 200, 400, 400};  // expands to (140,140)-(460,460), holding center (405,405)
  EXPECT_TRUE(match_click(0, gt, s, tight));
}

TEST(MatchClick, AgreesWithOracleAndMonotone) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 3000; ++i) {
    const double x0 = u(rng) * 1000, y0 = u(rng) * 1800;
    Box b{x0, y0, x0 + 2 + u(rng) * 300, y0 + 2 + u(rng) * 300};
    b.x1 = std::min(b.x1, 1080.0);
    b.y1 = std::min(b.y1, 1920.0);
    const double px = u(rng) * 1080, py = u(rng) * 1920;
    auto s = one(b);
    const bool got = match_click(0, click_at(px, py), s, {});
    EXPECT_EQ(got, oracle::click_matches({b.x0, b.y0, b.x1, b.y1}, px, py, 1080, 1920)) << i;
    MatchConfig wider;
    wider.click_distance_fraction = 0.2;
    wider.box_expand_factor = 3.0;
    if (got) EXPECT_TRUE(match_click(0, click_at(px, py), s, wider));
  }
}

TEST(MatchAction, TypesAndPayloads) {
  auto s = one({0, 0, 10, 10});
  GroundTruthAction up{ActionType::scroll, {}, {}, Direction::up, {}, {}};
  EXPECT_TRUE(match_action(Action::scroll(Direction::up), up, s, {}));
  GroundTruthAction down{ActionType::scroll, {}, {}, Direction::down, {}, {}};
  EXPECT_FALSE(match_action(Action::scroll(Direction::up), down, s, {}));

  GroundTruthAction typed{ActionType::type, {}, std::string("walmart"), {}, {}, {}};
  EXPECT_TRUE(match_action(Action::type_text("Walmart "), typed, s, {}));
  MatchConfig strict;
  strict.normalize_text = false;
  EXPECT_FALSE(match_action(Action::type_text("Walmart "), typed, s, strict));
  EXPECT_FALSE(match_action(Action::type_text("target"), typed, s, {}));

  GroundTruthAction home{ActionType::navigate_home, {}, {}, {}, {}, {}};
  EXPECT_TRUE(match_action(Action::bare(ActionType::navigate_home), home, s, {}));
  EXPECT_FALSE(match_action(Action::bare(ActionType::navigate_back), home, s, {}));
  EXPECT_FALSE(match_action(Action::click(0), home, s, {}));
  // unknown label never matches
  EXPECT_FALSE(match_action(Action::click(9), click_at(5, 5), s, {}));
}

TEST(MatchAction, TextNormalizerAgreesWithOracle) {
  const char* samples[] = {"Walmart", " walmart ", "WAL  MART", "wal mart", "a\tb", "A B", "", "  "};
  for (auto a : samples) {
    for (auto b : samples) {
      EXPECT_EQ(text_matches(a, b, {}), oracle::fold(a) == oracle::fold(b)) << a << "|" << b;
    }
  }
}

TEST(MatchAction, Reflexive) {
  std::vector<Box> boxes{{0, 0, 100, 100}, {200, 300, 260, 380}, {500, 500, 900, 600}};
  auto s = assign_labels(boxes, kScreen);
  std::vector<Action> actions{Action::click(0), Action::click(2), Action::longpress(1), Action::type_text("Hi there"),
                              Action::type_text("x", 1), Action::scroll(Direction::right),
                              Action::bare(ActionType::enter), Action::bare(ActionType::task_complete)};
  for (const auto& a : actions) EXPECT_TRUE(match_action(a, to_ground_truth(a, s), s, {})) << describe(a);
}

TEST(Annotate, RewardsAndLengths) {
  auto s = one({0, 0, 100, 100});
  std::vector<PredictedStep> pred{{s, Action::click(0), "", 0},
                                  {s, Action::scroll(Direction::up), "a", 1},
                                  {s, Action::type_text("x"), "b", 2},
                                  {s, Action::bare(ActionType::enter), "c", 3}};
  std::vector<GroundTruthAction> gt{click_at(50, 50), {ActionType::scroll, {}, {}, Direction::down, {}, {}},
                                    {ActionType::type, {}, std::string("X"), {}, {}, {}},
                                    {ActionType::enter, {}, {}, {}, {}, {}}};
  auto samples = annotate_trajectory("do it", pred, gt, {});
  ASSERT_EQ(samples.size(), 4u);
  std::vector<double> rewards;
  for (const auto& r : samples) rewards.push_back(r.reward);
  EXPECT_EQ(rewards, (std::vector<double>{1, 0, 1, 1}));
  EXPECT_EQ(samples[2].summary, "b");

  gt.pop_back();
  EXPECT_THROW(annotate_trajectory("do it", pred, gt, {}), ConfigError);
  EXPECT_TRUE(annotate_trajectory("x", std::span<const PredictedStep>{}, std::span<const GroundTruthAction>{}, {})
                  .empty());
}

TEST(Annotate, HumanDemoAllOnes) {
  auto s = one({0, 0, 100, 100});
  std::vector<PredictedStep> demo(5, PredictedStep{s, Action::click(0), "", 0});
  auto samples = human_demo_samples("x", demo);
  ASSERT_EQ(samples.size(), 5u);
  for (const auto& r : samples) {
    EXPECT_EQ(r.reward, 1.0);
    EXPECT_EQ(r.source, SampleSource::human_demo);
  }
}

TEST(MatchConfig, ValidationAndJson) {
  MatchConfig c;
  c.click_distance_fraction = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.box_expand_factor = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
  auto j = MatchConfig::from_json({{"click_distance_fraction", 0.2}});
  EXPECT_EQ(j.click_distance_fraction, 0.2);
  EXPECT_EQ(j.box_expand_factor, 2.4);
}

TEST(GroundTruthJson, RoundTrip) {
  GroundTruthAction gt = click_at(1.5, 2.25);
  gt.element_candidates = std::vector<std::uint32_t>{3, 4};
  gt.box = Box{0, 0, 5, 5};
  EXPECT_EQ(ground_truth_from_json(nlohmann::json::parse(ground_truth_to_json(gt).dump())), gt);
}
