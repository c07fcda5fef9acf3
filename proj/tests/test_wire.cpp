#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "prmnav/engine.hpp"
#include "prmnav/error.hpp"
#include "prmnav/policy.hpp"
#include "prmnav/refine.hpp"
#include "prmnav/reward.hpp"
#include "prmnav/wire.hpp"

using namespace prmnav;

namespace {

// Loopback completions server whose reply is chosen per test.
class FakeServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&, int call)>;

  explicit FakeServer(Handler h) : handler_(std::move(h)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int n = ++calls_;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      handler_(req, res, n);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  WireConfig config() const {
    WireConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    c.model = "test-model";
    c.timeout = std::chrono::milliseconds(2000);
    c.retries = 2;
    c.backoff = std::chrono::milliseconds(1);
    c.api_key_env = "PRMNAV_TEST_KEY";
    return c;
  }
  int calls() const { return calls_; }
  std::string last_body() const { return last_body_; }
  std::string last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  Handler handler_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> calls_{0};
  std::string last_body_;
  std::string last_auth_;
};

std::string completion(const std::string& content, int prompt_tokens = 120, int completion_tokens = 30) {
  nlohmann::json j = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}},
                      {"usage", {{"prompt_tokens", prompt_tokens}, {"completion_tokens", completion_tokens}}}};
  return j.dump();
}

Task task() { return {"t", "Search for walmart", ActionSpace::aitw(), "t", 5}; }

LabeledScreen screen() {
  std::vector<ElementBox> boxes{{{0, 0, 100, 100}, "Search"}};
  return assign_labels(boxes, {1080, 1920});
}

const char* kGood =
    "G1: Focus the search bar. So the next one action is:{\"action_type\": \"click\", \"id\": 0}\nP1: 0.8\n"
    "G2: Scroll. So the next one action is:{\"action_type\": \"scroll\", \"direction\": \"down\"}\nP2: 0.2\n";

}  // namespace

TEST(Wire, HealthyPolicyCall) {
  FakeServer srv([](const httplib::Request&, httplib::Response& res, int) {
    res.set_content(completion(kGood), "application/json");
  });
  ::setenv("PRMNAV_TEST_KEY", "sekrit", 1);
  WirePolicy p(srv.config());
  PolicyRequest req{task(), "", screen(), "home", 3, 0, {}, std::string("aGVsbG8=")};
  auto reply = p.propose(req);
  ::unsetenv("PRMNAV_TEST_KEY");
  ASSERT_EQ(reply.candidates.size(), 2u);
  EXPECT_EQ(reply.candidates.candidates[0].action, Action::click(0));
  EXPECT_EQ(reply.usage, (Usage{120, 30}));
  EXPECT_EQ(srv.last_auth(), "Bearer sekrit");

  auto body = nlohmann::json::parse(srv.last_body());
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"][0]["type"], "text");
  EXPECT_EQ(body["messages"][0]["content"][1]["image_url"]["url"], "data:image/png;base64,aGVsbG8=");
}

TEST(Wire, TimeoutExhaustsRetries) {
  FakeServer srv([](const httplib::Request&, httplib::Response& res, int) {
    std::this_thread::sleep_for(std::chrono::milliseconds(400));
    res.set_content(completion(kGood), "application/json");
  });
  auto cfg = srv.config();
  cfg.timeout = std::chrono::milliseconds(100);
  ChatClient client(cfg);
  EXPECT_THROW(client.complete("hi"), TransportError);
  std::this_thread::sleep_for(std::chrono::milliseconds(500));
  EXPECT_EQ(srv.calls(), 3);
}

TEST(Wire, TimeoutBecomesStepFailure) {
  FakeServer srv([](const httplib::Request&, httplib::Response& res, int) {
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    res.set_content(completion(kGood), "application/json");
  });
  auto cfg = srv.config();
  cfg.timeout = std::chrono::milliseconds(80);
  cfg.retries = 0;
  WirePolicy p(cfg);
  DeterministicSummarizer summ;
  const Task t = task();
  EpisodeContext ctx{t, p, nullptr, summ, Strategy::make(StrategyKind::topk_first), {}, {}, 0};
  Trajectory traj;
  EXPECT_THROW(step(ctx, {"home", screen()}, traj, std::nullopt), StepFailure);
}

TEST(Wire, RetriesServerErrors) {
  FakeServer srv([](const httplib::Request&, httplib::Response& res, int call) {
    if (call == 1) {
      res.status = 503;
      return;
    }
    res.set_content(completion("hello"), "application/json");
  });
  ChatClient client(srv.config());
  auto r = client.complete("hi");
  EXPECT_EQ(r.content, "hello");
  EXPECT_EQ(r.attempts, 2);
}

TEST(Wire, ClientErrorNotRetried) {
  FakeServer srv([](const httplib::Request&, httplib::Response& res, int) {
    res.status = 400;
    res.set_content("bad request", "text/plain");
  });
  ChatClient client(srv.config());
  EXPECT_THROW(client.complete("hi"), TransportError);
  EXPECT_EQ(srv.calls(), 1);
}

TEST(Wire, ReplyWithoutCandidates) {
  FakeServer srv([](const httplib::Request&, httplib::Response& res, int) {
    res.set_content(completion("I think you should tap the search bar."), "application/json");
  });
  WirePolicy p(srv.config());
  PolicyRequest req{task(), "", screen(), "home", 3, 0, {}, std::nullopt};
  EXPECT_THROW(p.propose(req), ParseError);
}

TEST(Wire, EstimatesUsageWhenMissing) {
  FakeServer srv([](const httplib::Request&, httplib::Response& res, int) {
    nlohmann::json j = {{"choices", {{{"message", {{"content", {{{"type", "text"}, {"text", "abcd"}}}}}}}}}};
    res.set_content(j.dump(), "application/json");
  });
  ChatClient client(srv.config());
  auto r = client.complete("12345678");
  EXPECT_EQ(r.content, "abcd");
  EXPECT_EQ(r.usage, (Usage{2, 1}));
}

TEST(Wire, RewardAndEvaluatorBackends) {
  FakeServer srv([](const httplib::Request& req, httplib::Response& res, int) {
    const bool judge = req.body.find("SUCCESS or FAILURE") != std::string::npos;
    res.set_content(completion(judge ? "FAILURE: never pressed enter" : "score: 0.85"), "application/json");
  });
  WireReward reward(srv.config());
  const std::string instr = "x", summary = "";
  const auto s = screen();
  const Action a = Action::click(0);
  EXPECT_EQ(reward.score({instr, summary, s, a, 0, nullptr}).value, 0.85);

  WireEvaluator eval(srv.config());
  Trajectory traj;
  traj.task_id = "t";
  struct NullEnv : Environment {
    Observation reset() override { return {}; }
    Observation apply(const Action&) override { return {}; }
    bool goal_reached() const override { return false; }
  } env;
  auto v = eval.evaluate(traj, task(), env);
  EXPECT_FALSE(v.success);
  EXPECT_EQ(v.reason, "never pressed enter");
}

TEST(Wire, UnreachableFallsBack) {
  WireConfig cfg;
  cfg.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  cfg.retries = 0;
  cfg.timeout = std::chrono::milliseconds(200);
  WireSummarizer summ(cfg);
  Trajectory traj;
  TrajectoryStep st;
  st.action = Action::click(0);
  st.screen = screen();
  traj.steps.push_back(st);
  Usage u;
  EXPECT_EQ(summ.summarize(traj, u).text, "clicked element 0 (Search)");

  WireReflector refl(cfg);
  auto r = refl.reflect(traj, task(), {false, "goal not reached"}, 1);
  EXPECT_NE(r.text.find("Attempt 1 failed"), std::string::npos);
}

TEST(Wire, ConfigParsing) {
  auto c = WireConfig::from_json({{"endpoint", "http://localhost:8000/v1/chat/completions"},
                                  {"model", "m"},
                                  {"timeout_ms", 1500},
                                  {"retries", 1}});
  EXPECT_EQ(c.timeout.count(), 1500);
  EXPECT_EQ(c.retries, 1);
  EXPECT_THROW(ChatClient(WireConfig{"localhost:8000", "m"}), ConfigError);
  EXPECT_THROW(ChatClient(WireConfig{"ftp://host/x", "m"}), ConfigError);
  EXPECT_THROW(parse_chat_response(nlohmann::json::object()), ParseError);
}
