#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "prmnav/engine.hpp"
#include "prmnav/error.hpp"
#include "prmnav/eval.hpp"
#include "prmnav/log.hpp"
#include "prmnav/matcher.hpp"
#include "prmnav/policy.hpp"
#include "prmnav/refine.hpp"
#include "prmnav/reward.hpp"
#include "prmnav/reward_sample.hpp"
#include "prmnav/simenv.hpp"
#include "prmnav/suite.hpp"
#include "prmnav/text.hpp"
#include "prmnav/trajectory.hpp"

namespace prmnav::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

fs::path Workspace::resolve(const std::string& p) const {
  fs::path q(p);
  return q.is_absolute() ? q : root / q;
}

json load_config(const Workspace& ws, const std::string& path) {
  if (path.empty()) return json::object();
  const auto full = ws.resolve(path);
  std::ifstream in(full);
  if (!in) throw ConfigError("cannot open config file '" + full.string() + "'");
  try {
    auto j = json::parse(in);
    if (!j.is_object()) throw ConfigError("config file '" + full.string() + "' must hold a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + full.string() + "' is not valid JSON: " + e.what());
  }
}

namespace {

template <class T>
void overlay(json& j, const char* pointer, const std::optional<T>& v) {
  if (v) j[json::json_pointer(pointer)] = *v;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + p.string() + "'");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Rethrows json errors from config access as ConfigError.
template <class F>
auto config_guard(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError("bad " + what + ": " + e.what());
  } catch (const ParseError& e) {
    throw ConfigError("bad " + what + ": " + e.what());
  }
}

// ---- run ---------------------------------------------------------------------

struct RunConfig {
  fs::path suite;
  Strategy strategy;
  std::string mode = "dynamic";
  int max_rounds = 1;
  std::uint64_t seed = 0;
  int parallel = 1;
  fs::path out;
  EngineConfig engine;
  Pricing pricing;
  json wire = json::object();
  json policy = json::object();
  json reward = json::object();
  json summarizer = json::object();
  json evaluator = json::object();
  json reflector = json::object();
  PromptTemplate tpl = PromptTemplate::default_inference();
  std::string config_hash;
};

std::string kind_of(const json& backend, const char* fallback) { return backend.value("kind", std::string(fallback)); }

WireConfig wire_for(const RunConfig& rc, const json& backend, const std::string& role) {
  json w = rc.wire;
  if (auto it = backend.find("wire"); it != backend.end()) w.merge_patch(*it);
  if (w.value("endpoint", std::string{}).empty()) {
    throw ConfigError(role + " backend 'wire' needs wire.endpoint (or --endpoint)");
  }
  return WireConfig::from_json(w);
}

RunConfig parse_run_config(const Workspace& ws, const json& j) {
  RunConfig rc;
  config_guard("run config", [&] {
    const auto suite = j.value("suite", std::string{});
    if (suite.empty()) throw ConfigError("no suite given (--suite or \"suite\" in the config)");
    rc.suite = ws.resolve(suite);
    if (!fs::is_regular_file(rc.suite)) throw ConfigError("suite file not found: '" + rc.suite.string() + "'");

    const auto kind = strategy_from_string(j.value("strategy", std::string("guidnav")));
    std::optional<int> pass_n;
    if (j.contains("pass_n")) pass_n = j.at("pass_n").get<int>();
    rc.strategy = Strategy::make(kind, j.value("k", 3), pass_n);
    rc.mode = j.value("mode", std::string("dynamic"));
    if (rc.mode != "dynamic" && rc.mode != "static") throw ConfigError("mode must be 'dynamic' or 'static'");
    rc.max_rounds = j.value("max_rounds", 1);
    if (rc.max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
    if (rc.max_rounds > 1 && pass_n.value_or(1) > 1) {
      throw ConfigError("pass_n and max_rounds cannot both exceed 1");
    }
    if (rc.mode == "static" && (rc.max_rounds > 1 || pass_n.value_or(1) > 1)) {
      throw ConfigError("static mode replays the demo once; pass_n and max_rounds must be 1");
    }
    rc.seed = j.value("seed", std::uint64_t{0});
    rc.parallel = j.value("parallel", 1);
    if (rc.parallel < 1) throw ConfigError("parallel must be >= 1");
    rc.out = ws.resolve(j.value("out", std::string("runs")));
    rc.engine.history_cap = j.value("history_cap", std::size_t{1000});
    if (auto it = j.find("match"); it != j.end()) rc.engine.match = MatchConfig::from_json(*it);
    rc.engine.match.validate();
    if (auto it = j.find("pricing"); it != j.end()) rc.pricing = Pricing::from_json(*it);
    rc.pricing.validate();
    rc.wire = j.value("wire", json::object());
    rc.policy = j.value("policy", json::object());
    rc.reward = j.value("reward", json::object());
    rc.summarizer = j.value("summarizer", json::object());
    rc.evaluator = j.value("evaluator", json::object());
    rc.reflector = j.value("reflector", json::object());
    if (auto t = j.value("template", std::string{}); !t.empty()) rc.tpl = PromptTemplate::load(ws.resolve(t).string());

    for (const auto& [role, section, kinds] :
         {std::tuple<std::string, const json*, std::vector<std::string>>{"policy", &rc.policy, {"noisy", "scripted", "wire"}},
          {"reward", &rc.reward, {"oracle", "surrogate", "wire"}},
          {"summarizer", &rc.summarizer, {"deterministic", "wire"}},
          {"evaluator", &rc.evaluator, {"sim", "wire"}},
          {"reflector", &rc.reflector, {"default", "wire"}}}) {
      if (!section->is_object()) throw ConfigError(role + " must be an object");
      if (auto k = section->find("kind"); k != section->end()) {
        const auto v = k->get<std::string>();
        if (std::find(kinds.begin(), kinds.end(), v) == kinds.end()) {
          throw ConfigError("unknown " + role + " kind '" + v + "'");
        }
      }
    }
    if (kind_of(rc.policy, "noisy") == "scripted" && rc.policy.value("script", std::string{}).empty()) {
      throw ConfigError("policy kind 'scripted' needs policy.script");
    }

    // Output location and worker count do not change results.
    json hashed = j;
    hashed.erase("out");
    hashed.erase("parallel");
    rc.config_hash = text::hex64(text::fnv1a(hashed.dump()));
    return 0;
  });
  return rc;
}

struct TaskResult {
  RunRecord record;
  std::vector<std::pair<std::string, std::string>> files;  // name, JSONL
  nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
};

class RunContext {
 public:
  RunContext(const Workspace& ws, RunConfig rc) : ws_(ws), rc_(std::move(rc)) {
    script_ = config_guard("suite", [&] { return sim::load_task_script(rc_.suite.string()); });
    if (rc_.strategy.kind == StrategyKind::guidnav) reward_ = make_reward();
    if (kind_of(rc_.policy, "noisy") == "scripted") {
      const auto path = ws_.resolve(rc_.policy.at("script").get<std::string>());
      std::map<std::string, ActionSpace> spaces;
      for (const auto& t : script_.tasks) spaces.emplace(t.task.id, t.task.space);
      scripted_ = config_guard("policy script", [&] {
        return std::make_shared<ScriptedPolicy>(ScriptedPolicy::from_json(json::parse(read_file(path)), spaces));
      });
    }
    if (kind_of(rc_.policy, "noisy") == "wire") wire_for(rc_, rc_.policy, "policy");
    if (kind_of(rc_.summarizer, "deterministic") == "wire") wire_for(rc_, rc_.summarizer, "summarizer");
  }

  const RunConfig& config() const { return rc_; }
  const sim::TaskScript& script() const { return script_; }

  std::vector<std::uint64_t> seeds() const {
    const int n = std::max(rc_.strategy.pass_n.value_or(1), rc_.max_rounds);
    std::vector<std::uint64_t> s;
    for (int i = 0; i < n; ++i) s.push_back(rc_.seed + static_cast<std::uint64_t>(i));
    return s;
  }

  TaskResult run_task(const sim::SimTask& task) const {
    if (rc_.mode == "static") return run_static_task(task);
    return run_dynamic_task(task);
  }

 private:
  std::unique_ptr<RewardBackend> make_reward() const {
    const auto kind = kind_of(rc_.reward, "oracle");
    if (kind == "oracle") return std::make_unique<OracleReward>(rc_.engine.match);
    if (kind == "wire") return std::make_unique<WireReward>(wire_for(rc_, rc_.reward, "reward"));
    SurrogateParams params = SurrogateParams::zeros();
    if (auto p = rc_.reward.value("params", std::string{}); !p.empty()) {
      const auto path = ws_.resolve(p);
      params = config_guard("reward params", [&] { return SurrogateParams::from_json(json::parse(read_file(path))); });
    }
    return std::make_unique<SurrogateReward>(std::move(params));
  }

  PolicyFactory policy_factory(ExpertFn expert, const ActionSpace& space) const {
    const auto kind = kind_of(rc_.policy, "noisy");
    if (kind == "scripted") {
      auto base = scripted_;
      return [base](std::uint64_t) { return std::make_unique<ScriptedPolicy>(*base); };
    }
    if (kind == "wire") {
      auto cfg = wire_for(rc_, rc_.policy, "policy");
      auto tpl = rc_.tpl;
      return [cfg, tpl](std::uint64_t) { return std::make_unique<WirePolicy>(cfg, tpl); };
    }
    const auto noisy = config_guard("noisy policy config", [&] {
      return NoisyExpertConfig::from_json(rc_.policy.value("noisy", json::object()), space);
    });
    auto tpl = rc_.tpl;
    return [noisy, tpl, expert = std::move(expert)](std::uint64_t seed) {
      return std::make_unique<NoisyExpertPolicy>(expert, noisy, seed, tpl);
    };
  }

  std::unique_ptr<Summarizer> make_summarizer() const {
    if (kind_of(rc_.summarizer, "deterministic") == "wire") {
      return std::make_unique<WireSummarizer>(wire_for(rc_, rc_.summarizer, "summarizer"), rc_.engine.history_cap);
    }
    return std::make_unique<DeterministicSummarizer>(rc_.engine.history_cap);
  }

  TaskResult run_static_task(const sim::SimTask& task) const {
    auto steps = static_replay_steps(*script_.app, task);
    auto make = policy_factory(demo_expert(task), task.task.space);
    auto policy = make(rc_.seed);
    auto summ = make_summarizer();
    EpisodeContext ctx{task.task, *policy, reward_.get(), *summ, rc_.strategy, rc_.engine, {}, rc_.seed};
    Trajectory traj = run_static(ctx, steps);

    TaskResult r;
    r.record = record_from_trajectory(traj);
    std::vector<GroundTruthAction> gt;
    for (const auto& s : steps) gt.push_back(s.ground_truth);
    if (traj.steps.size() == steps.size()) {
      r.record.static_score = static_score(traj, gt, rc_.engine.match);
      const bool element_style = task.task.space.name() == SpaceName::mind2web &&
                                 std::all_of(gt.begin(), gt.end(), [](const GroundTruthAction& g) {
                                   return g.element_candidates.has_value() && !g.element_candidates->empty();
                                 });
      if (element_style) {
        auto es = element_and_step_sr(traj, gt, rc_.engine.match);
        r.record.element_accuracy = es.element_accuracy;
        r.record.step_success_rate = es.step_success_rate;
      }
    } else {
      // an aborted replay scores the steps it never reached as misses
      std::size_t hits = 0;
      for (std::size_t i = 0; i < traj.steps.size(); ++i) {
        hits += match_action(traj.steps[i].action, gt[i], traj.steps[i].screen, rc_.engine.match) ? 1 : 0;
      }
      r.record.static_score = static_cast<double>(hits) / static_cast<double>(steps.size());
    }
    r.files.emplace_back(task.task.id + ".jsonl", trajectory_to_jsonl(traj));
    return r;
  }

  TaskResult run_dynamic_task(const sim::SimTask& task) const {
    sim::SimEnv env(script_.app, task);
    auto make = policy_factory(env_expert(env), task.task.space);
    auto summ = make_summarizer();
    TaskResult r;
    const int pass_n = rc_.strategy.pass_n.value_or(1);
    if (rc_.max_rounds > 1) {
      std::unique_ptr<TrajectoryEvaluator> eval;
      if (kind_of(rc_.evaluator, "sim") == "wire") {
        eval = std::make_unique<WireEvaluator>(wire_for(rc_, rc_.evaluator, "evaluator"));
      } else {
        eval = std::make_unique<SimEvaluator>();
      }
      std::unique_ptr<Reflector> refl;
      if (kind_of(rc_.reflector, "default") == "wire") {
        refl = std::make_unique<WireReflector>(wire_for(rc_, rc_.reflector, "reflector"));
      } else {
        refl = std::make_unique<DefaultReflector>();
      }
      auto out = run_with_retries(task.task, env, make, reward_.get(), *summ, rc_.strategy, rc_.engine, *eval, *refl,
                                  {rc_.max_rounds, rc_.seed});
      std::vector<Trajectory> trajs;
      for (const auto& rec : out.rounds) {
        trajs.push_back(rec.trajectory);
        r.files.emplace_back(task.task.id + ".round" + std::to_string(rec.round) + ".jsonl",
                             trajectory_to_jsonl(rec.trajectory));
        nlohmann::ordered_json jr = {{"task_id", task.task.id},
                   {"round", rec.round},
                   {"seed", rec.seed},
                   {"success", rec.verdict.success},
                   {"reason", rec.verdict.reason}};
        if (rec.reflection) jr["reflection"] = rec.reflection->text;
        r.rounds.push_back(std::move(jr));
      }
      r.record = record_from_rounds(trajs, out.success);
    } else if (pass_n > 1) {
      const auto seeds = this->seeds();
      auto res = pass_at_n(task.task, env, make, reward_.get(), *summ, rc_.strategy, rc_.engine, seeds);
      for (std::size_t i = 0; i < res.trials.size(); ++i) {
        r.files.emplace_back(task.task.id + ".trial" + std::to_string(i + 1) + ".jsonl",
                             trajectory_to_jsonl(res.trials[i]));
      }
      r.record = record_from_rounds(res.trials, res.success);
    } else {
      auto policy = make(rc_.seed);
      EpisodeContext ctx{task.task, *policy, reward_.get(), *summ, rc_.strategy, rc_.engine, {}, rc_.seed};
      auto traj = run_episode(ctx, env);
      r.files.emplace_back(task.task.id + ".jsonl", trajectory_to_jsonl(traj));
      r.record = record_from_trajectory(traj);
    }
    r.record.strategy = rc_.strategy.name();
    return r;
  }

  const Workspace& ws_;
  RunConfig rc_;
  sim::TaskScript script_;
  std::unique_ptr<RewardBackend> reward_;
  std::shared_ptr<ScriptedPolicy> scripted_;
};

fs::path make_run_dir(const fs::path& out, const std::string& stem) {
  fs::create_directories(out);
  for (int i = 1;; ++i) {
    std::ostringstream name;
    name << stem << "-" << std::setw(3) << std::setfill('0') << i;
    const auto dir = out / name.str();
    if (fs::create_directory(dir)) return dir;
  }
}

int cmd_run(const Workspace& ws, const json& cfg, std::ostream& out) {
  RunContext ctx(ws, parse_run_config(ws, cfg));
  const auto& rc = ctx.config();
  const auto& tasks = ctx.script().tasks;

  std::vector<std::optional<TaskResult>> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        results[i] = ctx.run_task(tasks[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(rc.parallel), tasks.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const std::string stem = rc.strategy.name() + "-k" + std::to_string(rc.strategy.k);
  const auto dir = make_run_dir(rc.out, stem);
  fs::create_directory(dir / "trajectories");

  RunReport report;
  report.suite_hash = ctx.script().suite_hash;
  report.strategy = rc.strategy.name();
  report.k = rc.strategy.k;
  report.pricing = rc.pricing;
  nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
  nlohmann::ordered_json task_ids = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& r = *results[i];
    for (const auto& [name, body] : r.files) write_file(dir / "trajectories" / name, body);
    for (const auto& jr : r.rounds) rounds.push_back(jr);
    task_ids.push_back(tasks[i].task.id);
    report.records.push_back(r.record);
  }
  report.recompute();

  nlohmann::ordered_json manifest;
  manifest["suite"] = rc.suite.string();
  manifest["suite_hash"] = report.suite_hash;
  manifest["strategy"] = rc.strategy.name();
  manifest["k"] = rc.strategy.k;
  manifest["pass_n"] = rc.strategy.pass_n.value_or(1);
  manifest["max_rounds"] = rc.max_rounds;
  manifest["mode"] = rc.mode;
  manifest["seeds"] = ctx.seeds();
  manifest["config_hash"] = rc.config_hash;
  manifest["timestamp"] = utc_timestamp();
  manifest["tasks"] = task_ids;
  manifest["rounds"] = rounds;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  write_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
  write_file(dir / "report.csv", report_to_csv(report));

  const auto& a = report.aggregates;
  out << "run directory: " << dir.string() << "\n";
  out << "tasks " << tasks.size() << ", success rate " << text::format_double(a.dynamic_success_rate);
  if (a.static_score) out << ", static score " << text::format_double(*a.static_score);
  out << ", avg turns " << text::format_double(a.avg_turns) << "\n";
  return kExitOk;
}

// ---- annotate ------------------------------------------------------------------

std::vector<fs::path> trajectory_files(const fs::path& p) {
  if (fs::is_regular_file(p)) return {p};
  if (!fs::is_directory(p)) throw ConfigError("no such trajectory file or directory: '" + p.string() + "'");
  const auto dir = fs::is_directory(p / "trajectories") ? p / "trajectories" : p;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Steps recorded without ground truth (the goal was already out of reach) are
// skipped and counted in `skipped`.
// With `all_candidates`, every proposed candidate is labeled, not just the
// executed one.
std::vector<RewardSample> annotate_file(const fs::path& file, bool human_demo, bool all_candidates,
                                        const MatchConfig& match, std::size_t& skipped) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + file.string() + "'");
  Trajectory t;
  try {
    t = read_trajectory_jsonl(in);
  } catch (const ParseError& e) {
    throw ParseError("'" + file.string() + "': " + e.what());
  }
  std::vector<PredictedStep> pred;
  std::vector<GroundTruthAction> gt;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    if (!human_demo && !s.ground_truth) {
      ++skipped;
      continue;
    }
    if (all_candidates && !human_demo) {
      for (const auto& c : s.candidates.candidates) {
        pred.push_back({s.screen, c.action, s.summary_before, i});
        gt.push_back(*s.ground_truth);
      }
      continue;
    }
    pred.push_back({s.screen, s.action, s.summary_before, i});
    if (!human_demo) gt.push_back(*s.ground_truth);
  }
  auto samples = human_demo ? human_demo_samples(t.instruction, pred) : annotate_trajectory(t.instruction, pred, gt, match);
  for (auto& s : samples) s.space = t.space;
  return samples;
}

std::vector<RewardSample> demo_samples(const sim::TaskScript& script, std::size_t cap) {
  std::vector<RewardSample> all;
  for (const auto& task : script.tasks) {
    std::vector<PredictedStep> pred;
    std::vector<std::string> clauses;
    for (const auto& d : sim::demo_trajectory(*script.app, task)) {
      pred.push_back({d.screen, d.action, join_clauses_capped(clauses, cap), pred.size()});
      TrajectoryStep st;
      st.screen = d.screen;
      st.action = d.action;
      clauses.push_back(history_clause(st));
    }
    auto s = human_demo_samples(task.task.instruction, pred);
    for (auto& x : s) x.space = task.task.space.name();
    all.insert(all.end(), s.begin(), s.end());
  }
  return all;
}

int cmd_annotate(const Workspace& ws, const json& cfg, const std::vector<std::string>& inputs, std::ostream& out) {
  const bool human = cfg.value("human_demo", false);
  const bool all_candidates = cfg.value("all_candidates", false);
  const auto match = config_guard("match config", [&] {
    MatchConfig m;
    if (auto it = cfg.find("match"); it != cfg.end()) m = MatchConfig::from_json(*it);
    m.validate();
    return m;
  });
  const auto suite = cfg.value("suite", std::string{});
  if (inputs.empty() && suite.empty()) throw ConfigError("annotate needs trajectory paths or --suite");
  if (!suite.empty() && !human) throw ConfigError("--suite only supplies demonstrations; add --human-demo");

  std::vector<RewardSample> samples;
  std::size_t skipped = 0;
  if (!suite.empty()) {
    const auto path = ws.resolve(suite);
    if (!fs::is_regular_file(path)) throw ConfigError("suite file not found: '" + path.string() + "'");
    auto script = config_guard("suite", [&] { return sim::load_task_script(path.string()); });
    auto s = demo_samples(script, cfg.value("history_cap", std::size_t{1000}));
    samples.insert(samples.end(), s.begin(), s.end());
  }
  for (const auto& in : inputs) {
    for (const auto& f : trajectory_files(ws.resolve(in))) {
      auto s = annotate_file(f, human, all_candidates, match, skipped);
      samples.insert(samples.end(), s.begin(), s.end());
    }
  }

  const auto dest = ws.resolve(cfg.value("out", std::string("samples.jsonl")));
  if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
  std::ofstream os(dest, std::ios::binary);
  if (!os) throw Error("cannot write '" + dest.string() + "'");
  write_samples_jsonl(os, samples);
  const auto pos = std::count_if(samples.begin(), samples.end(), [](const RewardSample& s) { return s.reward > 0.5; });
  out << "samples " << samples.size() << ", positive " << pos << ", negative "
      << static_cast<std::ptrdiff_t>(samples.size()) - pos;
  if (skipped > 0) out << ", skipped " << skipped << " steps without ground truth";
  out << " -> " << dest.string() << "\n";
  return kExitOk;
}

// ---- train-reward --------------------------------------------------------------

int cmd_train(const Workspace& ws, const json& cfg, const std::vector<std::string>& inputs, std::ostream& out) {
  if (inputs.empty()) throw ConfigError("train-reward needs at least one samples file");
  TrainOptions opts;
  config_guard("train config", [&] {
    const json t = cfg.value("train", json::object());
    opts.lr = t.value("lr", opts.lr);
    opts.epochs = t.value("epochs", opts.epochs);
    opts.seed = t.value("seed", opts.seed);
    opts.init_scale = t.value("init_scale", opts.init_scale);
    if (opts.epochs < 0) throw ConfigError("epochs must be >= 0");
    return 0;
  });
  std::vector<RewardSample> samples;
  for (const auto& in : inputs) {
    const auto path = ws.resolve(in);
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open samples file '" + path.string() + "'");
    auto s = read_samples_jsonl(is);
    samples.insert(samples.end(), s.begin(), s.end());
  }
  if (samples.empty()) throw ConfigError("no samples to train on");
  auto result = train_surrogate(samples, opts);

  const auto dir = ws.resolve(cfg.value("out", std::string("reward_model")));
  fs::create_directories(dir);
  write_file(dir / "params.json", result.params.to_json().dump(2) + "\n");
  std::string csv = "epoch,loss\n";
  for (std::size_t e = 0; e < result.losses.size(); ++e) {
    csv += std::to_string(e) + "," + text::format_double(result.losses[e]) + "\n";
  }
  write_file(dir / "loss.csv", csv);
  out << "samples " << samples.size() << "\n";
  out << "initial loss " << text::format_double(result.losses.front()) << "\n";
  out << "final loss " << text::format_double(result.losses.back()) << "\n";
  out << "params -> " << (dir / "params.json").string() << "\n";
  return kExitOk;
}

// ---- report --------------------------------------------------------------------

int cmd_report(const Workspace& ws, const json& cfg, const std::vector<std::string>& dirs, std::ostream& out) {
  if (dirs.empty()) throw ConfigError("report needs at least one run directory");
  std::vector<RunReport> runs;
  for (const auto& d : dirs) {
    const auto path = ws.resolve(d) / "report.json";
    std::ifstream in(path);
    if (!in) throw Error("run directory '" + ws.resolve(d).string() + "' has no report.json");
    try {
      runs.push_back(report_from_json(json::parse(in)));
    } catch (const json::exception& e) {
      throw ParseError("'" + path.string() + "': " + e.what());
    }
  }
  auto table = compare_report(runs);
  out << table.to_text();
  const auto dest = ws.resolve(cfg.value("csv", std::string("comparison.csv")));
  if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
  write_file(dest, table.to_csv());
  out << "csv -> " << dest.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Process-reward-guided GUI navigation", "prmnav"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string workspace, config_path, log_level = "warn";
  app.add_option("--workspace", workspace, "Root for relative paths (default: current directory)");
  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  app.add_option("--log-level", log_level, "debug|info|warn|error|off");

  // run
  auto* run = app.add_subcommand("run", "Run a task suite under one selection strategy");
  std::optional<std::string> suite, strategy, mode, out_dir, policy, policy_script, reward, reward_params, summarizer,
      evaluator, reflector, endpoint, model, tpl;
  std::optional<int> k, pass_n, max_rounds, parallel;
  std::optional<std::uint64_t> seed;
  run->add_option("--suite", suite, "Task-script JSON");
  run->add_option("--strategy", strategy, "dp|topk_first|guidnav|oracle_topk");
  run->add_option("--k", k, "Candidates per step (dp forces 1)");
  run->add_option("--pass-n", pass_n, "Independent trials per task");
  run->add_option("--max-rounds", max_rounds, "Evaluate/reflect/retry rounds");
  run->add_option("--mode", mode, "dynamic|static");
  run->add_option("--seed", seed, "Base seed");
  run->add_option("--parallel", parallel, "Tasks run concurrently");
  run->add_option("--out", out_dir, "Parent directory for run directories");
  run->add_option("--policy", policy, "noisy|scripted|wire");
  run->add_option("--policy-script", policy_script, "Scripted policy JSON");
  run->add_option("--reward", reward, "oracle|surrogate|wire");
  run->add_option("--reward-params", reward_params, "Surrogate params JSON");
  run->add_option("--summarizer", summarizer, "deterministic|wire");
  run->add_option("--evaluator", evaluator, "sim|wire");
  run->add_option("--reflector", reflector, "default|wire");
  run->add_option("--endpoint", endpoint, "Chat-completions URL for wire backends");
  run->add_option("--model", model, "Model name for wire backends");
  run->add_option("--template", tpl, "Inference prompt template");

  // annotate
  auto* annotate = app.add_subcommand("annotate", "Label trajectories into reward samples");
  std::vector<std::string> ann_inputs;
  std::optional<std::string> ann_out, ann_suite;
  bool human_demo = false, all_candidates = false;
  annotate->add_option("inputs", ann_inputs, "Trajectory files or run directories");
  annotate->add_option("--suite", ann_suite, "Task script whose demonstrations become samples");
  annotate->add_flag("--human-demo", human_demo, "Treat inputs as demonstrations (reward 1.0)");
  annotate->add_flag("--candidates", all_candidates, "Label every proposed candidate, not only the executed one");
  annotate->add_option("--out", ann_out, "Output JSONL");

  // train-reward
  auto* train = app.add_subcommand("train-reward", "Fit the surrogate reward model");
  std::vector<std::string> train_inputs;
  std::optional<double> lr, init_scale;
  std::optional<int> epochs;
  std::optional<std::uint64_t> train_seed;
  std::optional<std::string> train_out;
  train->add_option("--samples", train_inputs, "Reward-sample JSONL files")->expected(1, -1);
  train->add_option("--lr", lr, "Learning rate");
  train->add_option("--epochs", epochs, "Full-batch epochs");
  train->add_option("--seed", train_seed, "Initialization seed");
  train->add_option("--init-scale", init_scale, "Std-dev of the initial weights (0 = zeros)");
  train->add_option("--out", train_out, "Output directory");

  // report
  auto* report = app.add_subcommand("report", "Compare run directories");
  std::vector<std::string> report_dirs;
  std::optional<std::string> csv;
  report->add_option("runs", report_dirs, "Run directories");
  report->add_option("--csv", csv, "CSV output path");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (log_level == "debug") {
      log::set_level(log::Level::debug);
    } else if (log_level == "info") {
      log::set_level(log::Level::info);
    } else if (log_level == "warn") {
      log::set_level(log::Level::warn);
    } else if (log_level == "error") {
      log::set_level(log::Level::error);
    } else if (log_level == "off") {
      log::set_level(log::Level::off);
    } else {
      throw ConfigError("unknown log level '" + log_level + "'");
    }

    Workspace ws;
    if (!workspace.empty()) {
      ws.root = fs::absolute(workspace);
      if (!fs::is_directory(ws.root)) throw ConfigError("workspace '" + workspace + "' is not a directory");
    }
    json cfg = load_config(ws, config_path);

    if (*run) {
      overlay(cfg, "/suite", suite);
      overlay(cfg, "/strategy", strategy);
      overlay(cfg, "/k", k);
      overlay(cfg, "/pass_n", pass_n);
      overlay(cfg, "/max_rounds", max_rounds);
      overlay(cfg, "/mode", mode);
      overlay(cfg, "/seed", seed);
      overlay(cfg, "/parallel", parallel);
      overlay(cfg, "/out", out_dir);
      overlay(cfg, "/policy/kind", policy);
      overlay(cfg, "/policy/script", policy_script);
      overlay(cfg, "/reward/kind", reward);
      overlay(cfg, "/reward/params", reward_params);
      overlay(cfg, "/summarizer/kind", summarizer);
      overlay(cfg, "/evaluator/kind", evaluator);
      overlay(cfg, "/reflector/kind", reflector);
      overlay(cfg, "/wire/endpoint", endpoint);
      overlay(cfg, "/wire/model", model);
      overlay(cfg, "/template", tpl);
      if (policy_script && !policy) cfg[json::json_pointer("/policy/kind")] = "scripted";
      return cmd_run(ws, cfg, out);
    }
    if (*annotate) {
      overlay(cfg, "/out", ann_out);
      overlay(cfg, "/suite", ann_suite);
      if (human_demo) cfg["human_demo"] = true;
      if (all_candidates) cfg["all_candidates"] = true;
      return cmd_annotate(ws, cfg, ann_inputs, out);
    }
    if (*train) {
      overlay(cfg, "/train/lr", lr);
      overlay(cfg, "/train/epochs", epochs);
      overlay(cfg, "/train/seed", train_seed);
      overlay(cfg, "/train/init_scale", init_scale);
      overlay(cfg, "/out", train_out);
      return cmd_train(ws, cfg, train_inputs, out);
    }
    overlay(cfg, "/csv", csv);
    return cmd_report(ws, cfg, report_dirs, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace prmnav::cli
