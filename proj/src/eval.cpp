#include "prmnav/eval.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <sstream>

#include "prmnav/error.hpp"
#include "prmnav/text.hpp"

namespace prmnav {

double static_score(const Trajectory& pred, std::span<const GroundTruthAction> gt, const MatchConfig& cfg) {
  if (pred.steps.size() != gt.size()) {
    throw ConfigError("static_score: " + std::to_string(pred.steps.size()) + " predicted steps vs " +
                      std::to_string(gt.size()) + " ground-truth steps");
  }
  if (gt.empty()) throw ConfigError("static_score: empty trajectory");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (match_action(pred.steps[i].action, gt[i], pred.steps[i].screen, cfg)) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(gt.size());
}

double static_score(const Trajectory& pred, const MatchConfig& cfg) {
  std::vector<GroundTruthAction> gt;
  gt.reserve(pred.steps.size());
  for (const auto& s : pred.steps) {
    if (!s.ground_truth) throw ConfigError("static_score: step on '" + s.screen_id + "' has no ground truth");
    gt.push_back(*s.ground_truth);
  }
  return static_score(pred, gt, cfg);
}

ElementStepScore element_and_step_sr(const Trajectory& pred, std::span<const GroundTruthAction> gt,
                                     const MatchConfig& cfg) {
  if (pred.steps.size() != gt.size()) throw ConfigError("element_and_step_sr: length mismatch");
  if (gt.empty()) throw ConfigError("element_and_step_sr: empty trajectory");
  std::size_t ele = 0, step_ok = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const auto& g = gt[i];
    if (!g.element_candidates || g.element_candidates->empty()) {
      throw ConfigError("element_and_step_sr: ground-truth step " + std::to_string(i) + " has no element candidates");
    }
    const Action& a = pred.steps[i].action;
    const bool element = a.id && std::find(g.element_candidates->begin(), g.element_candidates->end(), *a.id) !=
                                     g.element_candidates->end();
    if (!element) continue;
    ++ele;
    bool op = a.type == g.type;
    if (op && g.text) op = a.text && text_matches(*a.text, *g.text, cfg);
    if (op) ++step_ok;
  }
  const auto n = static_cast<double>(gt.size());
  return {static_cast<double>(ele) / n, static_cast<double>(step_ok) / n};
}

double dynamic_success(std::span<const Outcome> outcomes) {
  if (outcomes.empty()) throw ConfigError("dynamic_success: no outcomes");
  auto n = std::count(outcomes.begin(), outcomes.end(), Outcome::success);
  return static_cast<double>(n) / static_cast<double>(outcomes.size());
}

double dynamic_success(const std::vector<bool>& successes) {
  if (successes.empty()) throw ConfigError("dynamic_success: no outcomes");
  auto n = std::count(successes.begin(), successes.end(), true);
  return static_cast<double>(n) / static_cast<double>(successes.size());
}

void Pricing::validate() const {
  if (!(rate_per_million_prompt >= 0.0) || !(rate_per_million_completion >= 0.0)) {
    throw ConfigError("pricing rates must be >= 0");
  }
}

Pricing Pricing::from_json(const nlohmann::json& j) {
  Pricing p;
  if (j.contains("rate_per_million")) p = flat(j.at("rate_per_million").get<double>());
  if (j.contains("rate_per_million_prompt")) p.rate_per_million_prompt = j.at("rate_per_million_prompt").get<double>();
  if (j.contains("rate_per_million_completion")) {
    p.rate_per_million_completion = j.at("rate_per_million_completion").get<double>();
  }
  p.validate();
  return p;
}

double Pricing::cost(std::int64_t prompt_tokens, std::int64_t completion_tokens) const {
  return static_cast<double>(prompt_tokens) * rate_per_million_prompt / 1e6 +
         static_cast<double>(completion_tokens) * rate_per_million_completion / 1e6;
}

RunRecord record_from_trajectory(const Trajectory& t) {
  return record_from_rounds(std::span<const Trajectory>(&t, 1), t.outcome == Outcome::success);
}

RunRecord record_from_rounds(std::span<const Trajectory> rounds, bool success) {
  if (rounds.empty()) throw ConfigError("record_from_rounds: no rounds");
  RunRecord r;
  r.task_id = rounds.front().task_id;
  r.strategy = rounds.front().strategy;
  r.outcome = success ? Outcome::success : rounds.back().outcome;
  if (!success && r.outcome == Outcome::success) r.outcome = Outcome::failure;
  r.rounds_used = static_cast<int>(rounds.size());
  for (const auto& t : rounds) {
    r.turns += static_cast<int>(t.steps.size());
    auto u = t.total_usage();
    r.tokens_prompt += u.prompt_tokens;
    r.tokens_completion += u.completion_tokens;
  }
  return r;
}

namespace {

std::optional<double> mean_of(std::span<const RunRecord> recs, std::optional<double> RunRecord::*field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : recs) {
    if (r.*field) {
      sum += *(r.*field);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

Aggregates usage_report(std::span<const RunRecord> records, const Pricing& pricing) {
  pricing.validate();
  if (records.empty()) throw ConfigError("usage_report: no records");
  Aggregates a;
  a.static_score = mean_of(records, &RunRecord::static_score);
  a.element_accuracy = mean_of(records, &RunRecord::element_accuracy);
  a.step_success_rate = mean_of(records, &RunRecord::step_success_rate);
  double succ = 0, tokens = 0, cost = 0, turns = 0;
  for (const auto& r : records) {
    if (r.outcome == Outcome::success) succ += 1;
    tokens += static_cast<double>(r.tokens_prompt + r.tokens_completion);
    cost += pricing.cost(r.tokens_prompt, r.tokens_completion);
    turns += r.turns;
  }
  const auto n = static_cast<double>(records.size());
  a.dynamic_success_rate = succ / n;
  a.avg_tokens = tokens / n;
  a.avg_cost = cost / n;
  a.avg_turns = turns / n;
  return a;
}

namespace {

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

nlohmann::ordered_json aggregates_json(const Aggregates& a) {
  nlohmann::ordered_json j;
  j["static_score"] = opt_json(a.static_score);
  j["element_accuracy"] = opt_json(a.element_accuracy);
  j["step_success_rate"] = opt_json(a.step_success_rate);
  j["dynamic_success_rate"] = a.dynamic_success_rate;
  j["avg_tokens"] = a.avg_tokens;
  j["avg_cost"] = a.avg_cost;
  j["avg_turns"] = a.avg_turns;
  return j;
}

std::string opt_str(const std::optional<double>& v) { return v ? text::format_double(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError("bad number in CSV: '" + s + "'");
  return v;
}

double parse_num(const std::string& s) {
  auto v = parse_opt(s);
  if (!v) throw ParseError("missing number in CSV");
  return *v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\n\"") != std::string::npos) throw ConfigError("CSV field may not contain ',', '\"' or newline");
  return s;
}

constexpr const char* kCompareHeader =
    "suite_hash,strategy,k,tasks,static_score,element_accuracy,step_success_rate,dynamic_success_rate,avg_tokens,"
    "avg_cost,avg_turns";

}  // namespace

nlohmann::ordered_json report_to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["suite_hash"] = r.suite_hash;
  j["strategy"] = r.strategy;
  j["k"] = r.k;
  j["pricing"] = {{"rate_per_million_prompt", r.pricing.rate_per_million_prompt},
                  {"rate_per_million_completion", r.pricing.rate_per_million_completion}};
  auto recs = nlohmann::ordered_json::array();
  for (const auto& rec : r.records) {
    nlohmann::ordered_json x;
    x["task_id"] = rec.task_id;
    x["strategy"] = rec.strategy;
    x["outcome"] = std::string(to_string(rec.outcome));
    x["turns"] = rec.turns;
    x["tokens_prompt"] = rec.tokens_prompt;
    x["tokens_completion"] = rec.tokens_completion;
    x["rounds_used"] = rec.rounds_used;
    x["static_score"] = opt_json(rec.static_score);
    x["element_accuracy"] = opt_json(rec.element_accuracy);
    x["step_success_rate"] = opt_json(rec.step_success_rate);
    recs.push_back(std::move(x));
  }
  j["records"] = std::move(recs);
  j["aggregates"] = aggregates_json(r.aggregates);
  return j;
}

RunReport report_from_json(const nlohmann::json& j) {
  try {
    RunReport r;
    r.suite_hash = j.at("suite_hash").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    r.k = j.at("k").get<int>();
    r.pricing = Pricing::from_json(j.at("pricing"));
    for (const auto& x : j.at("records")) {
      RunRecord rec;
      rec.task_id = x.at("task_id").get<std::string>();
      rec.strategy = x.at("strategy").get<std::string>();
      rec.outcome = outcome_from_string(x.at("outcome").get<std::string>());
      rec.turns = x.at("turns").get<int>();
      rec.tokens_prompt = x.at("tokens_prompt").get<std::int64_t>();
      rec.tokens_completion = x.at("tokens_completion").get<std::int64_t>();
      rec.rounds_used = x.at("rounds_used").get<int>();
      rec.static_score = opt_from(x, "static_score");
      rec.element_accuracy = opt_from(x, "element_accuracy");
      rec.step_success_rate = opt_from(x, "step_success_rate");
      r.records.push_back(std::move(rec));
    }
    // Aggregates are derived; recompute rather than trust the file.
    r.recompute();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad report: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("bad report: ") + e.what());
  }
}

std::string report_to_csv(const RunReport& r) {
  std::ostringstream os;
  os << "task_id,strategy,outcome,turns,tokens_prompt,tokens_completion,rounds_used,static_score,element_accuracy,"
        "step_success_rate\n";
  for (const auto& rec : r.records) {
    os << csv_field(rec.task_id) << ',' << csv_field(rec.strategy) << ',' << to_string(rec.outcome) << ','
       << rec.turns << ',' << rec.tokens_prompt << ',' << rec.tokens_completion << ',' << rec.rounds_used << ','
       << opt_str(rec.static_score) << ',' << opt_str(rec.element_accuracy) << ','
       << opt_str(rec.step_success_rate) << '\n';
  }
  return os.str();
}

ComparisonTable compare_report(std::span<const RunReport> runs) {
  if (runs.empty()) throw ConfigError("compare_report: no runs");
  ComparisonTable t;
  t.suite_hash = runs.front().suite_hash;
  for (const auto& r : runs) {
    if (r.suite_hash != t.suite_hash) {
      throw ConfigError("suite mismatch: " + t.suite_hash + " vs " + r.suite_hash);
    }
    t.rows.push_back({r.strategy, r.k, r.records.size(), usage_report(r.records, r.pricing)});
  }
  return t;
}

std::string ComparisonTable::to_text() const {
  std::ostringstream os;
  auto cell = [](const std::optional<double>& v, int prec) {
    if (!v) return std::string("-");
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << *v;
    return s.str();
  };
  os << "suite " << suite_hash << "\n";
  os << std::left << std::setw(14) << "strategy" << std::right << std::setw(4) << "k" << std::setw(7) << "tasks"
     << std::setw(9) << "static" << std::setw(9) << "ele_acc" << std::setw(9) << "step_sr" << std::setw(9)
     << "success" << std::setw(12) << "avg_tokens" << std::setw(10) << "avg_cost" << std::setw(10) << "avg_turns"
     << "\n";
  for (const auto& r : rows) {
    const auto& a = r.aggregates;
    os << std::left << std::setw(14) << r.strategy << std::right << std::setw(4) << r.k << std::setw(7) << r.tasks
       << std::setw(9) << cell(a.static_score, 4) << std::setw(9) << cell(a.element_accuracy, 4) << std::setw(9)
       << cell(a.step_success_rate, 4) << std::setw(9) << cell(a.dynamic_success_rate, 4) << std::setw(12)
       << cell(a.avg_tokens, 1) << std::setw(10) << cell(a.avg_cost, 4) << std::setw(10) << cell(a.avg_turns, 2)
       << "\n";
  }
  return os.str();
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream os;
  os << kCompareHeader << "\n";
  for (const auto& r : rows) {
    const auto& a = r.aggregates;
    os << csv_field(suite_hash) << ',' << csv_field(r.strategy) << ',' << r.k << ',' << r.tasks << ','
       << opt_str(a.static_score) << ',' << opt_str(a.element_accuracy) << ',' << opt_str(a.step_success_rate) << ','
       << text::format_double(a.dynamic_success_rate) << ',' << text::format_double(a.avg_tokens) << ','
       << text::format_double(a.avg_cost) << ',' << text::format_double(a.avg_turns) << '\n';
  }
  return os.str();
}

ComparisonTable ComparisonTable::from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kCompareHeader) throw ParseError("comparison CSV: bad header");
  ComparisonTable t;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 11) throw ParseError("comparison CSV: expected 11 fields, got " + std::to_string(f.size()));
    if (first) {
      t.suite_hash = f[0];
      first = false;
    } else if (f[0] != t.suite_hash) {
      throw ParseError("comparison CSV: mixed suite hashes");
    }
    ComparisonRow r;
    r.strategy = f[1];
    r.k = static_cast<int>(parse_num(f[2]));
    r.tasks = static_cast<std::size_t>(parse_num(f[3]));
    r.aggregates.static_score = parse_opt(f[4]);
    r.aggregates.element_accuracy = parse_opt(f[5]);
    r.aggregates.step_success_rate = parse_opt(f[6]);
    r.aggregates.dynamic_success_rate = parse_num(f[7]);
    r.aggregates.avg_tokens = parse_num(f[8]);
    r.aggregates.avg_cost = parse_num(f[9]);
    r.aggregates.avg_turns = parse_num(f[10]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace prmnav
