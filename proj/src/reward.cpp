#include "prmnav/reward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>

#include "prmnav/error.hpp"
#include "prmnav/text.hpp"

namespace prmnav {

RewardScore OracleReward::score(const RewardQuery& q) const {
  if (!q.ground_truth) throw ConfigError("oracle reward needs a ground-truth action for the step");
  return {match_action(q.action, *q.ground_truth, q.screen, cfg_) ? 1.0 : 0.0, {}};
}

namespace {

constexpr std::size_t kTypeBlock = 0;
constexpr std::size_t kGeomBlock = 8;
constexpr std::size_t kDirBlock = 13;
constexpr std::size_t kInstrBuckets = 19;
constexpr std::size_t kSummaryBuckets = 35;
constexpr std::size_t kBuckets = 16;
constexpr std::size_t kStepBlock = 51;

std::set<std::string> token_set(std::string_view s) {
  auto v = text::tokenize(s);
  return {v.begin(), v.end()};
}

}  // namespace

std::vector<double> featurize(const std::string& instruction, const std::string& summary,
                              const LabeledScreen& screen, const Action& action, std::size_t step_index) {
  std::vector<double> f(kFeatureDim, 0.0);
  f[kTypeBlock + static_cast<std::size_t>(action.type)] = 1.0;

  std::string action_text = action.text.value_or("");
  if (action.id) {
    if (const auto* el = screen.find(*action.id)) {
      const auto c = el->box.center();
      f[kGeomBlock + 0] = 1.0;
      f[kGeomBlock + 1] = c.x / screen.size.width;
      f[kGeomBlock + 2] = c.y / screen.size.height;
      f[kGeomBlock + 3] = el->box.width() / screen.size.width;
      f[kGeomBlock + 4] = el->box.height() / screen.size.height;
      action_text += " " + el->name;
    }
  }
  if (action.direction) f[kDirBlock + static_cast<std::size_t>(*action.direction)] = 1.0;

  const auto a_tokens = token_set(action_text);
  const auto x_tokens = token_set(instruction);
  const auto h_tokens = token_set(summary);
  for (const auto& t : a_tokens) {
    const auto bucket = text::fnv1a(t) % kBuckets;
    if (x_tokens.count(t)) {
      f[kOverlapInstruction] += 1.0;
      f[kInstrBuckets + bucket] += 1.0;
    }
    if (h_tokens.count(t)) {
      f[kOverlapSummary] += 1.0;
      f[kSummaryBuckets + bucket] += 1.0;
    }
  }

  f[kStepBlock] = static_cast<double>(std::min<std::size_t>(step_index, 20)) / 20.0;
  f[kStepBlock + 1] = step_index == 0 ? 1.0 : 0.0;
  return f;
}

nlohmann::ordered_json SurrogateParams::to_json() const {
  nlohmann::ordered_json j;
  j["dim"] = weights.size();
  j["weights"] = weights;
  j["bias"] = bias;
  j["feature_schema_version"] = kFeatureSchemaVersion;
  return j;
}

SurrogateParams SurrogateParams::from_json(const nlohmann::json& j) {
  SurrogateParams p;
  try {
    const auto dim = j.at("dim").get<std::size_t>();
    p.weights = j.at("weights").get<std::vector<double>>();
    p.bias = j.at("bias").get<double>();
    const int version = j.value("feature_schema_version", 0);
    if (version != kFeatureSchemaVersion) {
      throw ParseError("unsupported feature_schema_version " + std::to_string(version));
    }
    if (dim != p.weights.size()) throw ParseError("dim does not match the weight count");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad surrogate params: ") + e.what());
  }
  if (!std::isfinite(p.bias) || !std::all_of(p.weights.begin(), p.weights.end(), [](double w) { return std::isfinite(w); })) {
    throw ParseError("surrogate params contain non-finite values");
  }
  return p;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double surrogate_score(const SurrogateParams& p, std::span<const double> features) {
  if (features.size() != p.weights.size()) {
    throw ConfigError("feature dimension " + std::to_string(features.size()) + " does not match weights " +
                      std::to_string(p.weights.size()));
  }
  double z = p.bias;
  for (std::size_t i = 0; i < features.size(); ++i) z += p.weights[i] * features[i];
  return sigmoid(z);
}

Dataset featurize_samples(std::span<const RewardSample> samples) {
  Dataset d;
  d.features.reserve(samples.size());
  d.targets.reserve(samples.size());
  for (const auto& s : samples) {
    d.features.push_back(featurize(s.instruction, s.summary, s.screen, s.action, s.step_index));
    d.targets.push_back(s.reward);
  }
  return d;
}

double mse_loss(const SurrogateParams& p, const Dataset& d) {
  if (d.size() == 0) throw ConfigError("empty dataset");
  double sum = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double diff = surrogate_score(p, d.features[i]) - d.targets[i];
    sum += diff * diff;
  }
  return sum / static_cast<double>(d.size());
}

std::vector<double> mse_gradient(const SurrogateParams& p, const Dataset& d) {
  if (d.size() == 0) throw ConfigError("empty dataset");
  const std::size_t dim = p.weights.size();
  std::vector<double> g(dim + 1, 0.0);
  const double scale = 2.0 / static_cast<double>(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double pred = surrogate_score(p, d.features[i]);
    // d/dz (sigmoid(z) - r)^2 = 2 (p - r) p (1 - p)
    const double dz = scale * (pred - d.targets[i]) * pred * (1.0 - pred);
    for (std::size_t k = 0; k < dim; ++k) g[k] += dz * d.features[i][k];
    g[dim] += dz;
  }
  return g;
}

TrainResult train_on_dataset(const Dataset& d, const TrainOptions& opts) {
  if (d.size() == 0) throw ConfigError("cannot train on an empty dataset");
  if (!(opts.lr >= 0)) throw ConfigError("learning rate must be >= 0");
  if (opts.epochs < 0) throw ConfigError("epochs must be >= 0");
  const std::size_t dim = d.features.front().size();

  TrainResult r;
  r.params = SurrogateParams::zeros(dim);
  if (opts.init_scale > 0) {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal(0.0, opts.init_scale);
    for (auto& w : r.params.weights) w = normal(rng);
  }

  r.losses.reserve(static_cast<std::size_t>(opts.epochs) + 1);
  r.losses.push_back(mse_loss(r.params, d));
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    const auto g = mse_gradient(r.params, d);
    for (std::size_t k = 0; k < dim; ++k) r.params.weights[k] -= opts.lr * g[k];
    r.params.bias -= opts.lr * g[dim];
    const double loss = mse_loss(r.params, d);
    if (!std::isfinite(loss)) throw Error("training diverged at epoch " + std::to_string(epoch + 1));
    r.losses.push_back(loss);
  }
  return r;
}

TrainResult train_surrogate(std::span<const RewardSample> samples, const TrainOptions& opts) {
  if (samples.empty()) throw ConfigError("cannot train on an empty sample set");
  return train_on_dataset(featurize_samples(samples), opts);
}

SurrogateReward::SurrogateReward(SurrogateParams params) : params_(std::move(params)) {
  if (params_.weights.size() != kFeatureDim) {
    throw ConfigError("surrogate params have dim " + std::to_string(params_.weights.size()) + ", expected " +
                      std::to_string(kFeatureDim));
  }
}

RewardScore SurrogateReward::score(const RewardQuery& q) const {
  return {surrogate_score(params_, featurize(q.instruction, q.summary, q.screen, q.action, q.step_index)), {}};
}

std::string WireReward::render_prompt(const RewardQuery& q) {
  std::ostringstream os;
  os << "You are judging one proposed step of a GUI agent.\n"
     << "Task: " << q.instruction << "\n"
     << "Previous actions: " << q.summary << "\n"
     << "Current screen (JSON): " << screen_to_json(q.screen).dump() << "\n"
     << "Proposed action: " << serialize_action(q.action) << "\n"
     << "Reply with a single number between 0.0 and 1.0: how likely this action is the correct next step.\n";
  return os.str();
}

double parse_score_reply(const std::string& reply) {
  const char* s = reply.c_str();
  for (const char* p = s; *p != '\0'; ++p) {
    const bool starts_number = std::isdigit(static_cast<unsigned char>(*p)) ||
                               (*p == '.' && std::isdigit(static_cast<unsigned char>(p[1]))) ||
                               ((*p == '-' || *p == '+') && (std::isdigit(static_cast<unsigned char>(p[1])) || p[1] == '.'));
    if (!starts_number) continue;
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) continue;
    if (!(v >= 0.0 && v <= 1.0)) throw ParseError("reward score " + std::string(p, static_cast<const char*>(end)) + " outside [0,1]");
    return v;
  }
  throw ParseError("no number in reward reply: '" + reply + "'");
}

RewardScore WireReward::score(const RewardQuery& q) const {
  auto reply = client_.complete(render_prompt(q));
  return {parse_score_reply(reply.content), reply.usage};
}

}  // namespace prmnav
