#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prmnav/action.hpp"
#include "prmnav/matcher.hpp"
#include "prmnav/reward_sample.hpp"
#include "prmnav/som.hpp"
#include "prmnav/trajectory.hpp"
#include "prmnav/wire.hpp"

namespace prmnav {

// Everything a process reward model sees for one candidate.
struct RewardQuery {
  const std::string& instruction;
  const std::string& summary;
  const LabeledScreen& screen;
  const Action& action;
  std::size_t step_index = 0;
  const GroundTruthAction* ground_truth = nullptr;  // bound only in static/sim settings
};

struct RewardScore {
  double value = 0.0;
  Usage usage;
};

class RewardBackend {
 public:
  virtual ~RewardBackend() = default;
  virtual RewardScore score(const RewardQuery& q) const = 0;
};

// 1.0 when the candidate matches the step's ground truth, else 0.0. Throws
// ConfigError when no ground truth is bound.
class OracleReward final : public RewardBackend {
 public:
  explicit OracleReward(MatchConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }
  RewardScore score(const RewardQuery& q) const override;

 private:
  MatchConfig cfg_;
};

// ---- Surrogate reward model ------------------------------------------------
//
// Feature layout (kFeatureDim = 53, schema version 1):
//   [0, 8)    one-hot action type
//   [8, 13)   target geometry: has_target, center x/w, center y/h, width/w, height/h
//   [13, 17)  one-hot scroll direction
//   17        |tokens(action text + target name) ∩ tokens(instruction)|
//   18        |tokens(action text + target name) ∩ tokens(summary)|
//   [19, 35)  instruction overlap tokens hashed into 16 buckets
//   [35, 51)  summary overlap tokens hashed into 16 buckets
//   51        min(step_index, 20) / 20
//   52        step_index == 0
inline constexpr std::size_t kFeatureDim = 53;
inline constexpr int kFeatureSchemaVersion = 1;
inline constexpr std::size_t kOverlapInstruction = 17;
inline constexpr std::size_t kOverlapSummary = 18;

std::vector<double> featurize(const std::string& instruction, const std::string& summary,
                              const LabeledScreen& screen, const Action& action, std::size_t step_index = 0);

struct SurrogateParams {
  std::vector<double> weights;
  double bias = 0.0;

  static SurrogateParams zeros(std::size_t dim = kFeatureDim) { return {std::vector<double>(dim, 0.0), 0.0}; }

  nlohmann::ordered_json to_json() const;
  static SurrogateParams from_json(const nlohmann::json& j);  // validates dim and finiteness

  friend bool operator==(const SurrogateParams&, const SurrogateParams&) = default;
};

double sigmoid(double z);

// sigmoid(w·f + b). Throws ConfigError on a dimension mismatch.
double surrogate_score(const SurrogateParams& p, std::span<const double> features);

// Row-major design matrix with one label per row.
struct Dataset {
  std::vector<std::vector<double>> features;
  std::vector<double> targets;

  std::size_t size() const { return targets.size(); }
};

Dataset featurize_samples(std::span<const RewardSample> samples);

// Mean squared error between surrogate predictions and targets.
double mse_loss(const SurrogateParams& p, const Dataset& d);

// Analytic gradient of mse_loss: weights first, bias last.
std::vector<double> mse_gradient(const SurrogateParams& p, const Dataset& d);

struct TrainOptions {
  double lr = 0.5;
  int epochs = 200;
  std::uint64_t seed = 0;
  // Standard deviation of the seeded normal initialization; 0 starts from zeros.
  double init_scale = 0.0;
};

struct TrainResult {
  SurrogateParams params;
  // losses[0] is the loss at initialization, losses[e] after e updates.
  std::vector<double> losses;
};

// Full-batch gradient descent on mse_loss. Throws ConfigError on empty data
// or lr < 0, and Error if the loss becomes non-finite.
TrainResult train_on_dataset(const Dataset& d, const TrainOptions& opts);
TrainResult train_surrogate(std::span<const RewardSample> samples, const TrainOptions& opts);

class SurrogateReward final : public RewardBackend {
 public:
  explicit SurrogateReward(SurrogateParams params);
  RewardScore score(const RewardQuery& q) const override;

 private:
  SurrogateParams params_;
};

// Remote reward model: sends the instruction, summary, serialized screen and
// action, and reads the first real number in the reply.
class WireReward final : public RewardBackend {
 public:
  explicit WireReward(WireConfig cfg) : client_(std::move(cfg)) {}
  RewardScore score(const RewardQuery& q) const override;

  static std::string render_prompt(const RewardQuery& q);

 private:
  ChatClient client_;
};

// First real number in `reply`; must lie in [0,1]. Throws ParseError otherwise.
double parse_score_reply(const std::string& reply);

}  // namespace prmnav
