#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "rova/corruption.hpp"
#include "rova/cost_model.hpp"
#include "rova/curriculum.hpp"
#include "rova/grpo.hpp"
#include "rova/judge.hpp"
#include "rova/reward.hpp"

namespace rova {

struct CorruptionSection {
  ProtocolMode protocol = ProtocolMode::kStatic;
  std::array<double, 4> family_weights{1, 1, 1, 1};  // weather, lighting, camera, occlusion
  double intensity = 0.5;
  bool shuffle = false;
  BlendMode blend = BlendMode::kAttenuate;
  std::uint64_t seed = 0;
};

struct TrainSection {
  std::int64_t steps = 2000;
  int batch_size = 8;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  int eval_samples = 400;
  int eval_every = 100;
};

struct SimSection {
  // Re-assessment outcome probabilities for replayed buffer entries;
  // the remainder stays difficult.
  double promote_prob = 0.0;
  double easy_prob = 0.0;
  int window = 50;
  std::uint64_t seed = 0;
};

struct JudgeSection {
  std::string kind = "stub";  // stub | remote
  JudgeEndpoint endpoint;
};

struct IoSection {
  std::string metrics = "metrics.jsonl";
  std::string summary = "summary.json";
  std::string checkpoint;  // memory buffer checkpoint; empty = none
  bool record_wall_time = false;
};

/// Whole run configuration. Serialized as one JSON document with sections
/// corruption, curriculum, reward, grpo, toy, train, sim, judge, cost, io.
struct RunConfig {
  CorruptionSection corruption;
  CurriculumConfig curriculum;
  RewardConfig reward;
  GrpoConfig grpo;
  ToyTaskConfig toy;
  TrainSection train;
  SimSection sim;
  JudgeSection judge;
  CostProfile cost;
  IoSection io;

  /// Runs every section's validation.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Overlays `doc` on the defaults. Unknown sections or keys and values of
/// the wrong type raise kValidation naming the offending key.
RunConfig config_from_json(const nlohmann::json& doc);

using EnvMap = std::map<std::string, std::string>;

/// Applies ROVA_<SECTION>_<KEY> overrides (e.g. ROVA_GRPO_LEARNING_RATE=0.1).
/// Values are parsed as JSON when possible, otherwise taken as strings.
/// Variables that name no known key are ignored.
nlohmann::json apply_env_overrides(nlohmann::json doc, const EnvMap& env);

/// Snapshot of the process environment restricted to ROVA_ variables.
EnvMap rova_environment();

/// Defaults, then the file (if non-empty), then environment overrides.
RunConfig load_config(const std::filesystem::path& path, const EnvMap& env = {});
void save_config(const RunConfig& cfg, const std::filesystem::path& path);

}  // namespace rova
