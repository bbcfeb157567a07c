#include "rova/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

extern char** environ;

namespace rova {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <class T>
T get(const json& doc, const char* section, const char* key) {
  try {
    return doc.at(section).at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kValidation, std::string("config ") + section + "." + key + ": " + e.what());
  }
}

template <class Parse>
auto get_enum(const json& doc, const char* section, const char* key, Parse parse) {
  auto s = get<std::string>(doc, section, key);
  try {
    return parse(s);
  } catch (const Error& e) {
    fail(ErrorKind::kValidation, std::string("config ") + section + "." + key + ": " + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  double wsum = 0;
  for (double w : corruption.family_weights) {
    if (!(w >= 0 && std::isfinite(w))) fail(ErrorKind::kValidation, "corruption.family_weights must be >= 0");
    wsum += w;
  }
  if (!(wsum > 0)) fail(ErrorKind::kValidation, "corruption.family_weights must not all be zero");
  if (!(corruption.intensity > 0 && corruption.intensity <= 1))
    fail(ErrorKind::kValidation, "corruption.intensity must lie in (0,1]");
  curriculum.validate();
  reward.validate();
  grpo.validate();
  toy.validate();
  if (train.steps < 0) fail(ErrorKind::kValidation, "train.steps must be >= 0");
  if (train.batch_size < 1) fail(ErrorKind::kValidation, "train.batch_size must be >= 1");
  if (!(train.temperature > 0)) fail(ErrorKind::kValidation, "train.temperature must be > 0");
  if (train.eval_samples < 1) fail(ErrorKind::kValidation, "train.eval_samples must be >= 1");
  if (train.eval_every < 1) fail(ErrorKind::kValidation, "train.eval_every must be >= 1");
  if (!(sim.promote_prob >= 0 && sim.easy_prob >= 0 && sim.promote_prob + sim.easy_prob <= 1))
    fail(ErrorKind::kValidation, "sim.promote_prob and sim.easy_prob must be >= 0 with sum <= 1");
  if (sim.window < 1) fail(ErrorKind::kValidation, "sim.window must be >= 1");
  if (judge.kind != "stub" && judge.kind != "remote")
    fail(ErrorKind::kValidation, "judge.kind must be 'stub' or 'remote'");
  if (judge.kind == "remote") judge.endpoint.validate();
  cost.validate();
}

json to_json(const RunConfig& c) {
  ordered_json j;
  j["corruption"] = {{"protocol", to_string(c.corruption.protocol)},
                     {"family_weights", c.corruption.family_weights},
                     {"intensity", c.corruption.intensity},
                     {"shuffle", c.corruption.shuffle},
                     {"blend", to_string(c.corruption.blend)},
                     {"seed", c.corruption.seed}};
  j["curriculum"] = {{"tau", c.curriculum.tau},
                     {"max_counter", c.curriculum.max_counter},
                     {"buffer_cap", c.curriculum.buffer_cap},
                     {"reeval_period", c.curriculum.reeval_period},
                     {"mode", to_string(c.curriculum.mode)},
                     {"k_max", c.curriculum.k_max},
                     {"a_min", c.curriculum.a_min},
                     {"a_max", c.curriculum.a_max}};
  j["reward"] = {{"alpha_r", c.reward.alpha_r},         {"alpha_a", c.reward.alpha_a},
                 {"w_format", c.reward.w_format},       {"w_accuracy", c.reward.w_accuracy},
                 {"variant", to_string(c.reward.variant)}, {"beta_obs", c.reward.beta_obs},
                 {"beta_reason", c.reward.beta_reason}, {"beta_act", c.reward.beta_act}};
  j["grpo"] = {{"group_size", c.grpo.group_size},
               {"shuffled_group_size", c.grpo.shuffled_group_size},
               {"clip_eps", c.grpo.clip_eps},
               {"kl_beta", c.grpo.kl_beta},
               {"learning_rate", c.grpo.learning_rate},
               {"grad_clip", c.grpo.grad_clip},
               {"sigma_min", c.grpo.sigma_min},
               {"gae_lambda", c.grpo.gae_lambda},
               {"gamma", c.grpo.gamma}};
  j["toy"] = {{"features", c.toy.features},
              {"informative", c.toy.informative},
              {"frames", c.toy.frames},
              {"two_cue_occlusion_rate", c.toy.two_cue_occlusion_rate},
              {"unanswerable_rate", c.toy.unanswerable_rate},
              {"seed", c.toy.seed}};
  j["train"] = {{"steps", c.train.steps},
                {"batch_size", c.train.batch_size},
                {"temperature", c.train.temperature},
                {"seed", c.train.seed},
                {"eval_samples", c.train.eval_samples},
                {"eval_every", c.train.eval_every}};
  j["sim"] = {{"promote_prob", c.sim.promote_prob},
              {"easy_prob", c.sim.easy_prob},
              {"window", c.sim.window},
              {"seed", c.sim.seed}};
  j["judge"] = {{"kind", c.judge.kind},
                {"base_url", c.judge.endpoint.base_url},
                {"model", c.judge.endpoint.model},
                {"timeout_ms", c.judge.endpoint.timeout.count()},
                {"max_retries", c.judge.endpoint.max_retries},
                {"max_in_flight", c.judge.endpoint.max_in_flight},
                {"initial_backoff_ms", c.judge.endpoint.initial_backoff.count()},
                {"api_key_env", c.judge.endpoint.api_key_env}};
  j["cost"] = to_json(c.cost);
  j["io"] = {{"metrics", c.io.metrics},
             {"summary", c.io.summary},
             {"checkpoint", c.io.checkpoint},
             {"record_wall_time", c.io.record_wall_time}};
  return json(j);
}

namespace {

void check_kind(const json& def, const json& val, const std::string& path) {
  bool ok = true;
  if (def.is_number_integer()) ok = val.is_number_integer();
  else if (def.is_number()) ok = val.is_number();
  else if (def.is_boolean()) ok = val.is_boolean();
  else if (def.is_string()) ok = val.is_string();
  else if (def.is_array()) ok = val.is_array() && val.size() == def.size();
  if (!ok) fail(ErrorKind::kValidation, "config " + path + ": expected a value like " + def.dump() + ", got " + val.dump());
}

json overlay(json base, const json& doc) {
  if (!doc.is_object()) fail(ErrorKind::kValidation, "config document must be a JSON object");
  for (const auto& [section, body] : doc.items()) {
    if (!base.contains(section)) fail(ErrorKind::kValidation, "config: unknown section '" + section + "'");
    if (!body.is_object()) fail(ErrorKind::kValidation, "config: section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      auto& sec = base[section];
      if (!sec.contains(key)) fail(ErrorKind::kValidation, "config: unknown key '" + section + "." + key + "'");
      check_kind(sec[key], value, section + "." + key);
      sec[key] = value;
    }
  }
  return base;
}

}  // namespace

RunConfig config_from_json(const json& doc) {
  const json j = overlay(to_json(RunConfig{}), doc);
  RunConfig c;
  c.corruption.protocol = get_enum(j, "corruption", "protocol", parse_protocol);
  c.corruption.family_weights = get<std::array<double, 4>>(j, "corruption", "family_weights");
  c.corruption.intensity = get<double>(j, "corruption", "intensity");
  c.corruption.shuffle = get<bool>(j, "corruption", "shuffle");
  c.corruption.blend = get_enum(j, "corruption", "blend", parse_blend_mode);
  c.corruption.seed = get<std::uint64_t>(j, "corruption", "seed");

  c.curriculum.tau = get<double>(j, "curriculum", "tau");
  c.curriculum.max_counter = get<int>(j, "curriculum", "max_counter");
  c.curriculum.buffer_cap = get<int>(j, "curriculum", "buffer_cap");
  c.curriculum.reeval_period = get<int>(j, "curriculum", "reeval_period");
  c.curriculum.mode = get_enum(j, "curriculum", "mode", parse_assess_mode);
  c.curriculum.k_max = get<int>(j, "curriculum", "k_max");
  c.curriculum.a_min = get<double>(j, "curriculum", "a_min");
  c.curriculum.a_max = get<double>(j, "curriculum", "a_max");

  c.reward.alpha_r = get<double>(j, "reward", "alpha_r");
  c.reward.alpha_a = get<double>(j, "reward", "alpha_a");
  c.reward.w_format = get<double>(j, "reward", "w_format");
  c.reward.w_accuracy = get<double>(j, "reward", "w_accuracy");
  c.reward.variant = get_enum(j, "reward", "variant", parse_reward_variant);
  c.reward.beta_obs = get<double>(j, "reward", "beta_obs");
  c.reward.beta_reason = get<double>(j, "reward", "beta_reason");
  c.reward.beta_act = get<double>(j, "reward", "beta_act");

  c.grpo.group_size = get<int>(j, "grpo", "group_size");
  c.grpo.shuffled_group_size = get<int>(j, "grpo", "shuffled_group_size");
  c.grpo.clip_eps = get<double>(j, "grpo", "clip_eps");
  c.grpo.kl_beta = get<double>(j, "grpo", "kl_beta");
  c.grpo.learning_rate = get<double>(j, "grpo", "learning_rate");
  c.grpo.grad_clip = get<double>(j, "grpo", "grad_clip");
  c.grpo.sigma_min = get<double>(j, "grpo", "sigma_min");
  c.grpo.gae_lambda = get<double>(j, "grpo", "gae_lambda");
  c.grpo.gamma = get<double>(j, "grpo", "gamma");

  c.toy.features = get<int>(j, "toy", "features");
  c.toy.informative = get<int>(j, "toy", "informative");
  c.toy.frames = get<int>(j, "toy", "frames");
  c.toy.two_cue_occlusion_rate = get<double>(j, "toy", "two_cue_occlusion_rate");
  c.toy.unanswerable_rate = get<double>(j, "toy", "unanswerable_rate");
  c.toy.seed = get<std::uint64_t>(j, "toy", "seed");

  c.train.steps = get<std::int64_t>(j, "train", "steps");
  c.train.batch_size = get<int>(j, "train", "batch_size");
  c.train.temperature = get<double>(j, "train", "temperature");
  c.train.seed = get<std::uint64_t>(j, "train", "seed");
  c.train.eval_samples = get<int>(j, "train", "eval_samples");
  c.train.eval_every = get<int>(j, "train", "eval_every");

  c.sim.promote_prob = get<double>(j, "sim", "promote_prob");
  c.sim.easy_prob = get<double>(j, "sim", "easy_prob");
  c.sim.window = get<int>(j, "sim", "window");
  c.sim.seed = get<std::uint64_t>(j, "sim", "seed");

  c.judge.kind = get<std::string>(j, "judge", "kind");
  c.judge.endpoint.base_url = get<std::string>(j, "judge", "base_url");
  c.judge.endpoint.model = get<std::string>(j, "judge", "model");
  c.judge.endpoint.timeout = std::chrono::milliseconds(get<std::int64_t>(j, "judge", "timeout_ms"));
  c.judge.endpoint.max_retries = get<int>(j, "judge", "max_retries");
  c.judge.endpoint.max_in_flight = get<int>(j, "judge", "max_in_flight");
  c.judge.endpoint.initial_backoff = std::chrono::milliseconds(get<std::int64_t>(j, "judge", "initial_backoff_ms"));
  c.judge.endpoint.api_key_env = get<std::string>(j, "judge", "api_key_env");

  c.cost.batch_size = get<double>(j, "cost", "batch_size");
  c.cost.group_total = get<double>(j, "cost", "group_total");
  c.cost.c_bwd_factor = get<double>(j, "cost", "c_bwd_factor");
  c.cost.c_judge = get<double>(j, "cost", "c_judge");
  c.cost.c_api = get<double>(j, "cost", "c_api");
  c.cost.c_pert = get<double>(j, "cost", "c_pert");
  c.cost.include_pert = get<bool>(j, "cost", "include_pert");
  c.cost.rho = get<double>(j, "cost", "rho");
  c.cost.buffer_size = get<double>(j, "cost", "buffer_size");
  c.cost.reeval_period = get<double>(j, "cost", "reeval_period");
  c.cost.max_seq_len = get<double>(j, "cost", "max_seq_len");
  c.cost.seconds_per_fwd = get<double>(j, "cost", "seconds_per_fwd");

  c.io.metrics = get<std::string>(j, "io", "metrics");
  c.io.summary = get<std::string>(j, "io", "summary");
  c.io.checkpoint = get<std::string>(j, "io", "checkpoint");
  c.io.record_wall_time = get<bool>(j, "io", "record_wall_time");

  c.validate();
  return c;
}

namespace {

std::string upper(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace

json apply_env_overrides(json doc, const EnvMap& env) {
  if (env.empty()) return doc;
  if (doc.is_null()) doc = json::object();
  const json defaults = to_json(RunConfig{});
  for (const auto& [section, body] : defaults.items()) {
    for (const auto& [key, def] : body.items()) {
      auto it = env.find("ROVA_" + upper(section) + "_" + upper(key));
      if (it == env.end()) continue;
      json value = json::parse(it->second, nullptr, false);
      if (value.is_discarded() || (def.is_string() && !value.is_string())) value = it->second;
      doc[section][key] = value;
    }
  }
  return doc;
}

EnvMap rova_environment() {
  EnvMap env;
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    if (kv.rfind("ROVA_", 0) != 0) continue;
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  return env;
}

RunConfig load_config(const std::filesystem::path& path, const EnvMap& env) {
  json doc = json::object();
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::kIo, "cannot read config " + path.string());
    doc = json::parse(is, nullptr, false);
    if (doc.is_discarded()) fail(ErrorKind::kValidation, "config is not valid JSON: " + path.string());
  }
  return config_from_json(apply_env_overrides(std::move(doc), env));
}

void save_config(const RunConfig& cfg, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) fail(ErrorKind::kIo, "cannot write " + path.string());
  os << to_json(cfg).dump(2) << '\n';
}

}  // namespace rova
