#include "rova/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rova {

void GrpoConfig::validate() const {
  if (group_size < 2) fail(ErrorKind::kValidation, "grpo.group_size must be >= 2");
  if (shuffled_group_size < 0 || shuffled_group_size > group_size)
    fail(ErrorKind::kValidation, "grpo.shuffled_group_size must lie in [0, group_size]");
  if (!(clip_eps > 0 && clip_eps < 1)) fail(ErrorKind::kValidation, "grpo.clip_eps must lie in (0,1)");
  if (!(kl_beta >= 0)) fail(ErrorKind::kValidation, "grpo.kl_beta must be >= 0");
  if (!(learning_rate >= 0 && std::isfinite(learning_rate)))
    fail(ErrorKind::kValidation, "grpo.learning_rate must be finite and >= 0");
  if (!(grad_clip > 0)) fail(ErrorKind::kValidation, "grpo.grad_clip must be > 0");
  if (!(sigma_min > 0)) fail(ErrorKind::kValidation, "grpo.sigma_min must be > 0");
  if (!(gae_lambda >= 0 && gae_lambda <= 1)) fail(ErrorKind::kValidation, "grpo.gae_lambda must lie in [0,1]");
  if (!(gamma >= 0 && gamma <= 1)) fail(ErrorKind::kValidation, "grpo.gamma must lie in [0,1]");
}

// --- numerics ----------------------------------------------------------------

std::vector<double> normalize_advantages(std::span<const double> rewards, double sigma_min) {
  if (rewards.size() < 2) fail(ErrorKind::kValidation, "advantage normalization needs a group of at least 2");
  const double n = static_cast<double>(rewards.size());
  double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  double sd = std::sqrt(var / n);
  std::vector<double> out(rewards.size(), 0.0);
  if (!(sd >= sigma_min)) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / sd;
  return out;
}

double surrogate_objective(std::span<const double> ratios, std::span<const double> advantages, double eps,
                           double beta, double kl) {
  if (ratios.size() != advantages.size()) fail(ErrorKind::kShape, "ratios and advantages differ in length");
  if (ratios.empty()) fail(ErrorKind::kValidation, "surrogate of an empty group");
  double sum = 0.0;
  for (std::size_t j = 0; j < ratios.size(); ++j) {
    double r = ratios[j];
    if (!std::isfinite(r) || r <= 0) fail(ErrorKind::kDomain, "probability ratio must be finite and positive");
    double a = advantages[j];
    sum += std::min(r * a, std::clamp(r, 1.0 - eps, 1.0 + eps) * a);
  }
  return sum / static_cast<double>(ratios.size()) - beta * kl;
}

double kl_categorical(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) fail(ErrorKind::kShape, "KL of categoricals over different supports");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) fail(ErrorKind::kDomain, "KL undefined: p has mass where q has none");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) fail(ErrorKind::kShape, "total variation over different supports");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

// --- policy ------------------------------------------------------------------

ToyPolicy::ToyPolicy(std::size_t features, std::size_t actions, double temperature)
    : features_(features), actions_(actions), temperature_(temperature), w_(features * actions, 0.0) {
  if (features == 0 || actions < 2) fail(ErrorKind::kValidation, "toy policy needs >= 1 feature and >= 2 actions");
  if (!(temperature > 0)) fail(ErrorKind::kValidation, "toy policy temperature must be > 0");
}

std::vector<double> ToyPolicy::logits(std::span<const double> phi) const {
  if (phi.size() != features_) fail(ErrorKind::kShape, "observation size does not match the policy");
  std::vector<double> z(actions_, 0.0);
  for (std::size_t i = 0; i < features_; ++i) {
    if (phi[i] == 0.0) continue;
    for (std::size_t k = 0; k < actions_; ++k) z[k] += phi[i] * w_[i * actions_ + k];
  }
  for (double& v : z) v /= temperature_;
  return z;
}

std::vector<double> ToyPolicy::probs(std::span<const double> phi) const {
  auto z = logits(phi);
  double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double& v : z) s += (v = std::exp(v - m));
  for (double& v : z) v /= s;
  return z;
}

double ToyPolicy::log_prob(std::span<const double> phi, std::size_t action) const {
  auto z = logits(phi);
  double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return z.at(action) - m - std::log(s);
}

std::size_t ToyPolicy::sample(std::span<const double> phi, double u) const {
  auto p = probs(phi);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    acc += p[k];
    if (u < acc) return k;
  }
  return p.size() - 1;
}

double kl_divergence(const ToyPolicy& policy, const ToyPolicy& reference,
                     std::span<const std::vector<double>> observations) {
  if (policy.actions() != reference.actions() || policy.features() != reference.features())
    fail(ErrorKind::kShape, "policy and reference have different shapes");
  if (observations.empty()) return 0.0;
  double s = 0.0;
  for (const auto& phi : observations) s += kl_categorical(policy.probs(phi), reference.probs(phi));
  return s / static_cast<double>(observations.size());
}

// --- synthetic task -------------------------------------------------------------

void ToyTaskConfig::validate() const {
  if (features < 2) fail(ErrorKind::kValidation, "toy.features must be >= 2");
  if (informative < 1 || informative > features) fail(ErrorKind::kValidation, "toy.informative must lie in [1, features]");
  if (frames < 1) fail(ErrorKind::kValidation, "toy.frames must be >= 1");
  if (!(two_cue_occlusion_rate >= 0 && unanswerable_rate >= 0 && two_cue_occlusion_rate + unanswerable_rate <= 1))
    fail(ErrorKind::kValidation, "toy occlusion rates must be >= 0 and sum to at most 1");
}

ToyTask::ToyTask(ToyTaskConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::string ToyTask::answer_text(std::size_t action) { return action == 0 ? "A" : "B"; }

namespace {

FrameSequence toy_frames(const ToyTaskConfig& cfg, int label, CounterRng rng) {
  const int w = cfg.features;
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(cfg.frames) * w * FrameSequence::kChannels);
  for (int t = 0; t < cfg.frames; ++t) {
    for (int x = 0; x < w; ++x) {
      bool lit = x < cfg.informative ? label == 1 : rng.bernoulli(0.5);
      std::uint8_t v = lit ? 255 : 0;
      for (int c = 0; c < FrameSequence::kChannels; ++c)
        bytes[(static_cast<std::size_t>(t) * w + x) * FrameSequence::kChannels + c] = v;
    }
  }
  return FrameSequence(cfg.frames, 1, w, std::move(bytes));
}

}  // namespace

ToySample ToyTask::sample(std::uint64_t index) const {
  CounterRng rng = CounterRng(cfg_.seed).split({fnv1a("toy-sample"), index});
  const int label = static_cast<int>(rng.below(2));
  FrameSequence clean = toy_frames(cfg_, label, rng.split("frames"));

  double u = rng.uniform();
  int hidden = 1;
  if (u < cfg_.unanswerable_rate) hidden = cfg_.informative;
  else if (u < cfg_.unanswerable_rate + cfg_.two_cue_occlusion_rate) hidden = std::min(2, cfg_.informative);
  int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg_.informative - hidden + 1)));

  PerturbationSpec spec;
  spec.style = PerturbationStyle(PerturbationSubtype::kStaticOcclusion);
  spec.video_shape = clean.shape();
  spec.intensity = static_cast<double>(hidden) / cfg_.features;
  spec.seed = rng.next_u64();
  spec.shuffle = true;
  spec.blend = BlendMode::kAttenuate;
  spec.region = OcclusionParams{{Box{x0, 0, x0 + hidden, 1}}, 0.0, 0.0};
  validate(spec);
  FrameSequence perturbed = apply_corruption(clean, spec);

  return ToySample{"toy-" + std::to_string(index),
                   label,
                   answer_text(static_cast<std::size_t>(label)),
                   "Are the cue columns lit? Options: A. no, B. yes.",
                   std::move(clean),
                   std::move(spec),
                   std::move(perturbed)};
}

ToySample ToyTask::from_query_id(const std::string& query_id) const {
  constexpr std::string_view prefix = "toy-";
  if (query_id.rfind(prefix, 0) != 0) fail(ErrorKind::kValidation, "not a toy query id: " + query_id);
  std::size_t used = 0;
  std::uint64_t index = 0;
  try {
    index = std::stoull(query_id.substr(prefix.size()), &used);
  } catch (const std::exception&) {
    fail(ErrorKind::kValidation, "not a toy query id: " + query_id);
  }
  if (used != query_id.size() - prefix.size()) fail(ErrorKind::kValidation, "not a toy query id: " + query_id);
  return sample(index);
}

std::vector<double> encode_observation(const FrameSequence& seq) {
  const int w = seq.width();
  std::vector<double> phi(static_cast<std::size_t>(w) + 1, 0.0);
  for (int t = 0; t < seq.frames(); ++t)
    for (int y = 0; y < seq.height(); ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < seq.channels(); ++c) phi[static_cast<std::size_t>(x)] += seq.at(t, y, x, c);
  const double denom = 255.0 * seq.frames() * seq.height() * seq.channels();
  for (int x = 0; x < w; ++x) phi[static_cast<std::size_t>(x)] /= denom;
  phi.back() = 1.0;
  return phi;
}

std::string render_response(std::span<const double> phi, int informative, std::size_t action) {
  std::string lit;
  for (int i = 0; i < informative && i < static_cast<int>(phi.size()); ++i) {
    if (phi[static_cast<std::size_t>(i)] > 0.5) lit += " " + std::to_string(i);
  }
  std::string seen = lit.empty() ? "I observe no lit cue columns." : "I observe lit cue columns" + lit + ".";
  auto answer = ToyTask::answer_text(action);
  return "<think>" + seen + " Therefore the answer is " + answer + ".</think><answer>" + answer + "</answer>";
}

// --- rollouts --------------------------------------------------------------------

RolloutGroup sample_group(const ToyPolicy& policy, const ToyTask& task, const ToySample& sample,
                          const GrpoConfig& cfg, CounterRng rng) {
  RolloutGroup g;
  g.query_id = sample.query_id;
  g.truth = sample.truth;
  g.label = static_cast<std::size_t>(sample.label);
  g.obs_clean = encode_observation(sample.clean);
  CounterRng perm_rng = rng.split("shuffle");
  g.obs_shuffled = encode_observation(
      temporal_shuffle(sample.clean, random_permutation(sample.clean.frames(), perm_rng)));
  g.obs_pert = encode_observation(sample.perturbed);

  const int informative = task.config().informative;
  CounterRng draws = rng.split("rollouts");
  g.rollouts.resize(static_cast<std::size_t>(cfg.group_size));
  for (int j = 0; j < cfg.group_size; ++j) {
    auto& r = g.rollouts[static_cast<std::size_t>(j)];
    r.clean_shuffled = j < cfg.shuffled_group_size;
    const auto& clean_obs = r.clean_shuffled ? g.obs_shuffled : g.obs_clean;
    r.clean_action = policy.sample(clean_obs, draws.uniform());
    r.pert_action = policy.sample(g.obs_pert, draws.uniform());
    r.clean = extract_output(render_response(clean_obs, informative, r.clean_action));
    r.pert = extract_output(render_response(g.obs_pert, informative, r.pert_action));
    r.clean_logp_old = r.clean_logp = policy.log_prob(clean_obs, r.clean_action);
    r.pert_logp_old = policy.log_prob(g.obs_pert, r.pert_action);
  }
  return g;
}

void score_group(RolloutGroup& group, Judge& judge, const RewardConfig& reward_cfg, const GrpoConfig& cfg) {
  std::vector<StructuredOutput> clean_outputs;
  clean_outputs.reserve(group.rollouts.size());
  for (const auto& r : group.rollouts) clean_outputs.push_back(r.clean);
  RewardContext ctx{clean_outputs, nullptr};

  std::vector<double> rewards;
  rewards.reserve(group.rollouts.size());
  for (auto& r : group.rollouts) {
    r.reward = total_reward(r.clean, r.pert, group.truth, judge, reward_cfg, ctx);
    rewards.push_back(r.reward.total);
  }
  auto adv = normalize_advantages(rewards, cfg.sigma_min);
  for (std::size_t j = 0; j < adv.size(); ++j) group.rollouts[j].advantage = adv[j];
}

namespace {

// d/dr of min(rA, clip(r)A); zero where the clipped branch is selected.
bool unclipped(double r, double a, double eps) {
  if (a > 0) return r < 1.0 + eps;
  if (a < 0) return r > 1.0 - eps;
  return false;
}

}  // namespace

ObjectiveValue evaluate_objective(const ToyPolicy& policy, const ToyPolicy& reference,
                                  std::span<const RolloutGroup> groups, const GrpoConfig& cfg) {
  ObjectiveValue v;
  if (groups.empty()) return v;
  std::vector<std::vector<double>> obs;
  double surrogate = 0.0;
  for (const auto& g : groups) {
    std::vector<double> ratios, adv;
    for (const auto& r : g.rollouts) {
      ratios.push_back(std::exp(policy.log_prob(g.obs_pert, r.pert_action) - r.pert_logp_old));
      adv.push_back(r.advantage);
    }
    surrogate += surrogate_objective(ratios, adv, cfg.clip_eps, 0.0, 0.0);
    obs.push_back(g.obs_pert);
  }
  v.surrogate = surrogate / static_cast<double>(groups.size());
  v.kl = kl_divergence(policy, reference, obs);
  v.objective = v.surrogate - cfg.kl_beta * v.kl;
  return v;
}

std::vector<double> objective_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                                       std::span<const RolloutGroup> groups, const GrpoConfig& cfg) {
  const std::size_t F = policy.features(), K = policy.actions();
  std::vector<double> grad(F * K, 0.0);
  if (groups.empty()) return grad;
  const double inv_groups = 1.0 / static_cast<double>(groups.size());
  const double inv_temp = 1.0 / policy.temperature();
  std::vector<double> dz(K);

  for (const auto& g : groups) {
    const auto& phi = g.obs_pert;
    auto p = policy.probs(phi);
    auto q = reference.probs(phi);
    std::fill(dz.begin(), dz.end(), 0.0);

    const double inv_g = 1.0 / static_cast<double>(g.rollouts.size());
    for (const auto& r : g.rollouts) {
      double ratio = std::exp(policy.log_prob(phi, r.pert_action) - r.pert_logp_old);
      if (!unclipped(ratio, r.advantage, cfg.clip_eps)) continue;
      double c = r.advantage * ratio * inv_g;
      for (std::size_t k = 0; k < K; ++k) dz[k] += c * ((k == r.pert_action ? 1.0 : 0.0) - p[k]);
    }

    // d KL(p||q) / dz_k = p_k (log p_k - log q_k - KL)
    double kl = 0.0;
    for (std::size_t k = 0; k < K; ++k)
      if (p[k] > 0) kl += p[k] * (std::log(p[k]) - std::log(q[k]));
    for (std::size_t k = 0; k < K; ++k) {
      double dkl = p[k] > 0 ? p[k] * (std::log(p[k]) - std::log(q[k]) - kl) : 0.0;
      dz[k] -= cfg.kl_beta * dkl;
    }

    for (std::size_t i = 0; i < F; ++i) {
      if (phi[i] == 0.0) continue;
      for (std::size_t k = 0; k < K; ++k) grad[i * K + k] += inv_groups * phi[i] * inv_temp * dz[k];
    }
  }
  return grad;
}

StepMetrics train_on_groups(ToyPolicy& policy, const ReferencePolicy& reference, std::span<RolloutGroup> groups,
                            Judge& judge, const RewardConfig& reward_cfg, const GrpoConfig& cfg) {
  StepMetrics m;
  m.groups = groups.size();
  if (groups.empty()) return m;

  for (auto& g : groups) score_group(g, judge, reward_cfg, cfg);

  double n = 0, reward = 0, adv_abs = 0, acc_c = 0, acc_p = 0, align = 0;
  for (const auto& g : groups) {
    for (const auto& r : g.rollouts) {
      n += 1;
      reward += r.reward.total;
      adv_abs += std::abs(r.advantage);
      acc_c += r.clean_action == g.label;
      acc_p += r.pert_action == g.label;
      align += reward_cfg.alpha_r * r.reward.align_reason + reward_cfg.alpha_a * r.reward.align_answer;
    }
  }
  m.mean_reward = reward / n;
  m.mean_advantage_abs = adv_abs / n;
  m.accuracy_clean = acc_c / n;
  m.accuracy_pert = acc_p / n;
  m.alignment_mean = align / n;

  auto value = evaluate_objective(policy, reference.policy(), groups, cfg);
  m.kl = value.kl;
  m.objective = value.objective;

  auto grad = objective_gradient(policy, reference.policy(), groups, cfg);
  double norm = 0.0;
  for (double v : grad) norm += v * v;
  norm = std::sqrt(norm);
  m.grad_norm = norm;
  if (!std::isfinite(norm)) fail(ErrorKind::kDomain, "non-finite policy gradient");
  if (cfg.learning_rate == 0.0) return m;
  double scale = cfg.learning_rate * (norm > cfg.grad_clip ? cfg.grad_clip / norm : 1.0);
  auto& w = policy.weights();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += scale * grad[i];
  return m;
}

StepMetrics train_step(ToyPolicy& policy, const ReferencePolicy& reference, const ToyTask& task,
                       std::span<const ToySample> batch, Judge& judge, const RewardConfig& reward_cfg,
                       const GrpoConfig& cfg, CounterRng rng) {
  std::vector<RolloutGroup> groups;
  groups.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    groups.push_back(sample_group(policy, task, batch[i], cfg, rng.split({fnv1a("group"), i})));
  return train_on_groups(policy, reference, groups, judge, reward_cfg, cfg);
}

double expected_accuracy(const ToyPolicy& policy, std::span<const ToySample> samples, bool perturbed) {
  if (samples.empty()) return 0.0;
  double s = 0.0;
  for (const auto& x : samples) {
    auto p = policy.probs(encode_observation(perturbed ? x.perturbed : x.clean));
    s += p[static_cast<std::size_t>(x.label)];
  }
  return s / static_cast<double>(samples.size());
}

double greedy_accuracy(const ToyPolicy& policy, std::span<const ToySample> samples, bool perturbed) {
  if (samples.empty()) return 0.0;
  double s = 0.0;
  for (const auto& x : samples) {
    auto p = policy.probs(encode_observation(perturbed ? x.perturbed : x.clean));
    auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    s += best == static_cast<std::size_t>(x.label);
  }
  return s / static_cast<double>(samples.size());
}

}  // namespace rova
