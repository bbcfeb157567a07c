#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rova/corruption.hpp"
#include "rova/frame_store.hpp"
#include "rova/judge.hpp"
#include "rova/reward.hpp"
#include "rova/rng.hpp"

namespace rova {

struct GrpoConfig {
  int group_size = 8;           // G
  int shuffled_group_size = 4;  // clean rollouts drawn from a frame-shuffled input
  double clip_eps = 0.2;
  double kl_beta = 0.01;
  double learning_rate = 0.5;
  double grad_clip = 1.0;       // L2 norm
  double sigma_min = 1e-6;
  // Recorded for completeness; the group-relative advantage uses neither.
  double gae_lambda = 0.95;
  double gamma = 0.99;

  void validate() const;
};

// --- numerics ----------------------------------------------------------------

/// (r - mean) / std with the population std; all zeros when std < sigma_min.
/// Throws kValidation for fewer than two rewards.
std::vector<double> normalize_advantages(std::span<const double> rewards, double sigma_min);

/// (1/G) sum_j min(r_j A_j, clip(r_j, 1-eps, 1+eps) A_j) - beta * kl.
/// Throws kDomain for a non-finite or non-positive ratio.
double surrogate_objective(std::span<const double> ratios, std::span<const double> advantages, double eps,
                           double beta, double kl);

/// Exact KL(p || q) of two categoricals. Throws kDomain when p puts mass
/// where q has none, kShape on a size mismatch.
double kl_categorical(std::span<const double> p, std::span<const double> q);

double total_variation(std::span<const double> p, std::span<const double> q);

// --- policy ------------------------------------------------------------------

/// Linear softmax policy: pi(.|phi) = softmax(phi^T W / temperature).
class ToyPolicy {
 public:
  ToyPolicy(std::size_t features, std::size_t actions, double temperature = 1.0);

  std::size_t features() const { return features_; }
  std::size_t actions() const { return actions_; }
  double temperature() const { return temperature_; }

  /// Row-major (features x actions).
  std::vector<double>& weights() { return w_; }
  const std::vector<double>& weights() const { return w_; }
  double& weight(std::size_t feature, std::size_t action) { return w_[feature * actions_ + action]; }

  std::vector<double> probs(std::span<const double> phi) const;
  double log_prob(std::span<const double> phi, std::size_t action) const;
  std::size_t sample(std::span<const double> phi, double u) const;

  bool operator==(const ToyPolicy&) const = default;

 private:
  std::vector<double> logits(std::span<const double> phi) const;

  std::size_t features_;
  std::size_t actions_;
  double temperature_;
  std::vector<double> w_;
};

/// Frozen copy of the policy at initialization.
class ReferencePolicy {
 public:
  explicit ReferencePolicy(const ToyPolicy& policy) : policy_(policy) {}
  const ToyPolicy& policy() const { return policy_; }

 private:
  ToyPolicy policy_;
};

/// Mean KL(policy || reference) over the observations.
double kl_divergence(const ToyPolicy& policy, const ToyPolicy& reference,
                     std::span<const std::vector<double>> observations);

// --- synthetic task -------------------------------------------------------------

struct ToyTaskConfig {
  int features = 32;        // frame width; one observation feature per column
  int informative = 3;      // leading columns that carry the label
  int frames = 4;
  double two_cue_occlusion_rate = 0.3;  // otherwise one cue column is hidden
  double unanswerable_rate = 0.05;      // every cue column hidden
  std::uint64_t seed = 0;

  void validate() const;
};

/// One question: two options, answered by whether the cue columns are lit.
/// The perturbation is a static occlusion box over some cue columns plus a
/// frame shuffle, applied through the corruption pipeline.
struct ToySample {
  std::string query_id;
  int label = 0;
  std::string truth;
  std::string question;
  FrameSequence clean;
  PerturbationSpec spec;
  FrameSequence perturbed;
};

class ToyTask {
 public:
  explicit ToyTask(ToyTaskConfig cfg);

  const ToyTaskConfig& config() const { return cfg_; }
  std::size_t observation_dim() const { return static_cast<std::size_t>(cfg_.features) + 1; }
  static constexpr std::size_t kActions = 2;
  static std::string answer_text(std::size_t action);

  ToySample sample(std::uint64_t index) const;
  /// Sample with a given index whose id is "toy-<index>".
  ToySample from_query_id(const std::string& query_id) const;

 private:
  ToyTaskConfig cfg_;
};

/// Per-column mean intensity in [0,1] plus a trailing bias feature of 1.
std::vector<double> encode_observation(const FrameSequence& seq);

/// Templated response naming the lit cue columns and the chosen option.
std::string render_response(std::span<const double> phi, int informative, std::size_t action);

// --- rollouts --------------------------------------------------------------------

struct Rollout {
  bool clean_shuffled = false;
  std::size_t clean_action = 0;
  std::size_t pert_action = 0;
  StructuredOutput clean;
  StructuredOutput pert;
  // Clean-branch bookkeeping; never read by the gradient.
  double clean_logp_old = 0;
  double clean_logp = 0;
  double pert_logp_old = 0;
  RewardBreakdown reward;
  double advantage = 0;
};

struct RolloutGroup {
  std::string query_id;
  std::string truth;
  std::size_t label = 0;
  std::vector<double> obs_clean;
  std::vector<double> obs_shuffled;
  std::vector<double> obs_pert;
  std::vector<Rollout> rollouts;
};

/// Samples G rollouts per branch; the first G~ clean rollouts see a
/// frame-shuffled clean input.
RolloutGroup sample_group(const ToyPolicy& policy, const ToyTask& task, const ToySample& sample,
                          const GrpoConfig& cfg, CounterRng rng);

/// Fills rewards and advantages. Judge failures propagate.
void score_group(RolloutGroup& group, Judge& judge, const RewardConfig& reward_cfg, const GrpoConfig& cfg);

struct ObjectiveValue {
  double surrogate = 0;
  double kl = 0;
  double objective = 0;
};

/// Batch objective: mean over groups of the clipped surrogate of the
/// perturbed branch, minus beta times the mean KL on perturbed observations.
ObjectiveValue evaluate_objective(const ToyPolicy& policy, const ToyPolicy& reference,
                                  std::span<const RolloutGroup> groups, const GrpoConfig& cfg);

/// Analytic gradient of evaluate_objective(...).objective w.r.t. the weights.
std::vector<double> objective_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                                       std::span<const RolloutGroup> groups, const GrpoConfig& cfg);

struct StepMetrics {
  std::int64_t step = 0;
  std::size_t groups = 0;
  double mean_reward = 0;
  double mean_advantage_abs = 0;
  double kl = 0;
  double objective = 0;
  double accuracy_clean = 0;
  double accuracy_pert = 0;
  double alignment_mean = 0;
  double grad_norm = 0;
};

/// Scores already-sampled groups and takes one clipped ascent step. Parameters
/// are only touched after every reward has been computed.
StepMetrics train_on_groups(ToyPolicy& policy, const ReferencePolicy& reference, std::span<RolloutGroup> groups,
                            Judge& judge, const RewardConfig& reward_cfg, const GrpoConfig& cfg);

/// Samples groups for the batch, then train_on_groups.
StepMetrics train_step(ToyPolicy& policy, const ReferencePolicy& reference, const ToyTask& task,
                       std::span<const ToySample> batch, Judge& judge, const RewardConfig& reward_cfg,
                       const GrpoConfig& cfg, CounterRng rng);

/// Mean probability of the correct option on the perturbed (or clean) inputs.
double expected_accuracy(const ToyPolicy& policy, std::span<const ToySample> samples, bool perturbed = true);
/// Share of samples whose most likely option is correct.
double greedy_accuracy(const ToyPolicy& policy, std::span<const ToySample> samples, bool perturbed = true);

}  // namespace rova
