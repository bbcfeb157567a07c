#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rova/error.hpp"
#include "rova/judge.hpp"

namespace rova {

/// A model response split into its <think> and <answer> parts.
struct StructuredOutput {
  std::string raw;
  std::string think;
  std::string answer;
  bool format_ok = false;
};

/// Accepts exactly one <think>..</think> followed by exactly one
/// <answer>..</answer>, separated and surrounded only by whitespace.
/// think/answer are trimmed; both are empty when the format check fails.
StructuredOutput extract_output(std::string_view raw);

enum class RewardVariant { kDefault, kConditional, kStepLevel, kConditionalPlusStep };

std::string_view to_string(RewardVariant v);
RewardVariant parse_reward_variant(std::string_view name);

struct RewardConfig {
  double alpha_r = 0.3;
  double alpha_a = 0.7;
  double w_format = 1.0;
  double w_accuracy = 1.0;
  RewardVariant variant = RewardVariant::kDefault;
  double beta_obs = 0.3;
  double beta_reason = 0.5;
  double beta_act = 0.2;

  void validate() const;
  /// Upper bound of the total reward.
  double max_total() const { return w_format + w_accuracy + alpha_r + alpha_a; }
};

struct RewardBreakdown {
  double format = 0.0;
  double accuracy = 0.0;
  double align_reason = 0.0;
  double align_answer = 0.0;
  double total = 0.0;

  /// Recomputes `total` from the components.
  void finalize(const RewardConfig& cfg);
};

/// Raised when a judge call fails mid-computation; carries whatever was
/// already computed (format and accuracy are always filled in).
class RewardError : public Error {
 public:
  RewardError(ErrorKind kind, const std::string& what, RewardBreakdown partial)
      : Error(kind, what), partial_(partial) {}
  const RewardBreakdown& partial() const { return partial_; }

 private:
  RewardBreakdown partial_;
};

/// Lowercased, punctuation-free answer; an option answer ("b", "(B)",
/// "b.", "Option B: cat") reduces to its letter.
std::string normalize_answer(std::string_view answer);

double format_reward(const StructuredOutput& out);
double accuracy_reward(const StructuredOutput& out, std::string_view truth);

/// Raw judge scores (reasoning in {0,0.5,1}, answer in {0,1}); (0,0) when
/// either side failed the format check. Weights are applied by the caller.
std::pair<double, double> alignment_reward(const StructuredOutput& clean, const StructuredOutput& pert,
                                           Judge& judge);

/// Clean-branch output the perturbed output is aligned against: the clean
/// output itself if it is correct, otherwise the correct group member whose
/// reasoning is closest (edit distance) to the perturbed reasoning; null when
/// no correct reference exists.
const StructuredOutput* conditional_reference(const StructuredOutput& pert, const StructuredOutput& clean,
                                              std::span<const StructuredOutput> group, std::string_view truth);

/// Weighted alignment alpha_r*r + alpha_a*a against conditional_reference; 0
/// when there is none.
double conditional_alignment(const StructuredOutput& pert, const StructuredOutput& clean,
                             std::span<const StructuredOutput> group, std::string_view truth, Judge& judge,
                             const RewardConfig& cfg);

/// Maps text to a vector; implementations should return unit vectors or zeros.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(std::string_view text) const = 0;
};

/// L2-normalized token counts, hashed into `dim` buckets.
class BagOfWordsEmbedder final : public Embedder {
 public:
  explicit BagOfWordsEmbedder(std::size_t dim = 4096);
  std::vector<double> embed(std::string_view text) const override;

 private:
  std::size_t dim_;
};

/// Cosine similarity; 0 if either vector is zero.
double cosine(std::span<const double> a, std::span<const double> b);

struct ReasoningStages {
  std::string observation;
  std::string reasoning;
  std::string action;
};

/// Splits a trace at the first causal connective ("because", "therefore", ...)
/// and the first later action cue ("i will", "answer", ...). Falls back to
/// equal token thirds; traces shorter than three tokens fill every stage.
ReasoningStages segment_reasoning(std::string_view trace);

/// sum_k beta_k * cos(e_k(clean), e_k(pert)), clamped to [0,1].
double step_level_reward(std::string_view clean_think, std::string_view pert_think, const Embedder& embedder,
                         const RewardConfig& cfg);

struct RewardContext {
  /// Clean-branch rollouts; used by the conditional variants.
  std::span<const StructuredOutput> clean_group;
  /// Defaults to a BagOfWordsEmbedder when null.
  const Embedder* embedder = nullptr;
};

/// Format and accuracy are scored on the perturbed output before any judge
/// call, then alignment per cfg.variant:
///   default      judge scores against the clean output
///   conditional  judge scores against conditional_reference
///   step_level   reasoning term replaced by step_level_reward
///   conditional_plus_step  both
RewardBreakdown total_reward(const StructuredOutput& clean, const StructuredOutput& pert, std::string_view truth,
                             Judge& judge, const RewardConfig& cfg, const RewardContext& ctx = {});


}  // namespace rova
