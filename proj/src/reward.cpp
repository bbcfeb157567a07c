#include "rova/reward.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <regex>

#include "rova/rng.hpp"
#include "rova/text.hpp"

namespace rova {

namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";

std::size_t count_of(std::string_view s, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string_view::npos; pos = s.find(needle, pos + needle.size())) ++n;
  return n;
}

bool all_space(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

StructuredOutput extract_output(std::string_view raw) {
  StructuredOutput out;
  out.raw = std::string(raw);
  for (auto tag : {kThinkOpen, kThinkClose, kAnswerOpen, kAnswerClose})
    if (count_of(raw, tag) != 1) return out;

  auto t0 = raw.find(kThinkOpen);
  auto t1 = raw.find(kThinkClose);
  auto a0 = raw.find(kAnswerOpen);
  auto a1 = raw.find(kAnswerClose);
  if (!(t0 < t1 && t1 < a0 && a0 < a1)) return out;
  if (!all_space(raw.substr(0, t0))) return out;
  if (!all_space(raw.substr(t1 + kThinkClose.size(), a0 - t1 - kThinkClose.size()))) return out;
  if (!all_space(raw.substr(a1 + kAnswerClose.size()))) return out;

  out.think = text::trim(raw.substr(t0 + kThinkOpen.size(), t1 - t0 - kThinkOpen.size()));
  out.answer = text::trim(raw.substr(a0 + kAnswerOpen.size(), a1 - a0 - kAnswerOpen.size()));
  out.format_ok = true;
  return out;
}

std::string_view to_string(RewardVariant v) {
  switch (v) {
    case RewardVariant::kDefault: return "default";
    case RewardVariant::kConditional: return "conditional";
    case RewardVariant::kStepLevel: return "step_level";
    case RewardVariant::kConditionalPlusStep: return "conditional_plus_step";
  }
  return "?";
}

RewardVariant parse_reward_variant(std::string_view name) {
  for (auto v : {RewardVariant::kDefault, RewardVariant::kConditional, RewardVariant::kStepLevel,
                 RewardVariant::kConditionalPlusStep})
    if (to_string(v) == name) return v;
  fail(ErrorKind::kValidation, "unknown reward variant '" + std::string(name) + "'");
}

void RewardConfig::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
      fail(ErrorKind::kValidation, std::string("reward.") + name + " must be finite and >= 0");
  };
  check(alpha_r, "alpha_r");
  check(alpha_a, "alpha_a");
  check(w_format, "w_format");
  check(w_accuracy, "w_accuracy");
  check(beta_obs, "beta_obs");
  check(beta_reason, "beta_reason");
  check(beta_act, "beta_act");
}

void RewardBreakdown::finalize(const RewardConfig& cfg) {
  total = cfg.w_format * format + cfg.w_accuracy * accuracy + cfg.alpha_r * align_reason +
          cfg.alpha_a * align_answer;
}

std::string normalize_answer(std::string_view answer) {
  static const std::regex option(R"(^\s*(?:(?:option|answer|choice)\s*:?)?\s*[\(\[]?([a-z])(?:[\)\]\.:]\s*.*|[\)\]])?\s*$)",
                                 std::regex::icase);
  std::string s(answer);
  std::smatch m;
  if (std::regex_match(s, m, option)) {
    return std::string(1, static_cast<char>(std::tolower(static_cast<unsigned char>(m[1].str()[0]))));
  }
  return text::fold(answer);
}

double format_reward(const StructuredOutput& out) { return out.format_ok ? 1.0 : 0.0; }

double accuracy_reward(const StructuredOutput& out, std::string_view truth) {
  if (!out.format_ok) return 0.0;
  auto a = normalize_answer(out.answer);
  return !a.empty() && a == normalize_answer(truth) ? 1.0 : 0.0;
}

std::pair<double, double> alignment_reward(const StructuredOutput& clean, const StructuredOutput& pert,
                                           Judge& judge) {
  if (!clean.format_ok || !pert.format_ok) return {0.0, 0.0};
  JudgeInputs reasoning;
  reasoning.fields = {{"reference_think", clean.think}, {"candidate_think", pert.think}};
  double r = judge.evaluate(JudgeKind::kReasoningConsistency, reasoning).score();
  JudgeInputs answer;
  answer.fields = {{"reference_answer", clean.answer}, {"candidate_answer", pert.answer}};
  double a = judge.evaluate(JudgeKind::kAnswerConsistency, answer).score();
  return {r, a};
}

const StructuredOutput* conditional_reference(const StructuredOutput& pert, const StructuredOutput& clean,
                                              std::span<const StructuredOutput> group, std::string_view truth) {
  if (accuracy_reward(clean, truth) == 1.0) return &clean;
  const StructuredOutput* best = nullptr;
  std::size_t best_dist = std::numeric_limits<std::size_t>::max();
  for (const auto& candidate : group) {
    if (accuracy_reward(candidate, truth) != 1.0) continue;
    auto d = text::edit_distance(candidate.think, pert.think);
    if (d < best_dist) {
      best = &candidate;
      best_dist = d;
    }
  }
  return best;
}

double conditional_alignment(const StructuredOutput& pert, const StructuredOutput& clean,
                             std::span<const StructuredOutput> group, std::string_view truth, Judge& judge,
                             const RewardConfig& cfg) {
  const auto* ref = conditional_reference(pert, clean, group, truth);
  if (!ref) return 0.0;
  auto [r, a] = alignment_reward(*ref, pert, judge);
  return cfg.alpha_r * r + cfg.alpha_a * a;
}

BagOfWordsEmbedder::BagOfWordsEmbedder(std::size_t dim) : dim_(dim) {
  if (dim == 0) fail(ErrorKind::kValidation, "embedder dimension must be positive");
}

std::vector<double> BagOfWordsEmbedder::embed(std::string_view s) const {
  std::vector<double> v(dim_, 0.0);
  for (const auto& tok : text::tokens(s)) v[fnv1a(tok) % dim_] += 1.0;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::kShape, "cosine of vectors with different lengths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

bool is_reason_cue(const std::string& t) {
  return t == "because" || t == "therefore" || t == "thus" || t == "hence" || t == "since" || t == "so";
}

bool is_action_cue(const std::vector<std::string>& toks, std::size_t i) {
  const auto& t = toks[i];
  if (t == "will" && i > 0 && toks[i - 1] == "i") return true;
  return t == "answer" || t == "action" || t == "choose" || t == "select";
}

std::string join(const std::vector<std::string>& toks, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += toks[i];
  }
  return out;
}

}  // namespace

ReasoningStages segment_reasoning(std::string_view trace) {
  auto toks = text::tokens(trace);
  const std::size_t n = toks.size();
  if (n < 3) {
    auto all = join(toks, 0, n);
    return {all, all, all};
  }
  std::size_t r = n, a = n;
  for (std::size_t i = 1; i < n && r == n; ++i)
    if (is_reason_cue(toks[i])) r = i;
  for (std::size_t i = r + 1; i < n && a == n; ++i)
    if (is_action_cue(toks, i)) a = (toks[i] == "will" ? i - 1 : i);
  if (r == n || a == n || a <= r) {
    r = n / 3;
    a = 2 * n / 3;
  }
  return {join(toks, 0, r), join(toks, r, a), join(toks, a, n)};
}

double step_level_reward(std::string_view clean_think, std::string_view pert_think, const Embedder& embedder,
                         const RewardConfig& cfg) {
  auto c = segment_reasoning(clean_think);
  auto p = segment_reasoning(pert_think);
  auto cos_of = [&](const std::string& x, const std::string& y) {
    auto ex = embedder.embed(x);
    auto ey = embedder.embed(y);
    return cosine(ex, ey);
  };
  double s = cfg.beta_obs * cos_of(c.observation, p.observation) +
             cfg.beta_reason * cos_of(c.reasoning, p.reasoning) + cfg.beta_act * cos_of(c.action, p.action);
  return std::clamp(s, 0.0, 1.0);
}

RewardBreakdown total_reward(const StructuredOutput& clean, const StructuredOutput& pert, std::string_view truth,
                             Judge& judge, const RewardConfig& cfg, const RewardContext& ctx) {
  RewardBreakdown b;
  b.format = format_reward(pert);
  b.accuracy = accuracy_reward(pert, truth);
  b.finalize(cfg);

  if (!clean.format_ok || !pert.format_ok) return b;

  const bool conditional =
      cfg.variant == RewardVariant::kConditional || cfg.variant == RewardVariant::kConditionalPlusStep;
  const bool step = cfg.variant == RewardVariant::kStepLevel || cfg.variant == RewardVariant::kConditionalPlusStep;

  const StructuredOutput* ref = conditional ? conditional_reference(pert, clean, ctx.clean_group, truth) : &clean;
  if (!ref) return b;

  try {
    if (step) {
      BagOfWordsEmbedder fallback;
      const Embedder& emb = ctx.embedder ? *ctx.embedder : fallback;
      b.align_reason = step_level_reward(ref->think, pert.think, emb, cfg);
      JudgeInputs answer;
      answer.fields = {{"reference_answer", ref->answer}, {"candidate_answer", pert.answer}};
      b.align_answer = judge.evaluate(JudgeKind::kAnswerConsistency, answer).score();
    } else {
      auto [r, a] = alignment_reward(*ref, pert, judge);
      b.align_reason = r;
      b.align_answer = a;
    }
  } catch (const Error& e) {
    b.finalize(cfg);
    throw RewardError(e.kind(), std::string("alignment judge failed: ") + e.what(), b);
  }
  b.finalize(cfg);
  return b;
}

}  // namespace rova
