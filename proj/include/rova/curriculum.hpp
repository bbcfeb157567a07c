#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rova/corruption.hpp"
#include "rova/judge.hpp"
#include "rova/reward.hpp"

namespace rova {

enum class DifficultyLabel { kEasy, kDifficult, kInformative };
enum class AssessMode { kComparison, kJudge, kHybrid };
enum class Decision { kDiscard, kTrain, kDefer };

std::string_view to_string(DifficultyLabel label);
std::string_view to_string(AssessMode mode);
std::string_view to_string(Decision decision);
DifficultyLabel parse_difficulty_label(std::string_view name);
AssessMode parse_assess_mode(std::string_view name);

struct DifficultyVerdict {
  DifficultyLabel label = DifficultyLabel::kInformative;
  double confidence = 0.0;

  DifficultyVerdict() = default;
  /// Throws kDomain unless confidence lies in [0,1].
  DifficultyVerdict(DifficultyLabel label, double confidence);
};

struct CurriculumConfig {
  double tau = 0.8;
  int max_counter = 3;
  int buffer_cap = 1000;
  int reeval_period = 50;
  AssessMode mode = AssessMode::kComparison;
  // Listed with the selection hyperparameters but not read by any rule.
  int k_max = 537;
  double a_min = 0.3;
  double a_max = 0.85;

  /// tau in (0,1]; integers positive.
  void validate() const;
};

/// Model responses and context for one sample. `clean` and `pert` are
/// index-paired rollouts of the two branches.
struct AssessmentInputs {
  std::span<const StructuredOutput> clean;
  std::span<const StructuredOutput> pert;
  std::string truth;
  std::string question;
  std::optional<double> mask_coverage;
  std::vector<std::vector<std::uint8_t>> images;
};

/// Group comparison. easy: every perturbed rollout is correct and agrees
/// with its clean partner. difficult: every perturbed rollout is wrong.
/// informative: anything between. Confidence is the share of perturbed
/// rollouts giving the most common answer.
DifficultyVerdict assess_by_comparison(const AssessmentInputs& in);

/// Difficulty prompt: NO -> difficult, YES with c > tau -> easy, else informative.
DifficultyVerdict assess_by_judge(const AssessmentInputs& in, Judge& judge, const CurriculumConfig& cfg);

/// Dispatches on cfg.mode. Hybrid takes difficult from the judge and lets the
/// comparison separate easy from informative; confidence is the judge's.
DifficultyVerdict assess(const AssessmentInputs& in, Judge* judge, const CurriculumConfig& cfg);

/// (easy, c > tau) -> discard; difficult -> defer; otherwise train.
Decision route(const DifficultyVerdict& verdict, const CurriculumConfig& cfg);

struct MemoryEntry {
  std::string query_id;
  PerturbationSpec spec;
  int counter = 0;
  std::int64_t inserted_at = 0;

  bool operator==(const MemoryEntry&) const = default;
};

nlohmann::json to_json(const MemoryEntry& entry);
MemoryEntry memory_entry_from_json(const nlohmann::json& j);

enum class EvictReason { kCapacity, kEasy, kCounter };
std::string_view to_string(EvictReason reason);

struct Eviction {
  MemoryEntry entry;
  EvictReason reason;
};

struct ReevalOutcome {
  std::vector<MemoryEntry> promoted;
  std::vector<Eviction> evicted;
  std::size_t unassessed = 0;
  /// Confidence of every successful re-assessment, in buffer order.
  std::vector<double> confidences;
};

using Assessor = std::function<DifficultyVerdict(const MemoryEntry&)>;

/// Bounded FIFO of deferred samples. Single writer.
class MemoryBuffer {
 public:
  explicit MemoryBuffer(std::size_t cap);

  /// Appends a fresh entry (counter must be 0). At capacity the oldest entry
  /// is dropped first and returned.
  std::optional<MemoryEntry> defer(MemoryEntry entry);

  /// Re-assesses every resident entry. A successful assessment increments the
  /// counter; informative entries are promoted, easy ones evicted, difficult
  /// ones evicted once the counter exceeds max_counter. An assessor that
  /// throws leaves its entry untouched. Confidence never affects retention.
  ReevalOutcome reevaluate(const Assessor& assessor, const CurriculumConfig& cfg);

  /// Full buffer, or step on the re-evaluation period.
  bool should_reevaluate(std::int64_t step, const CurriculumConfig& cfg) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return cap_; }
  bool empty() const { return entries_.empty(); }
  const std::deque<MemoryEntry>& entries() const { return entries_; }

  nlohmann::json to_json() const;
  static MemoryBuffer from_json(const nlohmann::json& j, std::size_t cap);
  void save(const std::filesystem::path& path) const;
  static MemoryBuffer load(const std::filesystem::path& path, std::size_t cap);

 private:
  std::size_t cap_;
  std::deque<MemoryEntry> entries_;
};

struct StepCounts {
  std::int64_t arrived = 0;
  std::int64_t discarded = 0;
  std::int64_t deferred = 0;
  std::int64_t trained = 0;
  std::int64_t promoted = 0;
  std::int64_t evicted = 0;
};

struct StepStats {
  std::int64_t step = 0;
  StepCounts counts;
  /// trained / arrived; absent when nothing arrived.
  std::optional<double> rho;
};

/// Per-step decision counts with the effective training ratio.
class CurriculumStats {
 public:
  /// Records one routed arrival. Moving to a later step closes the open one.
  void update(Decision decision, std::int64_t step);
  void add_promoted(std::int64_t n, std::int64_t step);
  void add_evicted(std::int64_t n, std::int64_t step);
  /// Closes the open step, if any, and returns its summary.
  std::optional<StepStats> close();

  /// Mean of rho over closed steps where it is defined.
  std::optional<double> rho_bar() const;
  const std::vector<StepStats>& history() const { return history_; }
  StepCounts totals() const;

 private:
  void advance(std::int64_t step);

  std::optional<StepStats> open_;
  std::vector<StepStats> history_;
  double rho_sum_ = 0.0;
  std::int64_t rho_steps_ = 0;
};

/// Routing, buffer maintenance and stats for one training loop.
class Curriculum {
 public:
  explicit Curriculum(CurriculumConfig cfg);

  /// Routes an arrival; deferred samples enter the buffer.
  Decision admit(const DifficultyVerdict& verdict, std::string query_id, const PerturbationSpec& spec,
                 std::int64_t step);

  /// Re-evaluates the buffer when due; returns nullopt otherwise.
  std::optional<ReevalOutcome> maintain(std::int64_t step, const Assessor& assessor);

  const CurriculumConfig& config() const { return cfg_; }
  const MemoryBuffer& buffer() const { return buffer_; }
  CurriculumStats& stats() { return stats_; }
  const CurriculumStats& stats() const { return stats_; }

 private:
  CurriculumConfig cfg_;
  MemoryBuffer buffer_;
  CurriculumStats stats_;
};

}  // namespace rova
