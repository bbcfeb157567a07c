#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "rova/error.hpp"
#include "rova/frame_store.hpp"

namespace rova {

enum class JudgeKind { kAnswerConsistency, kReasoningConsistency, kDifficulty };

std::string_view to_string(JudgeKind kind);
JudgeKind parse_judge_kind(std::string_view name);

/// A judge score whose domain is enforced at construction:
/// answer consistency in {0, 1}; reasoning consistency in {0, 0.5, 1};
/// difficulty in {0 = NO, 1 = YES} with a confidence in [0, 1].
class JudgeVerdict {
 public:
  static JudgeVerdict make(JudgeKind kind, double score, std::optional<double> confidence,
                           std::string raw);

  JudgeKind kind() const { return kind_; }
  double score() const { return score_; }
  const std::optional<double>& confidence() const { return confidence_; }
  const std::string& raw() const { return raw_; }

  /// Difficulty verdicts only: the judge answered YES.
  bool answerable() const { return score_ == 1.0; }

 private:
  JudgeVerdict(JudgeKind kind, double score, std::optional<double> confidence, std::string raw)
      : kind_(kind), score_(score), confidence_(confidence), raw_(std::move(raw)) {}

  JudgeKind kind_;
  double score_;
  std::optional<double> confidence_;
  std::string raw_;
};

/// Judge failure that keeps the offending response text.
class JudgeError : public Error {
 public:
  JudgeError(ErrorKind kind, const std::string& what, std::string raw)
      : Error(kind, what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

using PromptFields = std::map<std::string, std::string, std::less<>>;

struct JudgeInputs {
  PromptFields fields;
  /// Fraction of masked pixels; drives the stub's difficulty verdict.
  std::optional<double> mask_coverage;
  /// PNG-encoded frames shown to a remote difficulty judge.
  std::vector<std::vector<std::uint8_t>> images;
};

std::vector<std::string_view> required_placeholders(JudgeKind kind);

/// Renders the evaluation prompt for `kind`. Every placeholder the template
/// needs must be present in `fields`; values are substituted verbatim.
std::string build_prompt(JudgeKind kind, const PromptFields& fields);

/// Extracts the first JSON object in `text` and validates it for `kind`.
/// Difficulty responses may also use the bare "YES 0.8" form; their
/// confidence is clamped into [0,1] with a warning.
JudgeVerdict parse_verdict(JudgeKind kind, std::string_view text);

class Judge {
 public:
  virtual ~Judge() = default;
  virtual JudgeVerdict evaluate(JudgeKind kind, const JudgeInputs& inputs) = 0;
};

/// Deterministic lexical judge for offline runs.
///   answer:    1 iff case/punctuation-folded strings are equal
///   reasoning: token-set Jaccard >= 0.8 -> 1, >= 0.4 -> 0.5, else 0
///   difficulty: YES iff mask coverage < 0.5, confidence = 1 - coverage
class StubJudge final : public Judge {
 public:
  JudgeVerdict evaluate(JudgeKind kind, const JudgeInputs& inputs) override;
};

struct JudgeEndpoint {
  std::string base_url;  // e.g. http://127.0.0.1:8000/v1
  std::string model = "gpt-4o";
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  int max_in_flight = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::string api_key_env = "ROVA_JUDGE_API_KEY";

  void validate() const;
};

/// OpenAI-compatible chat-completions client. Safe for concurrent use;
/// at most `max_in_flight` requests are outstanding at once.
class RemoteJudge final : public Judge {
 public:
  explicit RemoteJudge(JudgeEndpoint endpoint);

  JudgeVerdict evaluate(JudgeKind kind, const JudgeInputs& inputs) override;

  /// HTTP requests issued so far, including retries.
  std::uint64_t requests_sent() const { return requests_.load(); }
  const JudgeEndpoint& endpoint() const { return endpoint_; }

  /// Request body for a prompt; exposed for wire-format tests.
  std::string request_body(const std::string& prompt,
                           const std::vector<std::vector<std::uint8_t>>& images) const;

 private:
  std::string complete(const std::string& body);

  JudgeEndpoint endpoint_;
  std::string scheme_host_;
  std::string path_;
  std::counting_semaphore<1024> in_flight_;
  std::atomic<std::uint64_t> requests_{0};
};

/// Uniform-stride subsample of frames, PNG-encoded.
std::vector<std::vector<std::uint8_t>> subsample_frames_png(const FrameSequence& seq, int count = 8);

}  // namespace rova
