#include "rova/judge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "rova/text.hpp"

namespace rova {

using nlohmann::json;

std::string_view to_string(JudgeKind kind) {
  switch (kind) {
    case JudgeKind::kAnswerConsistency: return "answer_consistency";
    case JudgeKind::kReasoningConsistency: return "reasoning_consistency";
    case JudgeKind::kDifficulty: return "difficulty";
  }
  return "?";
}

JudgeKind parse_judge_kind(std::string_view name) {
  for (auto k : {JudgeKind::kAnswerConsistency, JudgeKind::kReasoningConsistency, JudgeKind::kDifficulty})
    if (to_string(k) == name) return k;
  fail(ErrorKind::kDomain, "unknown judge kind '" + std::string(name) + "'");
}

// --- verdict -----------------------------------------------------------------

namespace {

constexpr double kScoreTol = 1e-9;

std::optional<double> snap(double score, std::initializer_list<double> allowed) {
  for (double a : allowed)
    if (std::abs(score - a) <= kScoreTol) return a;
  return std::nullopt;
}

}  // namespace

JudgeVerdict JudgeVerdict::make(JudgeKind kind, double score, std::optional<double> confidence,
                                std::string raw) {
  std::optional<double> s;
  switch (kind) {
    case JudgeKind::kAnswerConsistency:
    case JudgeKind::kDifficulty:
      s = snap(score, {0.0, 1.0});
      break;
    case JudgeKind::kReasoningConsistency:
      s = snap(score, {0.0, 0.5, 1.0});
      break;
  }
  if (!s) {
    throw JudgeError(ErrorKind::kDomain,
                     "score " + std::to_string(score) + " outside the domain of " +
                         std::string(to_string(kind)),
                     raw);
  }
  if (kind == JudgeKind::kDifficulty && !confidence)
    throw JudgeError(ErrorKind::kDomain, "difficulty verdict requires a confidence", raw);
  if (confidence && !(*confidence >= 0.0 && *confidence <= 1.0))
    throw JudgeError(ErrorKind::kDomain, "confidence outside [0,1]", raw);
  return JudgeVerdict(kind, *s, confidence, std::move(raw));
}

// --- prompts -------------------------------------------------------------------

namespace {

constexpr const char* kAnswerTemplate =
    R"([Task]
You are a strict evaluator responsible for assessing whether the candidate answer matches the reference answer. Score consistency only based on whether the CANDIDATE <answer> is semantically identical to the REFERENCE <answer>. Do not consider reasoning quality, explanation depth, or stylistic differences.

[Evaluation Criteria]
Rate the answer on a binary scale:
- Score 1.0: The candidate answer is exactly the same as, or clearly equivalent to, the reference answer (e.g., "0" vs. "zero", "NYC" vs. "New York City").
- Score 0.0: The candidate answer differs from the reference answer in any substantive way.
Do not reward partial credit. Minor formatting or punctuation differences should be tolerated, but semantic mismatches must receive a score of 0.0.

[Input]
- Reference Answer: {reference_answer}
- Candidate Answer: {candidate_answer}

[Output Format]
Return a JSON object with the following fields. Only output the JSON object - no explanations, no justifications, and no extra text of any kind.
{"score": 0.0 or 1.0,
 "match_type": "exact" or "equivalent" or "mismatch"})";

constexpr const char* kReasoningTemplate =
    R"([Task]
You are a strict evaluator responsible for assessing whether the candidate reasoning is consistent with the reference reasoning. Score consistency only based on whether the CANDIDATE <think> matches the REFERENCE <think> in key evidence and logical steps. Do not evaluate the correctness of the final answer.

[Evaluation Criteria]
Rate the reasoning on a three-tier scale:
- Score 1.0: The candidate reasoning is consistent with the reference up to paraphrasing and minor omissions. All key observations and logical steps are preserved.
- Score 0.5: The candidate reasoning is mostly consistent but contains unsupported additions, missing key intermediate steps, or minor logical deviations.
- Score 0.0: The candidate reasoning contradicts core observations from the reference or hallucinates key facts not present in the reference.

[Evaluation Guidelines]
- Focus exclusively on the reasoning process — ignore the final answer.
- Tolerate stylistic and structural differences if the underlying logic is equivalent.
- Penalize fabricated evidence or contradictions to reference observations.

[Input]
- Reference Reasoning: {reference_think}
- Candidate Reasoning: {candidate_think}

[Output Format]
Return a JSON object with the following fields. Only output the JSON object — no explanations, no justifications, and no extra text of any kind.
{"score": 0.0 or 0.5 or 1.0,
 "justification": "<explanation>"})";

constexpr const char* kDifficultyTemplate =
    R"([Task]
You may ONLY use the MASKED video to judge.

[Evaluation Criteria]
- If the masked video DOES give enough information to reliably answer, respond: YES.
- If the masked video does NOT give enough information, respond: NO.
- Additionally, provide a confidence score in [0.0, 1.0] (one decimal place) reflecting how certain you are in your judgment.
Reply with ONE WORD and ONE NUMBER only.

[Input]
- Question: {question_text}

[Output Format]
{
  "answer": "YES or NO",
  "confidence": 0.0
})";

const char* template_for(JudgeKind kind) {
  switch (kind) {
    case JudgeKind::kAnswerConsistency: return kAnswerTemplate;
    case JudgeKind::kReasoningConsistency: return kReasoningTemplate;
    case JudgeKind::kDifficulty: return kDifficultyTemplate;
  }
  return "";
}

bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<std::string_view> required_placeholders(JudgeKind kind) {
  switch (kind) {
    case JudgeKind::kAnswerConsistency: return {"reference_answer", "candidate_answer"};
    case JudgeKind::kReasoningConsistency: return {"reference_think", "candidate_think"};
    case JudgeKind::kDifficulty: return {"question_text"};
  }
  return {};
}

std::string build_prompt(JudgeKind kind, const PromptFields& fields) {
  auto required = required_placeholders(kind);
  for (auto name : required)
    if (fields.find(name) == fields.end())
      fail(ErrorKind::kValidation, "missing placeholder value {" + std::string(name) + "} for " +
                                       std::string(to_string(kind)));

  std::string_view tmpl = template_for(kind);
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && is_ident(tmpl[j])) ++j;
      if (j < tmpl.size() && tmpl[j] == '}' && j > i + 1) {
        auto name = tmpl.substr(i + 1, j - i - 1);
        if (std::find(required.begin(), required.end(), name) != required.end()) {
          out += fields.find(name)->second;
          i = j + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

// --- parsing -------------------------------------------------------------------

namespace {

// End index (exclusive) of the balanced object starting at `start`, honoring
// JSON string literals; npos if unbalanced.
std::size_t object_end(std::string_view s, std::size_t start) {
  int depth = 0;
  bool in_string = false, escaped = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

std::optional<json> first_json_object(std::string_view s) {
  for (std::size_t pos = s.find('{'); pos != std::string_view::npos; pos = s.find('{', pos + 1)) {
    auto end = object_end(s, pos);
    if (end == std::string_view::npos) continue;
    auto parsed = json::parse(s.substr(pos, end - pos), nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
  }
  return std::nullopt;
}

std::optional<double> as_number(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    char* end = nullptr;
    double d = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && text::trim(end).empty()) return d;
  }
  return std::nullopt;
}

[[noreturn]] void parse_failure(const std::string& what, std::string_view raw) {
  throw JudgeError(ErrorKind::kParse, what + "; raw response: " + std::string(raw), std::string(raw));
}

double clamp_confidence(double c, std::string_view raw) {
  if (c < 0.0 || c > 1.0) {
    spdlog::warn("difficulty confidence {} outside [0,1], clamped (response: {})", c, raw);
    return std::clamp(c, 0.0, 1.0);
  }
  return c;
}

JudgeVerdict parse_difficulty(const std::optional<json>& obj, std::string_view raw) {
  if (obj && obj->contains("answer")) {
    const auto& a = obj->at("answer");
    if (!a.is_string()) parse_failure("difficulty 'answer' is not a string", raw);
    std::string word = text::fold(a.get<std::string>());
    double score;
    if (word == "yes") score = 1.0;
    else if (word == "no") score = 0.0;
    else parse_failure("difficulty 'answer' must be YES or NO", raw);
    if (!obj->contains("confidence")) parse_failure("difficulty verdict lacks 'confidence'", raw);
    auto c = as_number(obj->at("confidence"));
    if (!c) parse_failure("difficulty 'confidence' is not a number", raw);
    return JudgeVerdict::make(JudgeKind::kDifficulty, score, clamp_confidence(*c, raw), std::string(raw));
  }
  static const std::regex bare(R"(\b(YES|NO|Yes|No|yes|no)\b[\s,:;=]*([-+]?(?:\d+\.?\d*|\.\d+)))");
  std::string s(raw);
  std::smatch m;
  if (std::regex_search(s, m, bare)) {
    double score = text::fold(m[1].str()) == "yes" ? 1.0 : 0.0;
    double c = std::strtod(m[2].str().c_str(), nullptr);
    return JudgeVerdict::make(JudgeKind::kDifficulty, score, clamp_confidence(c, raw), std::string(raw));
  }
  parse_failure("no JSON object or bare 'WORD NUMBER' verdict found", raw);
}

}  // namespace

JudgeVerdict parse_verdict(JudgeKind kind, std::string_view text) {
  auto obj = first_json_object(text);
  if (kind == JudgeKind::kDifficulty) return parse_difficulty(obj, text);
  if (!obj) parse_failure("no JSON object found", text);
  if (!obj->contains("score")) parse_failure("JSON object lacks 'score'", text);
  auto score = as_number(obj->at("score"));
  if (!score) parse_failure("'score' is not a number", text);
  return JudgeVerdict::make(kind, *score, std::nullopt, std::string(text));
}

// --- stub ------------------------------------------------------------------------

namespace {

const std::string& field(const JudgeInputs& in, std::string_view name) {
  static const std::string empty;
  auto it = in.fields.find(name);
  return it == in.fields.end() ? empty : it->second;
}

}  // namespace

JudgeVerdict StubJudge::evaluate(JudgeKind kind, const JudgeInputs& inputs) {
  switch (kind) {
    case JudgeKind::kAnswerConsistency: {
      bool same = text::fold(field(inputs, "reference_answer")) ==
                  text::fold(field(inputs, "candidate_answer"));
      double score = same ? 1.0 : 0.0;
      return JudgeVerdict::make(kind, score, std::nullopt,
                                json{{"score", score}, {"match_type", same ? "exact" : "mismatch"}}.dump());
    }
    case JudgeKind::kReasoningConsistency: {
      double j = text::token_jaccard(field(inputs, "reference_think"), field(inputs, "candidate_think"));
      double score = j >= 0.8 ? 1.0 : (j >= 0.4 ? 0.5 : 0.0);
      return JudgeVerdict::make(kind, score, std::nullopt,
                                json{{"score", score}, {"justification", "token jaccard " + std::to_string(j)}}.dump());
    }
    case JudgeKind::kDifficulty: {
      double coverage = std::clamp(inputs.mask_coverage.value_or(0.0), 0.0, 1.0);
      bool yes = coverage < 0.5;
      double confidence = 1.0 - coverage;
      return JudgeVerdict::make(kind, yes ? 1.0 : 0.0, confidence,
                                json{{"answer", yes ? "YES" : "NO"}, {"confidence", confidence}}.dump());
    }
  }
  fail(ErrorKind::kDomain, "unknown judge kind");
}

// --- remote ----------------------------------------------------------------------

void JudgeEndpoint::validate() const {
  if (base_url.empty()) fail(ErrorKind::kValidation, "judge endpoint base_url is empty");
  if (base_url.find("://") == std::string::npos)
    fail(ErrorKind::kValidation, "judge base_url must include a scheme: " + base_url);
  if (timeout.count() <= 0) fail(ErrorKind::kValidation, "judge timeout must be > 0");
  if (max_retries < 0) fail(ErrorKind::kValidation, "judge max_retries must be >= 0");
  if (max_in_flight < 1 || max_in_flight > 1024)
    fail(ErrorKind::kValidation, "judge max_in_flight must lie in [1, 1024]");
  if (initial_backoff.count() < 0) fail(ErrorKind::kValidation, "judge backoff must be >= 0");
}

RemoteJudge::RemoteJudge(JudgeEndpoint endpoint)
    : endpoint_(std::move(endpoint)), in_flight_(endpoint_.max_in_flight) {
  endpoint_.validate();
  auto scheme_end = endpoint_.base_url.find("://") + 3;
  auto slash = endpoint_.base_url.find('/', scheme_end);
  scheme_host_ = endpoint_.base_url.substr(0, slash);
  path_ = slash == std::string::npos ? "" : endpoint_.base_url.substr(slash);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
}

std::string RemoteJudge::request_body(const std::string& prompt,
                                      const std::vector<std::vector<std::uint8_t>>& images) const {
  json content;
  if (images.empty()) {
    content = prompt;
  } else {
    content = json::array();
    content.push_back({{"type", "text"}, {"text", prompt}});
    for (const auto& png : images) {
      content.push_back({{"type", "image_url"},
                         {"image_url", {{"url", "data:image/png;base64," + text::base64(png)}}}});
    }
  }
  json body = {{"model", endpoint_.model},
               {"temperature", 0},
               {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
  return body.dump();
}

namespace {

std::string redact(const std::string& body) {
  static const std::regex b64(R"(base64,[A-Za-z0-9+/=]{16,})");
  return std::regex_replace(body, b64, "base64,<redacted>");
}

class SemaphoreGuard {
 public:
  explicit SemaphoreGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SemaphoreGuard() { s_.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

std::string RemoteJudge::complete(const std::string& body) {
  SemaphoreGuard guard(in_flight_);

  httplib::Headers headers;
  if (const char* key = std::getenv(endpoint_.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint_.timeout - secs);
  spdlog::debug("judge POST {}{} (Authorization: {}) body: {}", scheme_host_, path_,
                headers.empty() ? "none" : "Bearer ***", redact(body));

  std::string last_error;
  auto backoff = endpoint_.initial_backoff;
  for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(scheme_host_);
    client.set_connection_timeout(secs.count(), static_cast<time_t>(usecs.count()));
    client.set_read_timeout(secs.count(), static_cast<time_t>(usecs.count()));
    client.set_write_timeout(secs.count(), static_cast<time_t>(usecs.count()));
    ++requests_;
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      spdlog::debug("judge attempt {} failed: {}", attempt + 1, last_error);
      continue;
    }
    spdlog::debug("judge response {}: {}", res->status, res->body);
    if (res->status == 200) return res->body;
    last_error = "HTTP " + std::to_string(res->status);
    bool retryable = res->status >= 500 || res->status == 429 || res->status == 408;
    if (!retryable) throw JudgeError(ErrorKind::kTransport, "judge endpoint returned " + last_error, res->body);
  }
  throw JudgeError(ErrorKind::kTransport,
                   "judge endpoint failed after " + std::to_string(endpoint_.max_retries + 1) +
                       " attempts: " + last_error,
                   "");
}

JudgeVerdict RemoteJudge::evaluate(JudgeKind kind, const JudgeInputs& inputs) {
  auto prompt = build_prompt(kind, inputs.fields);
  auto body = complete(request_body(prompt, kind == JudgeKind::kDifficulty ? inputs.images
                                                                         : std::vector<std::vector<std::uint8_t>>{}));
  auto response = json::parse(body, nullptr, false);
  std::string content;
  try {
    if (response.is_discarded()) throw std::runtime_error("not JSON");
    content = response.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const std::exception&) {
    parse_failure("response is not a chat-completions object", body);
  }
  return parse_verdict(kind, content);
}

std::vector<std::vector<std::uint8_t>> subsample_frames_png(const FrameSequence& seq, int count) {
  int t = seq.frames();
  int n = std::clamp(count, 1, t);
  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int idx = n == 1 ? 0 : static_cast<int>(static_cast<long long>(i) * (t - 1) / (n - 1));
    out.push_back(encode_png(seq, idx));
  }
  return out;
}

}  // namespace rova
