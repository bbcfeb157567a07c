#include "rova/curriculum.hpp"

#include <cmath>
#include <fstream>
#include <map>

namespace rova {

using nlohmann::json;

std::string_view to_string(DifficultyLabel label) {
  switch (label) {
    case DifficultyLabel::kEasy: return "easy";
    case DifficultyLabel::kDifficult: return "difficult";
    case DifficultyLabel::kInformative: return "informative";
  }
  return "?";
}

std::string_view to_string(AssessMode mode) {
  switch (mode) {
    case AssessMode::kComparison: return "comparison";
    case AssessMode::kJudge: return "judge";
    case AssessMode::kHybrid: return "hybrid";
  }
  return "?";
}

std::string_view to_string(Decision decision) {
  switch (decision) {
    case Decision::kDiscard: return "discard";
    case Decision::kTrain: return "train";
    case Decision::kDefer: return "defer";
  }
  return "?";
}

std::string_view to_string(EvictReason reason) {
  switch (reason) {
    case EvictReason::kCapacity: return "capacity";
    case EvictReason::kEasy: return "easy";
    case EvictReason::kCounter: return "counter";
  }
  return "?";
}

DifficultyLabel parse_difficulty_label(std::string_view name) {
  for (auto l : {DifficultyLabel::kEasy, DifficultyLabel::kDifficult, DifficultyLabel::kInformative})
    if (to_string(l) == name) return l;
  fail(ErrorKind::kValidation, "unknown difficulty label '" + std::string(name) + "'");
}

AssessMode parse_assess_mode(std::string_view name) {
  for (auto m : {AssessMode::kComparison, AssessMode::kJudge, AssessMode::kHybrid})
    if (to_string(m) == name) return m;
  fail(ErrorKind::kValidation, "unknown assessment mode '" + std::string(name) + "'");
}

DifficultyVerdict::DifficultyVerdict(DifficultyLabel l, double c) : label(l), confidence(c) {
  if (!(c >= 0.0 && c <= 1.0)) fail(ErrorKind::kDomain, "difficulty confidence must lie in [0,1]");
}

void CurriculumConfig::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) fail(ErrorKind::kValidation, "curriculum.tau must lie in (0,1]");
  if (max_counter < 1) fail(ErrorKind::kValidation, "curriculum.max_counter must be positive");
  if (buffer_cap < 1) fail(ErrorKind::kValidation, "curriculum.buffer_cap must be positive");
  if (reeval_period < 1) fail(ErrorKind::kValidation, "curriculum.reeval_period must be positive");
  if (k_max < 1) fail(ErrorKind::kValidation, "curriculum.k_max must be positive");
  if (!(a_min >= 0.0 && a_min <= a_max && a_max <= 1.0))
    fail(ErrorKind::kValidation, "curriculum.a_min/a_max must satisfy 0 <= a_min <= a_max <= 1");
}

// --- assessment ---------------------------------------------------------------

DifficultyVerdict assess_by_comparison(const AssessmentInputs& in) {
  if (in.pert.empty()) fail(ErrorKind::kValidation, "comparison assessment needs perturbed rollouts");
  if (in.clean.size() != in.pert.size())
    fail(ErrorKind::kShape, "clean and perturbed rollout groups differ in size");

  std::size_t correct = 0, consistent = 0;
  std::map<std::string, std::size_t> votes;
  for (std::size_t i = 0; i < in.pert.size(); ++i) {
    const auto& p = in.pert[i];
    const auto& c = in.clean[i];
    bool ok = accuracy_reward(p, in.truth) == 1.0;
    correct += ok;
    if (ok && c.format_ok && normalize_answer(c.answer) == normalize_answer(p.answer)) ++consistent;
    ++votes[p.format_ok ? normalize_answer(p.answer) : std::string("\x01invalid")];
  }
  std::size_t modal = 0;
  for (const auto& [answer, n] : votes) modal = std::max(modal, n);
  double confidence = static_cast<double>(modal) / static_cast<double>(in.pert.size());

  DifficultyLabel label = DifficultyLabel::kInformative;
  if (consistent == in.pert.size()) label = DifficultyLabel::kEasy;
  else if (correct == 0) label = DifficultyLabel::kDifficult;
  return {label, confidence};
}

DifficultyVerdict assess_by_judge(const AssessmentInputs& in, Judge& judge, const CurriculumConfig& cfg) {
  JudgeInputs ji;
  ji.fields = {{"question_text", in.question}};
  ji.mask_coverage = in.mask_coverage;
  ji.images = in.images;
  auto v = judge.evaluate(JudgeKind::kDifficulty, ji);
  double c = v.confidence().value_or(0.0);
  if (!v.answerable()) return {DifficultyLabel::kDifficult, c};
  return {c > cfg.tau ? DifficultyLabel::kEasy : DifficultyLabel::kInformative, c};
}

DifficultyVerdict assess(const AssessmentInputs& in, Judge* judge, const CurriculumConfig& cfg) {
  switch (cfg.mode) {
    case AssessMode::kComparison:
      return assess_by_comparison(in);
    case AssessMode::kJudge:
      if (!judge) fail(ErrorKind::kValidation, "judge assessment mode requires a judge");
      return assess_by_judge(in, *judge, cfg);
    case AssessMode::kHybrid: {
      if (!judge) fail(ErrorKind::kValidation, "hybrid assessment mode requires a judge");
      auto j = assess_by_judge(in, *judge, cfg);
      if (j.label == DifficultyLabel::kDifficult) return j;
      auto c = assess_by_comparison(in);
      return {c.label == DifficultyLabel::kEasy ? DifficultyLabel::kEasy : DifficultyLabel::kInformative,
              j.confidence};
    }
  }
  fail(ErrorKind::kDomain, "unknown assessment mode");
}

Decision route(const DifficultyVerdict& verdict, const CurriculumConfig& cfg) {
  switch (verdict.label) {
    case DifficultyLabel::kEasy:
      return verdict.confidence > cfg.tau ? Decision::kDiscard : Decision::kTrain;
    case DifficultyLabel::kDifficult:
      return Decision::kDefer;
    case DifficultyLabel::kInformative:
      return Decision::kTrain;
  }
  return Decision::kTrain;
}

// --- memory --------------------------------------------------------------------

json to_json(const MemoryEntry& e) {
  json j = json::object();
  j["query_id"] = e.query_id;
  j["counter"] = e.counter;
  j["inserted_at"] = e.inserted_at;
  j["spec"] = to_json(e.spec);
  return j;
}

MemoryEntry memory_entry_from_json(const json& j) {
  try {
    MemoryEntry e;
    e.query_id = j.at("query_id").get<std::string>();
    e.counter = j.at("counter").get<int>();
    e.inserted_at = j.at("inserted_at").get<std::int64_t>();
    e.spec = spec_from_json(j.at("spec"));
    if (e.counter < 0) fail(ErrorKind::kFormat, "memory entry counter is negative");
    return e;
  } catch (const json::exception& ex) {
    fail(ErrorKind::kFormat, std::string("malformed memory entry: ") + ex.what());
  }
}

MemoryBuffer::MemoryBuffer(std::size_t cap) : cap_(cap) {
  if (cap == 0) fail(ErrorKind::kValidation, "memory buffer capacity must be positive");
}

std::optional<MemoryEntry> MemoryBuffer::defer(MemoryEntry entry) {
  if (entry.counter != 0) fail(ErrorKind::kValidation, "deferred entries must start with counter 0");
  std::optional<MemoryEntry> dropped;
  if (entries_.size() >= cap_) {
    dropped = std::move(entries_.front());
    entries_.pop_front();
  }
  entries_.push_back(std::move(entry));
  return dropped;
}

ReevalOutcome MemoryBuffer::reevaluate(const Assessor& assessor, const CurriculumConfig& cfg) {
  ReevalOutcome out;
  std::deque<MemoryEntry> kept;
  for (auto& e : entries_) {
    DifficultyVerdict v;
    try {
      v = assessor(e);
    } catch (const std::exception&) {
      ++out.unassessed;
      kept.push_back(std::move(e));
      continue;
    }
    ++e.counter;
    out.confidences.push_back(v.confidence);
    switch (v.label) {
      case DifficultyLabel::kInformative:
        out.promoted.push_back(std::move(e));
        break;
      case DifficultyLabel::kEasy:
        out.evicted.push_back({std::move(e), EvictReason::kEasy});
        break;
      case DifficultyLabel::kDifficult:
        if (e.counter > cfg.max_counter) out.evicted.push_back({std::move(e), EvictReason::kCounter});
        else kept.push_back(std::move(e));
        break;
    }
  }
  entries_ = std::move(kept);
  return out;
}

bool MemoryBuffer::should_reevaluate(std::int64_t step, const CurriculumConfig& cfg) const {
  if (entries_.empty()) return false;
  return entries_.size() >= cap_ || (step > 0 && step % cfg.reeval_period == 0);
}

json MemoryBuffer::to_json() const {
  json arr = json::array();
  for (const auto& e : entries_) arr.push_back(rova::to_json(e));
  return arr;
}

MemoryBuffer MemoryBuffer::from_json(const json& j, std::size_t cap) {
  if (!j.is_array()) fail(ErrorKind::kFormat, "memory checkpoint must be a JSON array");
  if (j.size() > cap) fail(ErrorKind::kValidation, "memory checkpoint holds more entries than the capacity");
  MemoryBuffer b(cap);
  for (const auto& item : j) b.entries_.push_back(memory_entry_from_json(item));
  return b;
}

void MemoryBuffer::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorKind::kIo, "cannot write " + path.string());
  os << to_json().dump() << '\n';
  if (!os) fail(ErrorKind::kIo, "write failed for " + path.string());
}

MemoryBuffer MemoryBuffer::load(const std::filesystem::path& path, std::size_t cap) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::kIo, "cannot read " + path.string());
  auto j = json::parse(is, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::kFormat, "memory checkpoint is not valid JSON: " + path.string());
  return from_json(j, cap);
}

// --- stats -----------------------------------------------------------------------

void CurriculumStats::advance(std::int64_t step) {
  if (open_ && open_->step == step) return;
  if (open_ && step < open_->step) fail(ErrorKind::kValidation, "curriculum stats updated out of step order");
  close();
  open_ = StepStats{};
  open_->step = step;
}

void CurriculumStats::update(Decision decision, std::int64_t step) {
  advance(step);
  auto& c = open_->counts;
  ++c.arrived;
  switch (decision) {
    case Decision::kDiscard: ++c.discarded; break;
    case Decision::kDefer: ++c.deferred; break;
    case Decision::kTrain: ++c.trained; break;
  }
}

void CurriculumStats::add_promoted(std::int64_t n, std::int64_t step) {
  advance(step);
  open_->counts.promoted += n;
}

void CurriculumStats::add_evicted(std::int64_t n, std::int64_t step) {
  advance(step);
  open_->counts.evicted += n;
}

std::optional<StepStats> CurriculumStats::close() {
  if (!open_) return std::nullopt;
  StepStats s = *open_;
  open_.reset();
  if (s.counts.arrived > 0) {
    s.rho = static_cast<double>(s.counts.trained) / static_cast<double>(s.counts.arrived);
    rho_sum_ += *s.rho;
    ++rho_steps_;
  }
  history_.push_back(s);
  return s;
}

std::optional<double> CurriculumStats::rho_bar() const {
  if (rho_steps_ == 0) return std::nullopt;
  return rho_sum_ / static_cast<double>(rho_steps_);
}

StepCounts CurriculumStats::totals() const {
  StepCounts t;
  auto add = [&t](const StepCounts& c) {
    t.arrived += c.arrived;
    t.discarded += c.discarded;
    t.deferred += c.deferred;
    t.trained += c.trained;
    t.promoted += c.promoted;
    t.evicted += c.evicted;
  };
  for (const auto& s : history_) add(s.counts);
  if (open_) add(open_->counts);
  return t;
}

// --- driver ----------------------------------------------------------------------

Curriculum::Curriculum(CurriculumConfig cfg) : cfg_(cfg), buffer_((cfg.validate(), cfg.buffer_cap)) {}

Decision Curriculum::admit(const DifficultyVerdict& verdict, std::string query_id, const PerturbationSpec& spec,
                           std::int64_t step) {
  auto d = route(verdict, cfg_);
  stats_.update(d, step);
  if (d == Decision::kDefer) {
    MemoryEntry e{std::move(query_id), spec, 0, step};
    if (buffer_.defer(std::move(e))) stats_.add_evicted(1, step);
  }
  return d;
}

std::optional<ReevalOutcome> Curriculum::maintain(std::int64_t step, const Assessor& assessor) {
  if (!buffer_.should_reevaluate(step, cfg_)) return std::nullopt;
  auto out = buffer_.reevaluate(assessor, cfg_);
  stats_.add_promoted(static_cast<std::int64_t>(out.promoted.size()), step);
  stats_.add_evicted(static_cast<std::int64_t>(out.evicted.size()), step);
  return out;
}

}  // namespace rova
