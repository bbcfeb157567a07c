#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <regex>

#include "rova/reward.hpp"
#include "rova/rng.hpp"

using namespace rova;

namespace {

/// Returns fixed scores and records every call.
class ScriptedJudge final : public Judge {
 public:
  ScriptedJudge(double reason, double answer) : reason_(reason), answer_(answer) {}
  JudgeVerdict evaluate(JudgeKind kind, const JudgeInputs& in) override {
    calls.push_back(kind);
    last = in.fields;
    if (throw_on_call) throw JudgeError(ErrorKind::kTransport, "down", "");
    double s = kind == JudgeKind::kReasoningConsistency ? reason_ : answer_;
    return JudgeVerdict::make(kind, s, std::nullopt, "");
  }
  std::vector<JudgeKind> calls;
  PromptFields last;
  bool throw_on_call = false;

 private:
  double reason_, answer_;
};

StructuredOutput out(const std::string& think, const std::string& answer) {
  return extract_output("<think>" + think + "</think><answer>" + answer + "</answer>");
}

// Independent format oracle: one anchored regex plus exact tag counts.
bool format_oracle(const std::string& s) {
  auto count = [&](const std::string& tag) {
    std::size_t n = 0;
    for (auto p = s.find(tag); p != std::string::npos; p = s.find(tag, p + 1)) ++n;
    return n;
  };
  for (const char* tag : {"<think>", "</think>", "<answer>", "</answer>"})
    if (count(tag) != 1) return false;
  static const std::regex re(R"(^\s*<think>[\s\S]*</think>\s*<answer>[\s\S]*</answer>\s*$)");
  return std::regex_match(s, re);
}

}  // namespace

TEST_CASE("extract_output basic cases") {
  auto a = extract_output("<think>x</think><answer>A</answer>");
  CHECK(a.format_ok);
  CHECK(a.think == "x");
  CHECK(a.answer == "A");
  auto b = extract_output("<answer>A</answer><think>x</think>");
  CHECK_FALSE(b.format_ok);
  CHECK(b.think.empty());
  CHECK(b.answer.empty());
  CHECK_FALSE(extract_output("").format_ok);
  auto c = extract_output("  <think>\n multi\nline \n</think>\n\n<answer> B </answer>\n");
  CHECK(c.format_ok);
  CHECK(c.think == "multi\nline");
  CHECK(c.answer == "B");
  CHECK_FALSE(extract_output("<think>x</think>junk<answer>A</answer>").format_ok);
  CHECK_FALSE(extract_output("<think>x</think><answer>A</answer><answer>B</answer>").format_ok);
}

TEST_CASE("extract_output agrees with the regex oracle over tag orderings") {
  std::vector<std::string> tags = {"<think>", "</think>", "<answer>", "</answer>"};
  std::vector<int> order = {0, 1, 2, 3};
  int cases = 0;
  do {
    for (const char* fill : {"", "x", " ", "\n"}) {
      std::string s;
      for (int i : order) s += tags[static_cast<std::size_t>(i)] + fill;
      CAPTURE(s);
      REQUIRE(extract_output(s).format_ok == format_oracle(s));
      ++cases;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  CHECK(cases >= 20);

  CounterRng rng(1);
  std::vector<std::string> pieces = {"<think>", "</think>", "<answer>", "</answer>", " ", "a", "\n", "<", "b c"};
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    auto len = rng.below(9);
    for (std::uint64_t k = 0; k < len; ++k) s += pieces[rng.below(pieces.size())];
    if (rng.bernoulli(0.3)) s = " <think>" + s + "</think> <answer>" + pieces[rng.below(pieces.size())] + "</answer>";
    CAPTURE(s);
    REQUIRE(extract_output(s).format_ok == format_oracle(s));
  }
}

TEST_CASE("answer normalization table") {
  struct Row {
    const char* in;
    const char* out;
  };
  for (auto r : std::vector<Row>{{"B", "b"},
                                 {"b.", "b"},
                                 {"(B)", "b"},
                                 {"[c]", "c"},
                                 {"Option B: a cat", "b"},
                                 {"answer: d", "d"},
                                 {"  A) the dog ", "a"},
                                 {"New York City!", "newyorkcity"},
                                 {"  Forty-Two ", "fortytwo"},
                                 {"", ""}}) {
    CAPTURE(r.in);
    CHECK(normalize_answer(r.in) == r.out);
  }
}

TEST_CASE("accuracy reward") {
  CHECK(accuracy_reward(out("t", "B"), "B") == 1.0);
  CHECK(accuracy_reward(out("t", "b."), "B") == 1.0);
  CHECK(accuracy_reward(out("t", "C"), "B") == 0.0);
  CHECK(accuracy_reward(extract_output("<answer>B</answer>"), "B") == 0.0);
  CHECK(format_reward(out("t", "B")) == 1.0);
  CHECK(format_reward(extract_output("B")) == 0.0);
}

TEST_CASE("alignment with the stub judge") {
  StubJudge stub;
  auto o = out("the red ball rolls left", "A");
  auto [r, a] = alignment_reward(o, o, stub);
  CHECK(r == 1.0);
  CHECK(a == 1.0);
  auto [r2, a2] = alignment_reward(o, out("completely different words here", "A"), stub);
  CHECK(r2 == 0.0);
  CHECK(a2 == 1.0);
  auto [r3, a3] = alignment_reward(o, extract_output("A"), stub);
  CHECK(r3 == 0.0);
  CHECK(a3 == 0.0);
}

TEST_CASE("weighted alignment contributes 0.85 for scores (0.5, 1)") {
  ScriptedJudge judge(0.5, 1.0);
  RewardConfig cfg;
  auto b = total_reward(out("x", "B"), out("y", "B"), "B", judge, cfg);
  CHECK(b.align_reason == 0.5);
  CHECK(b.align_answer == 1.0);
  CHECK(b.total - b.format - b.accuracy == doctest::Approx(0.3 * 0.5 + 0.7 * 1.0));
  CHECK(b.total == doctest::Approx(2.85));
}

TEST_CASE("total reward examples") {
  RewardConfig cfg;
  StubJudge stub;
  auto o = out("I see a red ball", "B");
  CHECK(total_reward(o, o, "B", stub, cfg).total == doctest::Approx(3.0));

  auto bad = extract_output("B");
  ScriptedJudge j1(1.0, 1.0);
  auto fail = total_reward(o, bad, "B", j1, cfg);
  CHECK(fail.total == 0.0);
  CHECK(j1.calls.empty());
  CHECK(total_reward(bad, o, "B", j1, cfg).total == doctest::Approx(2.0));

  ScriptedJudge j0(0.0, 0.0);
  CHECK(total_reward(o, o, "B", j0, cfg).total == doctest::Approx(2.0));
}

TEST_CASE("total reward is bounded and monotone in judge scores") {
  CounterRng rng(2);
  RewardConfig cfg;
  const double rs[] = {0.0, 0.5, 1.0};
  const double as[] = {0.0, 1.0};
  std::vector<std::string> answers = {"A", "B", "b.", ""};
  for (int i = 0; i < 500; ++i) {
    auto clean = rng.bernoulli(0.9) ? out("c", answers[rng.below(4)]) : extract_output("junk");
    auto pert = rng.bernoulli(0.9) ? out("p", answers[rng.below(4)]) : extract_output("junk");
    double prev_r = -1;
    for (double r : rs) {
      double prev_a = -1;
      for (double a : as) {
        ScriptedJudge j(r, a);
        double t = total_reward(clean, pert, "B", j, cfg).total;
        REQUIRE(t >= 0.0);
        REQUIRE(t <= cfg.max_total() + 1e-12);
        REQUIRE(t >= prev_a);
        prev_a = t;
      }
      REQUIRE(prev_a >= prev_r);
      prev_r = prev_a;
    }
  }
}

TEST_CASE("accuracy is computed before the judge is consulted") {
  ScriptedJudge j(1.0, 1.0);
  j.throw_on_call = true;
  RewardConfig cfg;
  try {
    total_reward(out("c", "B"), out("p", "B"), "B", j, cfg);
    FAIL("expected judge failure");
  } catch (const RewardError& e) {
    CHECK(e.kind() == ErrorKind::kTransport);
    CHECK(e.partial().format == 1.0);
    CHECK(e.partial().accuracy == 1.0);
    CHECK(e.partial().align_reason == 0.0);
    CHECK(e.partial().total == doctest::Approx(2.0));
  }
}

TEST_CASE("self-alignment equals format plus accuracy plus both weights") {
  StubJudge stub;
  RewardConfig cfg;
  cfg.w_format = 0.5;
  cfg.w_accuracy = 2.0;
  auto o = out("some reasoning", "C");
  CHECK(total_reward(o, o, "C", stub, cfg).total == doctest::Approx(0.5 + 2.0 + 0.3 + 0.7));
  CHECK(total_reward(o, o, "D", stub, cfg).total == doctest::Approx(0.5 + 0.3 + 0.7));
}

TEST_CASE("conditional reference selection") {
  auto pert = out("the ball moves left quickly", "A");
  auto clean_ok = out("anything", "B");
  auto clean_bad = out("the ball moves right", "C");
  std::vector<StructuredOutput> group = {out("the ball moves left slowly", "B"), out("zzzz qqqq", "B"),
                                         out("the ball moves left quickly", "A")};
  CHECK(conditional_reference(pert, clean_ok, group, "B") == &clean_ok);
  CHECK(conditional_reference(pert, clean_bad, group, "B") == &group[0]);
  std::vector<StructuredOutput> wrong = {out("x", "A"), out("y", "C")};
  CHECK(conditional_reference(pert, clean_bad, wrong, "B") == nullptr);
}

TEST_CASE("conditional alignment values") {
  RewardConfig cfg;
  cfg.variant = RewardVariant::kConditional;
  auto pert = out("p", "B");
  auto clean_ok = out("c", "B");
  auto clean_bad = out("c", "A");
  std::vector<StructuredOutput> none = {out("x", "A")};

  ScriptedJudge j(0.5, 1.0);
  CHECK(conditional_alignment(pert, clean_ok, none, "B", j, cfg) == doctest::Approx(0.85));
  RewardConfig def;
  ScriptedJudge jd(0.5, 1.0);
  auto expected = total_reward(clean_ok, pert, "B", jd, def);
  ScriptedJudge jc(0.5, 1.0);
  RewardContext ctx{none, nullptr};
  CHECK(total_reward(clean_ok, pert, "B", jc, cfg, ctx).total == doctest::Approx(expected.total));

  ScriptedJudge j2(1.0, 1.0);
  CHECK(conditional_alignment(pert, clean_bad, none, "B", j2, cfg) == 0.0);
  CHECK(j2.calls.empty());

  std::vector<StructuredOutput> one = {out("x", "A"), out("the reference", "B")};
  ScriptedJudge j3(1.0, 1.0);
  CHECK(conditional_alignment(pert, clean_bad, one, "B", j3, cfg) == doctest::Approx(1.0));
  CHECK(j3.last.at("reference_answer") == "B");
  auto t = total_reward(clean_bad, pert, "B", j3, cfg, RewardContext{one, nullptr});
  CHECK(t.total == doctest::Approx(3.0));
}

TEST_CASE("bag of words embedding and cosine") {
  BagOfWordsEmbedder e;
  auto v = e.embed("red red ball");
  double norm = 0;
  for (double x : v) norm += x * x;
  CHECK(norm == doctest::Approx(1.0));
  auto z = e.embed("");
  CHECK(std::all_of(z.begin(), z.end(), [](double x) { return x == 0.0; }));
  CHECK(cosine(v, z) == 0.0);
  CHECK(cosine(v, v) == doctest::Approx(1.0));
  CHECK(cosine(e.embed("Red, BALL"), e.embed("red ball")) == doctest::Approx(1.0));
}

TEST_CASE("reasoning segmentation") {
  auto s = segment_reasoning("I observe a red ball. Therefore it is moving. I will answer B.");
  CHECK(s.observation.find("observe") != std::string::npos);
  CHECK(s.observation == "i observe a red ball");
  CHECK(s.reasoning == "therefore it is moving");
  CHECK(s.action == "i will answer b");
  auto thirds = segment_reasoning("one two three four five six");
  CHECK(thirds.observation == "one two");
  CHECK(thirds.reasoning == "three four");
  CHECK(thirds.action == "five six");
  auto tiny = segment_reasoning("ok");
  CHECK(tiny.observation == "ok");
  CHECK(tiny.action == "ok");
}

TEST_CASE("step level reward examples") {
  BagOfWordsEmbedder e;
  RewardConfig cfg;
  std::string trace = "I observe a red ball. Therefore it is moving. I will answer B.";
  CHECK(step_level_reward(trace, trace, e, cfg) == doctest::Approx(1.0));
  CHECK(step_level_reward(trace, "", e, cfg) == 0.0);
  CHECK(step_level_reward("alpha beta gamma delta epsilon zeta", "one two three four five six", e, cfg) == 0.0);
  // Only the action stage shares vocabulary.
  double partial = step_level_reward("aa bb cc dd ee ff", "xx yy zz ww ee ff", e, cfg);
  CHECK(partial == doctest::Approx(cfg.beta_act));
}

TEST_CASE("step level variant replaces the reasoning term") {
  RewardConfig cfg;
  cfg.variant = RewardVariant::kStepLevel;
  ScriptedJudge j(0.0, 1.0);
  auto o = out("I observe a red ball. Therefore it is moving. I will answer B.", "B");
  auto b = total_reward(o, o, "B", j, cfg);
  CHECK(b.align_reason == doctest::Approx(1.0));
  CHECK(b.align_answer == 1.0);
  CHECK(b.total == doctest::Approx(3.0));
  CHECK(std::count(j.calls.begin(), j.calls.end(), JudgeKind::kReasoningConsistency) == 0);

  cfg.variant = RewardVariant::kConditionalPlusStep;
  ScriptedJudge j2(0.0, 1.0);
  std::vector<StructuredOutput> group;
  auto wrong_clean = out("unrelated", "A");
  auto none = total_reward(wrong_clean, o, "B", j2, cfg, RewardContext{group, nullptr});
  CHECK(none.total == doctest::Approx(2.0));
}

TEST_CASE("config validation") {
  RewardConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha_r = -0.1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RewardConfig{};
  cfg.beta_act = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(parse_reward_variant("conditional_plus_step") == RewardVariant::kConditionalPlusStep);
  CHECK_THROWS_AS(parse_reward_variant("bogus"), Error);
}
