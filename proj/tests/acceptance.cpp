// Acceptance runner: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "rova/commands.hpp"
#include "rova/metrics.hpp"
#include "support.hpp"

using namespace rova;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

// --- oracles -----------------------------------------------------------------

double oracle_surrogate(const std::vector<double>& r, const std::vector<double>& a, double eps, double beta,
                        double kl) {
  double s = 0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    double clipped = r[j] < 1 - eps ? 1 - eps : (r[j] > 1 + eps ? 1 + eps : r[j]);
    double unclipped_term = r[j] * a[j];
    double clipped_term = clipped * a[j];
    s += unclipped_term < clipped_term ? unclipped_term : clipped_term;
  }
  return s / static_cast<double>(r.size()) - beta * kl;
}

double oracle_kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0) s += p[i] * std::log(p[i] / q[i]);
  return s;
}

std::vector<double> random_categorical(CounterRng& rng, std::size_t n) {
  std::vector<double> p(n);
  double sum = 0;
  for (auto& x : p) sum += (x = rng.uniform(1e-3, 1.0));
  for (auto& x : p) x /= sum;
  return p;
}

// Digest of 100 random (spec, video) regenerations; printed by the child process.
std::string regen_digest() {
  CounterRng rng(20260);
  std::string all;
  for (int i = 0; i < 100; ++i) {
    Shape3 s{1 + static_cast<int>(rng.below(8)), 8 + static_cast<int>(rng.below(40)),
             8 + static_cast<int>(rng.below(40))};
    auto clean = testing::random_video(s.t, s.h, s.w, rng);
    auto sub = kAllSubtypes[rng.below(kAllSubtypes.size())];
    auto spec = sample_spec(PerturbationStyle(sub), s, rng.uniform(0.05, 1.0), rng.next_u64(), rng.bernoulli(0.5));
    auto round = spec_from_json(json::parse(to_json(spec).dump()));
    all += content_hash(regenerate(round, clean));
  }
  return all;
}

std::string run_child(const char* self) {
  std::string cmd = std::string(self) + " --regen-digest";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return "";
  std::string out;
  char buf[4096];
  while (auto n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  if (::pclose(pipe) != 0) return "";
  return out;
}

// --- criteria ----------------------------------------------------------------

Outcome c1_cost_ratio() {
  Outcome o;
  auto t0 = Clock::now();
  CostProfile p;
  p.group_total = 12;
  p.c_judge = 0.4;
  p.c_api = 0.9;
  p.rho = 0.869;
  auto r = cost_ratio(p);
  double oracle = (2 * 12 + 0.4 + 2 * 0.869 * 0.9 + 1.5 * 0.869 * 12) / (2 * 12 + 2 * 0.9 + 1.5 * 12);
  double dt = seconds_since(t0);
  o.require(std::abs(r.ratio - 0.950) <= 0.001, "ratio " + fmt(r.ratio));
  o.require(std::abs(r.ratio - oracle) < 1e-12, "ratio disagrees with oracle");
  o.require(dt < 1.0, "runtime " + fmt(dt) + " s");
  o.detail = o.pass ? "ratio=" + fmt(r.ratio, 5) + " in " + fmt(dt * 1e3, 3) + " ms" : o.detail;
  return o;
}

Outcome c2_speedup() {
  Outcome o;
  double s = approx_speedup(0.6);
  CostProfile p;
  auto a = amortized_reeval_cost(p);
  p.batch_size = 16;
  auto a16 = amortized_reeval_cost(p);
  o.require(std::abs(s - 1.111) <= 0.005, "speedup " + fmt(s));
  o.require(std::abs(a.per_step - 2.344) <= 0.01, "amortized " + fmt(a.per_step));
  o.require(a16.share < 0.01, "share " + fmt(a16.share));
  o.require(std::abs(a16.share - 293 * 0.4 / 50 / (16 * cost_rova_per_sample(p))) < 1e-15, "share oracle");
  if (o.pass)
    o.detail = "speedup(0.6)=" + fmt(s, 4) + " amortized=" + fmt(a.per_step, 4) + " share(N=16)=" + fmt(a16.share * 100, 3) + "%";
  return o;
}

Outcome c3_proposition() {
  Outcome o;
  CounterRng rng(3);
  int checked = 0, mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    CostProfile p;
    p.rho = rng.uniform();
    p.c_judge = rng.uniform(0.0, 5.0);
    p.c_api = rng.uniform(0.0, 3.0);
    p.group_total = 1 + static_cast<double>(rng.below(64));
    auto r = cost_ratio(p);
    double margin = (1 - p.rho) * (2 * p.c_api + 1.5 * p.group_total) - p.c_judge;
    if (std::abs(margin - r.margin) > 1e-12) ++mismatches;
    if (std::abs(margin) <= 1e-12) continue;
    ++checked;
    if ((r.ratio < 1.0) != (margin > 0)) ++mismatches;
  }
  double threshold = cost_ratio(CostProfile{}).breakeven_rho;
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  o.require(std::abs(threshold - 0.9798) <= 1e-4, "threshold " + fmt(threshold));
  if (o.pass) o.detail = std::to_string(checked) + " profiles agree; threshold=" + fmt(threshold, 6);
  return o;
}

Outcome c4_advantages() {
  Outcome o;
  CounterRng rng(4);
  double worst_mean = 0, worst_std = 0;
  bool invariant = true, constant_ok = true;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> r(2 + rng.below(15));
    for (auto& x : r) x = rng.uniform(-3, 3);
    auto a = normalize_advantages(r, 1e-6);
    double m = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    double v = 0;
    for (double x : a) v += (x - m) * (x - m);
    worst_mean = std::max(worst_mean, std::abs(m));
    worst_std = std::max(worst_std, std::abs(std::sqrt(v / static_cast<double>(a.size())) - 1.0));

    // Shift by a power of two and scale by a power of two so both are exact in binary.
    auto shifted = r, scaled = r;
    for (auto& x : shifted) x += 8.0;
    for (auto& x : scaled) x *= 4.0;
    auto as = normalize_advantages(scaled, 1e-6);
    if (as != a) invariant = false;
    auto ash = normalize_advantages(shifted, 1e-6);
    for (std::size_t k = 0; k < a.size(); ++k)
      if (std::abs(ash[k] - a[k]) > 1e-12) invariant = false;

    std::vector<double> c(r.size(), r[0]);
    for (double x : normalize_advantages(c, 1e-6))
      if (x != 0.0) constant_ok = false;
  }
  o.require(worst_mean < 1e-9, "mean error " + fmt(worst_mean));
  o.require(worst_std < 1e-9, "std error " + fmt(worst_std));
  o.require(invariant, "shift/scale invariance");
  o.require(constant_ok, "constant groups");
  if (o.pass) o.detail = "max |mean|=" + fmt(worst_mean, 3) + " max |std-1|=" + fmt(worst_std, 3);
  return o;
}

Outcome c5_surrogate() {
  Outcome o;
  CounterRng rng(5);
  double worst = 0, worst_identity = 0;
  for (int i = 0; i < 1000; ++i) {
    auto g = 2 + rng.below(15);
    std::vector<double> r(g), rewards(g);
    for (auto& x : r) x = std::exp(rng.uniform(-1.0, 1.0));
    for (auto& x : rewards) x = rng.uniform(0, 3);
    auto a = normalize_advantages(rewards, 1e-6);
    double eps = rng.uniform(0.05, 0.5), beta = rng.uniform(0, 0.1), kl = rng.uniform(0, 1);
    worst = std::max(worst, std::abs(surrogate_objective(r, a, eps, beta, kl) - oracle_surrogate(r, a, eps, beta, kl)));
    // Normalized advantages sum to zero only up to rounding, hence the 1e-12 slack.
    std::vector<double> ones(g, 1.0);
    double v = surrogate_objective(ones, a, eps, beta, kl);
    worst_identity = std::max(worst_identity, std::abs(v - (-beta * kl)));
  }
  o.require(worst <= 1e-12, "oracle error " + fmt(worst));
  o.require(worst_identity <= 1e-12, "identity-ratio error " + fmt(worst_identity));
  if (o.pass) o.detail = "max oracle error=" + fmt(worst, 3) + " identity-ratio error=" + fmt(worst_identity, 3);
  return o;
}

Outcome c6_gradient() {
  Outcome o;
  ToyTask task(ToyTaskConfig{});
  GrpoConfig cfg;
  cfg.kl_beta = 0.05;
  StubJudge stub;
  double worst = 0;
  const double h = 1e-5;
  for (std::uint64_t state = 0; state < 20; ++state) {
    CounterRng rng(derive_key(6, {state}));
    ToyPolicy sampler(task.observation_dim(), ToyTask::kActions);
    for (auto& w : sampler.weights()) w = rng.uniform(-0.4, 0.4);
    std::vector<RolloutGroup> groups;
    for (int g = 0; g < 6; ++g) {
      auto s = task.sample(rng.below(1u << 20));
      groups.push_back(sample_group(sampler, task, s, cfg, rng.split({static_cast<std::uint64_t>(g)})));
      score_group(groups.back(), stub, RewardConfig{}, cfg);
    }
    auto policy = sampler;
    for (auto& w : policy.weights()) w += rng.uniform(-0.02, 0.02);
    ToyPolicy ref(task.observation_dim(), ToyTask::kActions);
    for (auto& w : ref.weights()) w = rng.uniform(-0.4, 0.4);

    auto grad = objective_gradient(policy, ref, groups, cfg);
    auto coords = random_permutation(static_cast<int>(grad.size()), rng);
    for (int k = 0; k < 50; ++k) {
      auto i = static_cast<std::size_t>(coords[static_cast<std::size_t>(k)]);
      auto plus = policy, minus = policy;
      plus.weights()[i] += h;
      minus.weights()[i] -= h;
      double fd = (evaluate_objective(plus, ref, groups, cfg).objective -
                   evaluate_objective(minus, ref, groups, cfg).objective) /
                  (2 * h);
      worst = std::max(worst, std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-4}));
    }
  }
  o.require(worst < 1e-4, "max relative error " + fmt(worst));
  if (o.pass) o.detail = "max relative error=" + fmt(worst, 3) + " over 20 states x 50 coords";
  return o;
}

Outcome c7_convergence() {
  Outcome o;
  testing::TempDir dir;
  RunConfig cfg;
  cfg.train.steps = 2000;
  cfg.io.metrics = (dir / "metrics.jsonl").string();
  cfg.io.summary = (dir / "summary.json").string();
  std::ostringstream out, err;
  auto t0 = Clock::now();
  int code = cmd_train_toy(cfg, out, err);
  double dt = seconds_since(t0);
  o.require(code == 0, "train-toy exit " + std::to_string(code) + ": " + err.str());
  double acc = 0;
  if (code == 0) {
    std::ifstream is(cfg.io.summary);
    auto summary = json::parse(is);
    acc = summary["eval"]["accuracy_pert_expected"].get<double>();
  }
  o.require(acc >= 0.9, "perturbed accuracy " + fmt(acc));
  o.require(dt <= 60.0, "runtime " + fmt(dt) + " s");

  // Clean-anchor invariance.
  ToyTask task(ToyTaskConfig{});
  GrpoConfig g;
  StubJudge stub;
  CounterRng rng(7);
  ToyPolicy policy(task.observation_dim(), ToyTask::kActions);
  for (auto& w : policy.weights()) w = rng.uniform(-0.5, 0.5);
  std::vector<RolloutGroup> groups;
  for (int k = 0; k < 8; ++k) {
    groups.push_back(sample_group(policy, task, task.sample(static_cast<std::uint64_t>(k)), g,
                                  rng.split({static_cast<std::uint64_t>(k)})));
    score_group(groups.back(), stub, RewardConfig{}, g);
  }
  auto base = objective_gradient(policy, policy, groups, g);
  bool invariant = true;
  for (int trial = 0; trial < 50; ++trial) {
    auto noisy = groups;
    for (auto& grp : noisy)
      for (auto& r : grp.rollouts) {
        r.clean_logp = rng.uniform(-40, 0);
        r.clean_logp_old = rng.uniform(-40, 0);
      }
    if (objective_gradient(policy, policy, noisy, g) != base) invariant = false;
  }
  o.require(invariant, "clean log-probs changed the gradient");
  if (o.pass) o.detail = "perturbed accuracy=" + fmt(acc, 4) + " after 2000 steps in " + fmt(dt, 3) + " s; anchor invariant";
  return o;
}

Outcome c8_corruption(const char* self) {
  Outcome o;
  auto a = run_child(self);
  auto b = run_child(self);
  o.require(!a.empty() && a == b, "cross-process digests differ");
  o.require(a == regen_digest() + "\n", "in-process digest differs");

  CounterRng rng(8);
  auto seq = testing::random_video(16, 4, 4, rng);
  auto checksums = [](const FrameSequence& s) {
    std::vector<std::string> v;
    for (int t = 0; t < s.frames(); ++t) {
      auto f = s.frame(t);
      v.emplace_back(f.begin(), f.end());
    }
    std::sort(v.begin(), v.end());
    return v;
  };
  auto ref = checksums(seq);
  bool multiset = true;
  for (int i = 0; i < 1000; ++i)
    if (checksums(temporal_shuffle(seq, random_permutation(16, rng))) != ref) multiset = false;
  o.require(multiset, "shuffle changed the frame multiset");

  bool never_amplifies = true;
  for (int i = 0; i < 200; ++i) {
    Shape3 s{1 + static_cast<int>(rng.below(4)), 8 + static_cast<int>(rng.below(24)), 8 + static_cast<int>(rng.below(24))};
    auto v = testing::random_video(s.t, s.h, s.w, rng);
    auto spec = sample_spec(PerturbationStyle(kAllSubtypes[rng.below(kAllSubtypes.size())]), s,
                            rng.uniform(0.05, 1.0), rng.next_u64(), false);
    auto outv = apply_corruption(v, spec);
    for (std::size_t k = 0; k < v.bytes().size(); ++k)
      if (outv.bytes()[k] > v.bytes()[k]) never_amplifies = false;
  }
  o.require(never_amplifies, "attenuate amplified a pixel");
  if (o.pass) o.detail = "100 regenerations identical across 2 processes; 1000 shuffles; 200 attenuations";
  return o;
}

Outcome c9_curriculum() {
  Outcome o;
  testing::TempDir dir;
  {
    std::ofstream os(dir / "stream.csv");
    os << "step,label,confidence\n";
    for (int step = 1; step <= 100; ++step) {
      for (int i = 0; i < 61; ++i) os << step << ",easy,0.95\n";
      for (int i = 0; i < 70; ++i) os << step << ",difficult,0.5\n";
      for (int i = 0; i < 869; ++i) os << step << ",informative,0.6\n";
    }
  }
  RunConfig cfg;
  cfg.sim.promote_prob = 0.2;
  cfg.sim.easy_prob = 0.1;
  std::ostringstream out, err;
  int code = cmd_curriculum_sim(cfg, {dir / "stream.csv", dir / "sim"}, out, err);
  o.require(code == 0, "curriculum-sim exit " + std::to_string(code) + ": " + err.str());
  double rho_bar = 0;
  if (code == 0) {
    std::ifstream is(dir / "sim" / "summary.json");
    auto s = json::parse(is);
    rho_bar = s["rho_bar"].get<double>();
    o.require(std::abs(rho_bar - 0.869) <= 0.005, "rho_bar " + fmt(rho_bar));
    o.require(s["max_buffer_size"].get<int>() <= cfg.curriculum.buffer_cap, "buffer exceeded cap");
    o.require(s["counter_evictions_at_threshold"].get<bool>(), "counter eviction off threshold");
    o.require(s["evicted_by_reason"]["counter"].get<int>() > 0, "no counter evictions observed");
  }

  // Counter eviction exactness and confidence fuzzing on the buffer directly.
  CurriculumConfig cc;
  cc.buffer_cap = 64;
  PerturbationSpec spec;
  spec.video_shape = {1, 1, 1};
  CounterRng rng(9);
  bool fuzz_ok = true, exact = true;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> labels(40);
    for (auto& l : labels) l = static_cast<int>(rng.below(3));
    std::vector<std::string> first;
    for (int variant = 0; variant < 2; ++variant) {
      CounterRng conf(rng.next_u64());
      MemoryBuffer buf(64);
      for (int i = 0; i < 40; ++i) buf.defer(MemoryEntry{std::to_string(i), spec, 0, 0});
      std::vector<std::string> trace;
      for (int round = 0; round < 6; ++round) {
        auto outcome = buf.reevaluate(
            [&](const MemoryEntry& e) {
              auto idx = static_cast<std::size_t>(std::stoi(e.query_id));
              auto label = static_cast<DifficultyLabel>(labels[(idx * 7 + static_cast<std::size_t>(e.counter)) % 40]);
              return DifficultyVerdict(label, conf.uniform());
            },
            cc);
        for (auto& p : outcome.promoted) trace.push_back("P" + p.query_id);
        for (auto& ev : outcome.evicted) {
          trace.push_back("E" + ev.entry.query_id + std::string(to_string(ev.reason)));
          if (ev.reason == EvictReason::kCounter && ev.entry.counter != cc.max_counter + 1) exact = false;
        }
      }
      for (auto& e : buf.entries()) trace.push_back("R" + e.query_id + ":" + std::to_string(e.counter));
      if (variant == 0)
        first = trace;
      else if (trace != first)
        fuzz_ok = false;
    }
  }
  o.require(fuzz_ok, "confidence changed retention");
  o.require(exact, "counter eviction not at max_counter+1");
  if (o.pass) o.detail = "rho_bar=" + fmt(rho_bar, 5) + "; cap respected; evictions at k=4; fuzzing stable";
  return o;
}

Outcome c10_reward() {
  Outcome o;
  RewardConfig cfg;
  StubJudge stub;
  CounterRng rng(10);
  std::vector<std::string> raws = {"<think>a b c</think><answer>B</answer>", "<think>a</think><answer>A</answer>",
                                   "<answer>B</answer>", "", "<think>x y</think> <answer>b.</answer>",
                                   "<think></think><answer></answer>"};
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 5000; ++i) {
    auto c = extract_output(raws[rng.below(raws.size())]);
    auto p = extract_output(raws[rng.below(raws.size())]);
    double t = total_reward(c, p, rng.bernoulli(0.5) ? "B" : "A", stub, cfg).total;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  o.require(lo >= 0.0 && hi <= 3.0, "total outside [0,3]: " + fmt(lo) + ".." + fmt(hi));

  // Tag-ordering oracle: 20 constructed strings.
  const std::string T = "<think>", t = "</think>", A = "<answer>", a = "</answer>";
  struct Case {
    std::string s;
    bool ok;
  };
  std::vector<Case> cases = {
      {T + "x" + t + A + "y" + a, true},         {" " + T + "x" + t + "\n" + A + "y" + a + " ", true},
      {A + "y" + a + T + "x" + t, false},        {T + "x" + A + "y" + t + a, false},
      {T + "x" + t, false},                      {A + "y" + a, false},
      {"", false},                               {T + t + A + a, true},
      {"z" + T + "x" + t + A + "y" + a, false},  {T + "x" + t + "z" + A + "y" + a, false},
      {T + "x" + t + A + "y" + a + "z", false},  {T + T + "x" + t + A + "y" + a, false},
      {T + "x" + t + t + A + "y" + a, false},    {T + "x" + t + A + "y" + a + a, false},
      {T + "x" + t + A + A + "y" + a, false},    {t + "x" + T + A + "y" + a, false},
      {T + "x" + t + a + "y" + A, false},        {T + "a\nb" + t + "\t" + A + "c" + a, true},
      {T + "x" + t + A + "y" + a + T + t, false}, {"<THINK>x</THINK><answer>y</answer>", false}};
  int agree = 0;
  for (const auto& c : cases) agree += extract_output(c.s).format_ok == c.ok;
  o.require(agree == 20, std::to_string(agree) + "/20 tag cases");

  // Conditional reduces to default when the clean answer is correct.
  auto clean = extract_output("<think>the ball is red</think><answer>B</answer>");
  auto pert = extract_output("<think>the ball is blue</think><answer>B</answer>");
  std::vector<StructuredOutput> group = {extract_output("<think>q</think><answer>A</answer>")};
  RewardConfig cond = cfg;
  cond.variant = RewardVariant::kConditional;
  double d = total_reward(clean, pert, "B", stub, cfg).total;
  double c = total_reward(clean, pert, "B", stub, cond, RewardContext{group, nullptr}).total;
  o.require(d == c, "conditional differs from default");

  BagOfWordsEmbedder emb;
  std::string trace = "I observe two cars. Because the light is red they stop. I will answer B.";
  double step = step_level_reward(trace, trace, emb, cfg);
  o.require(std::abs(step - 1.0) < 1e-12, "step-level identical traces " + fmt(step));
  if (o.pass) o.detail = "total in [" + fmt(lo) + "," + fmt(hi) + "]; 20/20 tag cases; variants ok";
  return o;
}

Outcome c11_pinsker() {
  Outcome o;
  CounterRng rng(11);
  double slack = 1e9;
  for (int i = 0; i < 1000; ++i) {
    auto n = 2 + rng.below(8);
    auto p = random_categorical(rng, n);
    auto q = random_categorical(rng, n);
    double kl = kl_categorical(p, q);
    double tv = total_variation(p, q);
    double tv_oracle = 0;
    for (std::size_t k = 0; k < n; ++k) tv_oracle += std::abs(p[k] - q[k]);
    tv_oracle /= 2;
    o.require(std::abs(kl - oracle_kl(p, q)) < 1e-12, "kl oracle");
    o.require(std::abs(tv - tv_oracle) < 1e-12, "tv oracle");
    slack = std::min(slack, std::sqrt(kl / 2) - tv);
  }
  o.require(slack >= 0, "Pinsker violated by " + fmt(-slack));
  if (o.pass) o.detail = "min slack=" + fmt(slack, 3) + " over 1000 pairs";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::strcmp(argv[1], "--regen-digest") == 0) {
    std::cout << regen_digest() << '\n';
    return 0;
  }
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"cost ratio reproduction", c1_cost_ratio},
      {"speedup and amortized re-evaluation", c2_speedup},
      {"savings margin equivalence", c3_proposition},
      {"advantage normalization", c4_advantages},
      {"clipped surrogate oracle", c5_surrogate},
      {"analytic gradient vs finite differences", c6_gradient},
      {"toy convergence and clean anchor", c7_convergence},
      {"corruption determinism", [&] { return c8_corruption(argv[0]); }},
      {"curriculum state machine", c9_curriculum},
      {"reward suite", c10_reward},
      {"Pinsker bound", c11_pinsker},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << i + 1 << ". " << criteria[i].first << " - " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
