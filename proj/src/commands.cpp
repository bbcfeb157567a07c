#include "rova/commands.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "rova/metrics.hpp"
#include "rova/text.hpp"

namespace rova {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kValidation ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

FrameSequence load_video(const fs::path& p) {
  return fs::is_directory(p) ? read_png_directory(p) : read_sequence(p);
}

bool require_file(const fs::path& p, std::ostream& err) {
  std::error_code ec;
  if (fs::exists(p, ec)) return true;
  err << "error: input not found: " << p.string() << '\n';
  return false;
}

json read_json_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::kIo, "cannot read " + path.string());
  auto j = json::parse(is, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::kFormat, "not valid JSON: " + path.string());
  return j;
}

fs::path variant_path(const fs::path& out, int i, int count) {
  if (count == 1) return out;
  auto name = out.stem().string() + "_" + std::to_string(i) + out.extension().string();
  return out.parent_path() / name;
}

fs::path sidecar_path(const fs::path& p) { return fs::path(p.string() + ".spec.json"); }

}  // namespace

std::string content_hash(const FrameSequence& seq) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) fail(ErrorKind::kIo, "cannot allocate digest context");
  auto s = seq.shape();
  std::string header = std::to_string(s.t) + "x" + std::to_string(s.h) + "x" + std::to_string(s.w) + "x3:";
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
            EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
            EVP_DigestUpdate(ctx, seq.bytes().data(), seq.bytes().size()) == 1 &&
            EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) fail(ErrorKind::kIo, "SHA-256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

// --- corrupt / regen -----------------------------------------------------------

int cmd_corrupt(const RunConfig& cfg, const CorruptOptions& opt, std::ostream& out, std::ostream& err) {
  if (!require_file(opt.input, err)) return kExitUsage;
  if (opt.count < 1) {
    err << "error: --count must be >= 1\n";
    return kExitUsage;
  }
  return guarded(err, [&] {
    auto seq = load_video(opt.input);
    auto video_id = content_hash(seq);
    StyleSampler sampler(cfg.corruption.family_weights);
    CorruptionProtocol protocol(cfg.corruption.protocol, cfg.corruption.seed);
    CounterRng style_rng = cfg.corruption.protocol == ProtocolMode::kStatic
                               ? CounterRng(derive_key(fnv1a(video_id), {cfg.corruption.seed, fnv1a("style")}))
                               : CounterRng(cfg.corruption.seed).split("style");
    for (int i = 0; i < opt.count; ++i) {
      auto style = sampler.sample(style_rng);
      auto seed = protocol.seed_for(video_id, style, static_cast<std::uint64_t>(i));
      auto spec = sample_spec(style, seq.shape(), cfg.corruption.intensity, seed, cfg.corruption.shuffle);
      spec.blend = cfg.corruption.blend;
      auto corrupted = apply_corruption(seq, spec);
      auto path = variant_path(opt.output, i, opt.count);
      write_sequence(corrupted, path);
      write_json_file(sidecar_path(path), to_json(spec));
      out << path.string() << '\t' << style.name() << '\t' << seed << '\n';
    }
    return int(kExitOk);
  });
}

int cmd_regen(const RegenOptions& opt, std::ostream& out, std::ostream& err) {
  if (!require_file(opt.spec, err) || !require_file(opt.input, err)) return kExitUsage;
  return guarded(err, [&] {
    auto spec = spec_from_json(read_json_file(opt.spec));
    auto clean = load_video(opt.input);
    write_sequence(regenerate(spec, clean), opt.output);
    out << opt.output.string() << '\n';
    return int(kExitOk);
  });
}

std::unique_ptr<Judge> make_judge(const RunConfig& cfg) {
  if (cfg.judge.kind == "remote") return std::make_unique<RemoteJudge>(cfg.judge.endpoint);
  return std::make_unique<StubJudge>();
}

// --- train-toy ------------------------------------------------------------------

namespace {

struct Trainer {
  const RunConfig& cfg;
  ToyTask task;
  ToyPolicy policy;
  ReferencePolicy reference;
  std::unique_ptr<Judge> judge;
  Curriculum curriculum;
  CounterRng root;
  std::vector<ToySample> eval_set;
  std::deque<ToySample> promoted;
  std::size_t max_buffer = 0;
  std::int64_t counter_evictions = 0;
  std::int64_t high_conf_easy_trained = 0;

  explicit Trainer(const RunConfig& c)
      : cfg(c),
        task(c.toy),
        policy(task.observation_dim(), ToyTask::kActions, c.train.temperature),
        reference(policy),
        judge(make_judge(c)),
        curriculum(c.curriculum),
        root(derive_key(c.train.seed, {fnv1a("train-toy")})) {
    for (int i = 0; i < c.train.eval_samples; ++i)
      eval_set.push_back(task.sample((std::uint64_t{1} << 40) + static_cast<std::uint64_t>(i)));
  }

  DifficultyVerdict assess_group(const RolloutGroup& g, const ToySample& s) {
    std::vector<StructuredOutput> clean, pert;
    for (const auto& r : g.rollouts) {
      clean.push_back(r.clean);
      pert.push_back(r.pert);
    }
    AssessmentInputs in{clean, pert, s.truth, s.question, std::nullopt, {}};
    if (cfg.curriculum.mode != AssessMode::kComparison) {
      in.mask_coverage = generate_mask(s.spec).coverage();
      if (cfg.judge.kind == "remote") in.images = subsample_frames_png(s.perturbed);
    }
    return assess(in, judge.get(), cfg.curriculum);
  }

  ToySample restore(const MemoryEntry& e) const {
    auto s = task.from_query_id(e.query_id);
    s.perturbed = regenerate(e.spec, s.clean);
    s.spec = e.spec;
    return s;
  }

  StepMetrics step(std::int64_t t, std::uint64_t& next_index) {
    CounterRng rng = root.split({fnv1a("step"), static_cast<std::uint64_t>(t)});
    std::vector<RolloutGroup> train_groups;

    std::size_t slot = 0;
    while (!promoted.empty()) {
      auto s = std::move(promoted.front());
      promoted.pop_front();
      train_groups.push_back(sample_group(policy, task, s, cfg.grpo, rng.split({fnv1a("group"), slot++})));
    }
    for (int b = 0; b < cfg.train.batch_size; ++b) {
      auto s = task.sample(next_index++);
      auto g = sample_group(policy, task, s, cfg.grpo, rng.split({fnv1a("group"), slot++}));
      auto v = assess_group(g, s);
      auto d = curriculum.admit(v, s.query_id, s.spec, t);
      max_buffer = std::max(max_buffer, curriculum.buffer().size());
      if (d == Decision::kTrain) {
        if (v.label == DifficultyLabel::kEasy && v.confidence > cfg.curriculum.tau) ++high_conf_easy_trained;
        train_groups.push_back(std::move(g));
      }
    }

    auto m = train_on_groups(policy, reference, train_groups, *judge, cfg.reward, cfg.grpo);
    m.step = t;

    auto outcome = curriculum.maintain(t, [&](const MemoryEntry& e) {
      auto s = restore(e);
      auto g = sample_group(policy, task, s, cfg.grpo,
                            rng.split({fnv1a("reeval"), fnv1a(e.query_id), static_cast<std::uint64_t>(e.counter)}));
      return assess_group(g, s);
    });
    if (outcome) {
      for (const auto& e : outcome->promoted) promoted.push_back(restore(e));
      for (const auto& ev : outcome->evicted) counter_evictions += ev.reason == EvictReason::kCounter;
    }
    return m;
  }
};

json eval_json(const ToyPolicy& policy, std::span<const ToySample> eval) {
  json j;
  j["accuracy_pert_expected"] = expected_accuracy(policy, eval, true);
  j["accuracy_pert_greedy"] = greedy_accuracy(policy, eval, true);
  j["accuracy_clean_expected"] = expected_accuracy(policy, eval, false);
  j["accuracy_clean_greedy"] = greedy_accuracy(policy, eval, false);
  return json(j);
}

}  // namespace

int cmd_train_toy(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    Trainer tr(cfg);
    MetricsWriter metrics(cfg.io.metrics, cfg.io.record_wall_time);

    std::uint64_t next_index = 0;
    std::int64_t completed = 0;
    std::optional<std::string> failure;
    std::optional<ErrorKind> failure_kind;
    std::optional<std::int64_t> first_step_at_target;
    try {
      for (std::int64_t t = 1; t <= cfg.train.steps; ++t) {
        auto m = tr.step(t, next_index);
        auto st = tr.curriculum.stats().close();
        std::vector<std::pair<std::string, double>> values = {
            {"mean_reward", m.mean_reward},     {"mean_advantage_abs", m.mean_advantage_abs},
            {"kl", m.kl},                       {"objective", m.objective},
            {"accuracy_clean", m.accuracy_clean}, {"accuracy_pert", m.accuracy_pert},
            {"alignment_mean", m.alignment_mean}, {"grad_norm", m.grad_norm},
            {"groups", static_cast<double>(m.groups)}};
        metrics.write("train", t, values);
        if (st) {
          std::vector<std::pair<std::string, double>> cv = {
              {"arrived", double(st->counts.arrived)},   {"discarded", double(st->counts.discarded)},
              {"deferred", double(st->counts.deferred)}, {"trained", double(st->counts.trained)},
              {"promoted", double(st->counts.promoted)}, {"evicted", double(st->counts.evicted)},
              {"buffer_size", double(tr.curriculum.buffer().size())}};
          if (st->rho) cv.emplace_back("rho", *st->rho);
          metrics.write("curriculum", t, cv);
        }
        if (t % cfg.train.eval_every == 0 || t == cfg.train.steps) {
          double acc = expected_accuracy(tr.policy, tr.eval_set, true);
          if (!first_step_at_target && acc >= 0.9) first_step_at_target = t;
          metrics.write("eval", t,
                        {{"accuracy_pert_expected", acc},
                         {"accuracy_pert_greedy", greedy_accuracy(tr.policy, tr.eval_set, true)},
                         {"accuracy_clean_expected", expected_accuracy(tr.policy, tr.eval_set, false)}});
        }
        completed = t;
      }
    } catch (const Error& e) {
      failure = e.what();
      failure_kind = e.kind();
    }

    auto totals = tr.curriculum.stats().totals();
    json summary;
    summary["status"] = failure ? "aborted" : "ok";
    if (failure) summary["error"] = *failure;
    summary["steps_completed"] = completed;
    summary["eval"] = eval_json(tr.policy, tr.eval_set);
    summary["first_eval_step_pert_accuracy_0_9"] =
        first_step_at_target ? json(*first_step_at_target) : json(nullptr);
    auto rho_bar = tr.curriculum.stats().rho_bar();
    summary["curriculum"] = {{"rho_bar", rho_bar ? json(*rho_bar) : json(nullptr)},
                             {"arrived", totals.arrived},
                             {"discarded", totals.discarded},
                             {"deferred", totals.deferred},
                             {"trained", totals.trained},
                             {"promoted", totals.promoted},
                             {"evicted", totals.evicted},
                             {"counter_evictions", tr.counter_evictions},
                             {"high_confidence_easy_trained", tr.high_conf_easy_trained},
                             {"buffer_size", tr.curriculum.buffer().size()},
                             {"max_buffer_size", tr.max_buffer}};
    summary["config"] = to_json(cfg);
    write_json_file(cfg.io.summary, json(summary));
    if (!cfg.io.checkpoint.empty()) tr.curriculum.buffer().save(cfg.io.checkpoint);

    if (failure) {
      err << "error: training aborted at step " << completed + 1 << ": " << *failure << '\n';
      return failure_kind == ErrorKind::kValidation ? int(kExitUsage) : int(kExitFailure);
    }
    out << "steps " << completed << "  perturbed accuracy "
        << summary["eval"]["accuracy_pert_expected"].get<double>() << "  rho_bar "
        << (rho_bar ? *rho_bar : 0.0) << "\n";
    return int(kExitOk);
  });
}

// --- curriculum-sim ---------------------------------------------------------------

namespace {

struct SimEvent {
  std::int64_t step;
  DifficultyVerdict verdict;
  std::size_t line;
};

std::vector<SimEvent> parse_stream(const fs::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::kIo, "cannot read " + path.string());
  std::vector<SimEvent> events;
  std::string raw;
  std::size_t n = 0;
  bool seen_data = false;
  while (std::getline(is, raw)) {
    ++n;
    auto line = text::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto where = path.string() + ":" + std::to_string(n) + ": ";
    if (!seen_data && line.rfind("step", 0) == 0) {
      seen_data = true;
      continue;
    }
    seen_data = true;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(text::trim(cell));
    if (f.size() != 3) fail(ErrorKind::kValidation, where + "expected 'step,label,confidence'");
    SimEvent e{};
    e.line = n;
    try {
      std::size_t used = 0;
      e.step = std::stoll(f[0], &used);
      if (used != f[0].size() || e.step < 0) throw std::invalid_argument("step");
      double c = std::stod(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument("confidence");
      e.verdict = DifficultyVerdict(parse_difficulty_label(f[1]), c);
    } catch (const Error& ex) {
      fail(ErrorKind::kValidation, where + ex.what());
    } catch (const std::exception&) {
      fail(ErrorKind::kValidation, where + "malformed step or confidence");
    }
    if (!events.empty() && e.step < events.back().step)
      fail(ErrorKind::kValidation, where + "steps must be non-decreasing");
    events.push_back(e);
  }
  return events;
}

}  // namespace

int cmd_curriculum_sim(const RunConfig& cfg, const SimOptions& opt, std::ostream& out, std::ostream& err) {
  if (!require_file(opt.stream, err)) return kExitUsage;
  return guarded(err, [&] {
    cfg.validate();
    auto events = parse_stream(opt.stream);
    fs::create_directories(opt.out_dir);

    Curriculum cur(cfg.curriculum);
    CounterRng sim_rng(derive_key(cfg.sim.seed, {fnv1a("curriculum-sim")}));
    PerturbationSpec placeholder;
    placeholder.video_shape = {1, 1, 1};

    auto assessor = [&](const MemoryEntry& e) {
      CounterRng r = sim_rng.split({fnv1a(e.query_id), static_cast<std::uint64_t>(e.counter)});
      double u = r.uniform();
      double c = r.uniform();
      if (u < cfg.sim.promote_prob) return DifficultyVerdict(DifficultyLabel::kInformative, c);
      if (u < cfg.sim.promote_prob + cfg.sim.easy_prob) return DifficultyVerdict(DifficultyLabel::kEasy, c);
      return DifficultyVerdict(DifficultyLabel::kDifficult, c);
    };

    std::size_t max_buffer = 0;
    std::int64_t high_conf_easy_trained = 0;
    std::map<std::string, std::int64_t> evicted_by;
    evicted_by["capacity"] = 0;
    evicted_by["easy"] = 0;
    evicted_by["counter"] = 0;
    bool counter_exact = true;
    std::vector<std::pair<StepStats, std::size_t>> rows;  // stats, buffer size

    std::size_t i = 0;
    const std::int64_t first = events.empty() ? 0 : events.front().step;
    const std::int64_t last = events.empty() ? -1 : events.back().step;
    for (std::int64_t t = first; t <= last; ++t) {
      for (; i < events.size() && events[i].step == t; ++i) {
        const auto& e = events[i];
        std::size_t before = cur.buffer().size();
        auto d = cur.admit(e.verdict, "q" + std::to_string(e.line), placeholder, t);
        if (d == Decision::kDefer && before == cur.buffer().size()) ++evicted_by["capacity"];
        if (d == Decision::kTrain && e.verdict.label == DifficultyLabel::kEasy && e.verdict.confidence > cfg.curriculum.tau)
          ++high_conf_easy_trained;
        max_buffer = std::max(max_buffer, cur.buffer().size());
      }
      if (auto outcome = cur.maintain(t, assessor)) {
        for (const auto& ev : outcome->evicted) {
          ++evicted_by[std::string(to_string(ev.reason))];
          if (ev.reason == EvictReason::kCounter && ev.entry.counter != cfg.curriculum.max_counter + 1)
            counter_exact = false;
        }
      }
      if (auto st = cur.stats().close()) rows.emplace_back(*st, cur.buffer().size());
    }

    {
      std::ofstream csv(opt.out_dir / "rho.csv", std::ios::trunc);
      csv << "step,arrived,discarded,deferred,trained,promoted,evicted,buffer_size,rho\n";
      for (const auto& [s, size] : rows) {
        const auto& c = s.counts;
        csv << s.step << ',' << c.arrived << ',' << c.discarded << ',' << c.deferred << ',' << c.trained << ','
            << c.promoted << ',' << c.evicted << ',' << size << ',';
        if (s.rho) csv << *s.rho;
        csv << '\n';
      }
    }
    {
      std::ofstream csv(opt.out_dir / "windows.csv", std::ios::trunc);
      csv << "window_start,window_end,arrived,discard_rate,defer_rate,train_rate,rho_mean\n";
      for (std::int64_t w0 = first; w0 <= last; w0 += cfg.sim.window) {
        std::int64_t w1 = std::min<std::int64_t>(w0 + cfg.sim.window - 1, last);
        StepCounts sum;
        double rho_sum = 0;
        int rho_n = 0;
        for (const auto& [s, size] : rows) {
          if (s.step < w0 || s.step > w1) continue;
          sum.arrived += s.counts.arrived;
          sum.discarded += s.counts.discarded;
          sum.deferred += s.counts.deferred;
          sum.trained += s.counts.trained;
          if (s.rho) {
            rho_sum += *s.rho;
            ++rho_n;
          }
        }
        auto rate = [&](std::int64_t x) { return sum.arrived ? double(x) / double(sum.arrived) : 0.0; };
        csv << w0 << ',' << w1 << ',' << sum.arrived << ',' << rate(sum.discarded) << ',' << rate(sum.deferred)
            << ',' << rate(sum.trained) << ',';
        if (rho_n) csv << rho_sum / rho_n;
        csv << '\n';
      }
    }

    auto totals = cur.stats().totals();
    auto rho_bar = cur.stats().rho_bar();
    json summary;
    summary["events"] = events.size();
    summary["steps"] = rows.size();
    summary["rho_bar"] = rho_bar ? json(*rho_bar) : json(nullptr);
    summary["arrived"] = totals.arrived;
    summary["discarded"] = totals.discarded;
    summary["deferred"] = totals.deferred;
    summary["trained"] = totals.trained;
    summary["promoted"] = totals.promoted;
    summary["evicted"] = totals.evicted;
    summary["evicted_by_reason"] = evicted_by;
    summary["counter_evictions_at_threshold"] = counter_exact;
    summary["high_confidence_easy_trained"] = high_conf_easy_trained;
    summary["buffer_cap"] = cfg.curriculum.buffer_cap;
    summary["max_buffer_size"] = max_buffer;
    summary["final_buffer_size"] = cur.buffer().size();
    write_json_file(opt.out_dir / "summary.json", json(summary));
    if (!cfg.io.checkpoint.empty()) cur.buffer().save(cfg.io.checkpoint);

    out << "events " << events.size() << "  rho_bar ";
    if (rho_bar) out << std::fixed << std::setprecision(4) << *rho_bar;
    else out << "n/a";
    out << "  max_buffer " << max_buffer << "/" << cfg.curriculum.buffer_cap << '\n';
    return int(kExitOk);
  });
}

// --- cost -------------------------------------------------------------------------

namespace {

struct ReferenceCheck {
  std::string name;
  double value;
  double expected;
  double tol;
  bool pass() const { return std::abs(value - expected) <= tol; }
};

std::vector<ReferenceCheck> reference_checks() {
  CostProfile p;  // default constants
  std::vector<ReferenceCheck> checks;
  checks.push_back({"cost_ratio(rho=0.869)", cost_ratio(p).ratio, 0.950, 0.001});
  checks.push_back({"approx_speedup(0.6)", approx_speedup(0.6), 1.111, 0.005});
  checks.push_back({"amortized_reeval(293,0.4,50)", amortized_reeval_cost(p).per_step, 2.344, 0.01});
  CostProfile n16 = p;
  n16.batch_size = 16;
  auto share = amortized_reeval_cost(n16).share;
  checks.push_back({"reeval_share(N=16) < 1%", share, 0.0, 0.01});
  return checks;
}

std::tuple<double, double, double> parse_sweep(const std::string& s) {
  std::stringstream ss(s);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
    fail(ErrorKind::kValidation, "--sweep expects from:to:step, got '" + s + "'");
  try {
    double from = std::stod(a), to = std::stod(b), step = std::stod(c);
    if (!(from >= 0 && to <= 1 && from <= to && step > 0))
      fail(ErrorKind::kValidation, "--sweep range must satisfy 0 <= from <= to <= 1 and step > 0");
    return {from, to, step};
  } catch (const std::invalid_argument&) {
    fail(ErrorKind::kValidation, "--sweep expects numbers, got '" + s + "'");
  }
}

}  // namespace

int cmd_cost(const RunConfig& cfg, const CostOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const CostProfile& p = cfg.cost;
    p.validate();
    auto ratio = cost_ratio(p);
    auto re = amortized_reeval_cost(p);
    std::vector<CostRow> rows;
    if (opt.sweep) {
      auto [from, to, step] = parse_sweep(*opt.sweep);
      rows = sweep_rho(p, from, to, step);
    }
    std::vector<ReferenceCheck> checks;
    if (opt.check_reference) checks = reference_checks();
    bool all_pass = std::all_of(checks.begin(), checks.end(), [](const ReferenceCheck& c) { return c.pass(); });

    if (opt.json) {
      json j;
      j["profile"] = to_json(p);
      j["cost_grpo"] = cost_grpo(p);
      j["cost_naive_per_sample"] = ratio.naive;
      j["cost_rova_per_sample"] = ratio.rova;
      j["cost_ratio"] = ratio.ratio;
      j["savings_margin"] = ratio.margin;
      j["saves"] = ratio.saves;
      j["breakeven_rho"] = ratio.breakeven_rho;
      j["speedup_approx"] = approx_speedup(p.rho);
      j["speedup_per_sample"] = ratio.naive / ratio.rova;
      j["reeval_per_step"] = re.per_step;
      j["reeval_share"] = re.share;
      if (p.seconds_per_fwd > 0) j["rova_seconds_per_sample"] = ratio.rova * p.seconds_per_fwd;
      if (opt.sweep) {
        j["rows"] = json::array();
        for (const auto& r : rows) j["rows"].push_back(to_json(r));
      }
      if (opt.check_reference) {
        j["checks"] = json::array();
        for (const auto& c : checks)
          j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"expected", c.expected},
                                 {"tolerance", c.tol}, {"pass", c.pass()}});
      }
      out << j.dump(2) << '\n';
    } else {
      out << "profile  N=" << p.batch_size << " G_total=" << p.group_total << " c_bwd=" << p.c_bwd_factor
          << " c_judge=" << p.c_judge << " c_api=" << p.c_api << " rho=" << p.rho << '\n' << std::fixed;
      auto line = [&](const std::string& label, double v, int prec = 4) {
        out << "  " << std::left << std::setw(34) << label << std::right << std::setprecision(prec) << v << '\n';
      };
      line("cost_grpo (N G_total (1+c_bwd))", cost_grpo(p));
      line("naive per sample", ratio.naive);
      line("rova per sample", ratio.rova);
      line("ratio rova/naive", ratio.ratio);
      line("savings margin", ratio.margin);
      line("break-even rho", ratio.breakeven_rho);
      line("speedup, approx 4/(2.4+2rho)", approx_speedup(p.rho));
      line("speedup, per-sample naive/rova", ratio.naive / ratio.rova);
      line("re-eval cost per step", re.per_step);
      line("re-eval share of N*rova", re.share);
      if (opt.sweep) {
        out << "\n  rho      ratio     margin    saves  speedup_approx  speedup_per_sample\n";
        for (const auto& r : rows) {
          out << "  " << std::setprecision(3) << r.rho << "  " << std::setprecision(4) << std::setw(8) << r.ratio.ratio
              << "  " << std::setw(8) << r.ratio.margin << "  " << (r.ratio.saves ? "yes  " : "no   ") << "  "
              << std::setw(14) << r.approx_speedup << "  " << std::setw(18) << r.per_sample_speedup << '\n';
        }
      }
      for (const auto& c : checks) {
        out << (c.pass() ? "[PASS] " : "[FAIL] ") << c.name << " = " << std::setprecision(4) << c.value
            << " (expected " << c.expected << " +/- " << c.tol << ")\n";
      }
    }
    return all_pass ? int(kExitOk) : int(kExitFailure);
  });
}

int cmd_judge_ping(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto judge = make_judge(cfg);
    JudgeInputs in;
    in.fields = {{"reference_answer", "New York City"}, {"candidate_answer", "NYC"}};
    try {
      auto v = judge->evaluate(JudgeKind::kAnswerConsistency, in);
      out << "judge " << cfg.judge.kind << " ok: score " << v.score() << "  raw " << v.raw() << '\n';
      return int(kExitOk);
    } catch (const JudgeError& e) {
      err << "error: " << e.what() << '\n';
      if (!e.raw().empty()) err << "raw response: " << e.raw() << '\n';
      return int(kExitFailure);
    }
  });
}

}  // namespace rova
