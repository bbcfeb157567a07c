#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "rova/commands.hpp"

int main(int argc, char** argv) {
  using namespace rova;

  CLI::App app{"Robust video alignment toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  bool verbose = false;
  app.add_option("-c,--config", config_path, "Run configuration (JSON)");
  app.add_flag("-v,--verbose", verbose, "Debug logging to stderr");

  CorruptOptions corrupt;
  auto* c = app.add_subcommand("corrupt", "Write corrupted variants of a video plus spec sidecars");
  c->add_option("input", corrupt.input, "Clean .rvf file or PNG directory")->required();
  c->add_option("output", corrupt.output, "Output .rvf path")->required();
  c->add_option("-n,--count", corrupt.count, "Number of variants")->default_val(1);

  RegenOptions regen;
  auto* r = app.add_subcommand("regen", "Rebuild a corrupted video from its spec and the clean source");
  r->add_option("spec", regen.spec, "Spec JSON sidecar")->required();
  r->add_option("input", regen.input, "Clean .rvf file or PNG directory")->required();
  r->add_option("output", regen.output, "Output .rvf path")->required();

  std::optional<std::int64_t> steps;
  std::string metrics_path, summary_path;
  auto* t = app.add_subcommand("train-toy", "Train the toy policy end to end");
  t->add_option("--steps", steps, "Override train.steps");
  t->add_option("--metrics", metrics_path, "Override io.metrics");
  t->add_option("--summary", summary_path, "Override io.summary");

  SimOptions sim;
  auto* s = app.add_subcommand("curriculum-sim", "Replay a difficulty event stream through the curriculum");
  s->add_option("stream", sim.stream, "CSV of step,label,confidence")->required();
  s->add_option("-o,--out", sim.out_dir, "Output directory")->default_val("curriculum-sim");

  CostOptions cost;
  std::optional<double> rho, c_judge, c_api, group_total, batch;
  auto* k = app.add_subcommand("cost", "Training-cost model");
  k->add_flag("--json", cost.json, "Emit JSON");
  k->add_flag("--check-reference,--check-paper", cost.check_reference, "Assert the reference values");
  k->add_option("--sweep", cost.sweep, "Sweep rho as from:to:step");
  k->add_option("--rho", rho, "Training ratio");
  k->add_option("--c-judge", c_judge, "Judge cost in forward passes");
  k->add_option("--c-api", c_api, "Alignment API cost in forward passes");
  k->add_option("--group-total", group_total, "Total group size");
  k->add_option("--batch-size", batch, "Batch size N");

  auto* p = app.add_subcommand("judge-ping", "Send one request to the configured judge");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  spdlog::set_default_logger(spdlog::stderr_color_st("rova"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  RunConfig cfg;
  try {
    cfg = load_config(config_path, rova_environment());
    if (steps) cfg.train.steps = *steps;
    if (!metrics_path.empty()) cfg.io.metrics = metrics_path;
    if (!summary_path.empty()) cfg.io.summary = summary_path;
    if (rho) cfg.cost.rho = *rho;
    if (c_judge) cfg.cost.c_judge = *c_judge;
    if (c_api) cfg.cost.c_api = *c_api;
    if (group_total) cfg.cost.group_total = *group_total;
    if (batch) cfg.cost.batch_size = *batch;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (*c) return cmd_corrupt(cfg, corrupt, std::cout, std::cerr);
  if (*r) return cmd_regen(regen, std::cout, std::cerr);
  if (*t) return cmd_train_toy(cfg, std::cout, std::cerr);
  if (*s) return cmd_curriculum_sim(cfg, sim, std::cout, std::cerr);
  if (*k) return cmd_cost(cfg, cost, std::cout, std::cerr);
  if (*p) return cmd_judge_ping(cfg, std::cout, std::cerr);
  return kExitUsage;
}
