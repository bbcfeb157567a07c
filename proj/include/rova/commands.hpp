#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rova/config.hpp"

namespace rova {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Hex SHA-256 of the sequence shape and payload.
std::string content_hash(const FrameSequence& seq);

struct CorruptOptions {
  std::filesystem::path input;
  std::filesystem::path output;
  int count = 1;
};

/// Writes `count` corrupted variants and a `<output>.spec.json` sidecar per
/// variant. With count > 1 outputs are named `<stem>_<i><ext>`.
int cmd_corrupt(const RunConfig& cfg, const CorruptOptions& opt, std::ostream& out, std::ostream& err);

struct RegenOptions {
  std::filesystem::path spec;
  std::filesystem::path input;
  std::filesystem::path output;
};

int cmd_regen(const RegenOptions& opt, std::ostream& out, std::ostream& err);

/// Full loop on the synthetic task: corrupt, assess, route, train, maintain
/// the buffer. Writes io.metrics (JSONL) and io.summary (JSON).
int cmd_train_toy(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct SimOptions {
  std::filesystem::path stream;
  std::filesystem::path out_dir;  // rho.csv, windows.csv, summary.json
};

/// Replays a `step,label,confidence` event stream through routing and the
/// memory buffer. Lines starting with '#' and blank lines are skipped; a
/// leading header line is allowed.
int cmd_curriculum_sim(const RunConfig& cfg, const SimOptions& opt, std::ostream& out, std::ostream& err);

struct CostOptions {
  bool json = false;
  bool check_reference = false;
  std::optional<std::string> sweep;  // "from:to:step"
};

int cmd_cost(const RunConfig& cfg, const CostOptions& opt, std::ostream& out, std::ostream& err);

/// Sends one answer-consistency request to the configured judge.
int cmd_judge_ping(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Builds the judge named by cfg.judge.
std::unique_ptr<Judge> make_judge(const RunConfig& cfg);

}  // namespace rova
