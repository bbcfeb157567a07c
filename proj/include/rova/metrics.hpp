#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rova {

/// Append-only JSONL stream, one object per line:
///   {"kind": ..., "step": ..., "metrics": {...}[, "wall_time": ...]}
/// Steps must be non-decreasing per kind. Every line is flushed.
class MetricsWriter {
 public:
  MetricsWriter(const std::filesystem::path& path, bool record_wall_time);

  void write(const std::string& kind, std::int64_t step,
             const std::vector<std::pair<std::string, double>>& values);

  std::size_t lines() const { return lines_; }

 private:
  std::ofstream os_;
  bool wall_time_;
  std::map<std::string, std::int64_t> last_step_;
  std::size_t lines_ = 0;
};

/// Parses every line of a JSONL file; throws kFormat with the line number.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace rova
