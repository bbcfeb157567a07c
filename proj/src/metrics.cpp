#include "rova/metrics.hpp"

#include <chrono>

#include "rova/error.hpp"

namespace rova {

using nlohmann::ordered_json;

MetricsWriter::MetricsWriter(const std::filesystem::path& path, bool record_wall_time)
    : os_(path, std::ios::trunc), wall_time_(record_wall_time) {
  if (!os_) fail(ErrorKind::kIo, "cannot write metrics file " + path.string());
}

void MetricsWriter::write(const std::string& kind, std::int64_t step,
                          const std::vector<std::pair<std::string, double>>& values) {
  auto it = last_step_.find(kind);
  if (it != last_step_.end() && step < it->second)
    fail(ErrorKind::kValidation, "metrics for '" + kind + "' written out of step order");
  last_step_[kind] = step;

  ordered_json line;
  line["kind"] = kind;
  line["step"] = step;
  ordered_json m = ordered_json::object();
  for (const auto& [k, v] : values) m[k] = v;
  line["metrics"] = std::move(m);
  if (wall_time_) {
    auto now = std::chrono::system_clock::now().time_since_epoch();
    line["wall_time"] = std::chrono::duration<double>(now).count();
  }
  os_ << line.dump() << '\n';
  os_.flush();
  if (!os_) fail(ErrorKind::kIo, "metrics write failed");
  ++lines_;
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::kIo, "cannot read " + path.string());
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::kFormat, path.string() + ":" + std::to_string(n) + ": not valid JSON");
    out.push_back(std::move(j));
  }
  return out;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) fail(ErrorKind::kIo, "cannot write " + path.string());
  os << doc.dump(2) << '\n';
  if (!os) fail(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace rova
