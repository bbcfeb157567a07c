#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "rova/frame_store.hpp"
#include "rova/rng.hpp"

namespace rova::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> seq{0};
    path_ = std::filesystem::temp_directory_path() /
            ("rova-test-" + std::to_string(::getpid()) + "-" + std::to_string(seq++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline FrameSequence random_video(int t, int h, int w, CounterRng& rng) {
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(t) * h * w * 3);
  for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.below(256));
  return FrameSequence(t, h, w, std::move(bytes));
}

}  // namespace rova::testing
