#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rova/error.hpp"

namespace rova {

struct FrameRate {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool operator==(const FrameRate&) const = default;
};

struct Shape3 {
  int t = 0;
  int h = 0;
  int w = 0;
  bool operator==(const Shape3&) const = default;
  std::size_t pixels_per_frame() const {
    return static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  }
  std::size_t size() const { return static_cast<std::size_t>(t) * pixels_per_frame(); }
};

/// Dense 8-bit RGB video, row-major (T, H, W, C) with C = 3.
/// Immutable after construction.
class FrameSequence {
 public:
  static constexpr int kChannels = 3;

  FrameSequence(int t, int h, int w, std::vector<std::uint8_t> bytes,
                std::optional<FrameRate> rate = std::nullopt);

  static FrameSequence zeros(int t, int h, int w);

  int frames() const { return shape_.t; }
  int height() const { return shape_.h; }
  int width() const { return shape_.w; }
  int channels() const { return kChannels; }
  Shape3 shape() const { return shape_; }
  const std::optional<FrameRate>& frame_rate() const { return rate_; }

  std::span<const std::uint8_t> bytes() const { return bytes_; }
  std::size_t frame_bytes() const { return shape_.pixels_per_frame() * kChannels; }
  std::span<const std::uint8_t> frame(int t) const;

  std::uint8_t at(int t, int y, int x, int c) const {
    return bytes_[index(t, y, x, c)];
  }
  std::size_t index(int t, int y, int x, int c) const {
    return ((static_cast<std::size_t>(t) * shape_.h + y) * shape_.w + x) * kChannels + c;
  }

  bool operator==(const FrameSequence& other) const {
    return shape_ == other.shape_ && bytes_ == other.bytes_;
  }

 private:
  Shape3 shape_;
  std::vector<std::uint8_t> bytes_;
  std::optional<FrameRate> rate_;
};

/// Per-frame binary map B_t and modulation map C_t, each (T, H, W).
/// The fused mask B_t * C_t is derived on demand.
class MaskStack {
 public:
  MaskStack(Shape3 shape, std::vector<std::uint8_t> binary, std::vector<float> modulation);

  /// All-clean mask: B = 0, C = 1.
  static MaskStack clean(Shape3 shape);

  Shape3 shape() const { return shape_; }
  std::span<const std::uint8_t> binary() const { return binary_; }
  std::span<const float> modulation() const { return modulation_; }

  std::size_t index(int t, int y, int x) const {
    return (static_cast<std::size_t>(t) * shape_.h + y) * shape_.w + x;
  }
  std::uint8_t binary_at(int t, int y, int x) const { return binary_[index(t, y, x)]; }
  float modulation_at(int t, int y, int x) const { return modulation_[index(t, y, x)]; }
  float fused_at(int t, int y, int x) const {
    auto i = index(t, y, x);
    return binary_[i] ? modulation_[i] : 0.0f;
  }

  /// Fraction of pixels of frame t with B = 1.
  double coverage(int t) const;
  /// Fraction of all pixels with B = 1.
  double coverage() const;

  bool operator==(const MaskStack&) const = default;

 private:
  Shape3 shape_;
  std::vector<std::uint8_t> binary_;
  std::vector<float> modulation_;
};

// --- .rvf container --------------------------------------------------------
//
// One UTF-8 JSON header line {"T":..,"H":..,"W":..,"C":..} terminated by
// '\n', then T*H*W*C raw bytes in row-major order. Frame sequences use C = 3;
// masks use C = 2 (binary plane value then modulation quantized to 0..255).
// An optional "fps":[num,den] member follows "C".

FrameSequence read_sequence(const std::filesystem::path& path);
void write_sequence(const FrameSequence& seq, const std::filesystem::path& path);

MaskStack read_mask(const std::filesystem::path& path);
void write_mask(const MaskStack& mask, const std::filesystem::path& path);

/// Reads every `%06d.png` in a directory, in index order, as RGB.
FrameSequence read_png_directory(const std::filesystem::path& dir);
/// Writes frames as `%06d.png` into dir (created if missing).
void write_png_directory(const FrameSequence& seq, const std::filesystem::path& dir);

/// Encodes one frame of a sequence as an in-memory PNG.
std::vector<std::uint8_t> encode_png(const FrameSequence& seq, int t);

}  // namespace rova
