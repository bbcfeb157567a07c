#include "rova/frame_store.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "rova/error.hpp"

namespace rova {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void check_dims(int t, int h, int w) {
  if (t < 1 || h < 1 || w < 1) {
    fail(ErrorKind::kShape, "dimensions must be positive, got (" + std::to_string(t) + "," +
                                std::to_string(h) + "," + std::to_string(w) + ")");
  }
}

struct RvfBlob {
  int t = 0, h = 0, w = 0, c = 0;
  std::optional<FrameRate> rate;
  std::vector<std::uint8_t> payload;
};

constexpr std::size_t kMaxHeader = 4096;

RvfBlob read_rvf(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::string header;
  char ch = 0;
  while (in.get(ch) && ch != '\n') {
    header.push_back(ch);
    if (header.size() > kMaxHeader) fail(ErrorKind::kFormat, "rvf header too long in " + path.string());
  }
  if (ch != '\n') fail(ErrorKind::kFormat, "rvf header not terminated in " + path.string());

  json j;
  try {
    j = json::parse(header);
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, "malformed rvf header in " + path.string() + ": " + e.what());
  }
  RvfBlob blob;
  try {
    if (!j.is_object()) throw std::runtime_error("header is not an object");
    for (auto& [key, _] : j.items()) {
      if (key != "T" && key != "H" && key != "W" && key != "C" && key != "fps")
        throw std::runtime_error("unknown header key '" + key + "'");
    }
    blob.t = j.at("T").get<int>();
    blob.h = j.at("H").get<int>();
    blob.w = j.at("W").get<int>();
    blob.c = j.at("C").get<int>();
    if (j.contains("fps")) {
      auto fps = j.at("fps");
      if (!fps.is_array() || fps.size() != 2) throw std::runtime_error("fps must be [num, den]");
      blob.rate = FrameRate{fps[0].get<std::int64_t>(), fps[1].get<std::int64_t>()};
      if (blob.rate->den <= 0 || blob.rate->num <= 0) throw std::runtime_error("fps must be positive");
    }
  } catch (const std::exception& e) {
    fail(ErrorKind::kFormat, "malformed rvf header in " + path.string() + ": " + e.what());
  }
  if (blob.t < 1 || blob.h < 1 || blob.w < 1 || blob.c < 1)
    fail(ErrorKind::kFormat, "rvf header has non-positive dimension in " + path.string());

  blob.payload.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  std::size_t expected = static_cast<std::size_t>(blob.t) * blob.h * blob.w * blob.c;
  if (blob.payload.size() != expected) {
    fail(ErrorKind::kShape, "rvf payload length mismatch in " + path.string() + ": expected " +
                                std::to_string(expected) + " bytes, found " +
                                std::to_string(blob.payload.size()));
  }
  return blob;
}

void write_rvf(const fs::path& path, int t, int h, int w, int c,
               const std::optional<FrameRate>& rate, std::span<const std::uint8_t> payload) {
  json j;
  j["T"] = t;
  j["H"] = h;
  j["W"] = w;
  j["C"] = c;
  if (rate) j["fps"] = {rate->num, rate->den};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out << j.dump() << '\n';
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  out.flush();
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

std::string frame_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06d.png", index);
  return buf;
}

}  // namespace

// --- FrameSequence ---------------------------------------------------------

FrameSequence::FrameSequence(int t, int h, int w, std::vector<std::uint8_t> bytes,
                             std::optional<FrameRate> rate)
    : shape_{t, h, w}, bytes_(std::move(bytes)), rate_(rate) {
  check_dims(t, h, w);
  if (bytes_.size() != shape_.size() * kChannels) {
    fail(ErrorKind::kShape, "payload holds " + std::to_string(bytes_.size()) +
                                " bytes, shape requires " +
                                std::to_string(shape_.size() * kChannels));
  }
  if (rate_ && (rate_->num <= 0 || rate_->den <= 0))
    fail(ErrorKind::kDomain, "frame rate must be positive");
}

FrameSequence FrameSequence::zeros(int t, int h, int w) {
  check_dims(t, h, w);
  return FrameSequence(t, h, w,
                       std::vector<std::uint8_t>(static_cast<std::size_t>(t) * h * w * kChannels));
}

std::span<const std::uint8_t> FrameSequence::frame(int t) const {
  if (t < 0 || t >= shape_.t) fail(ErrorKind::kShape, "frame index out of range");
  return std::span<const std::uint8_t>(bytes_).subspan(static_cast<std::size_t>(t) * frame_bytes(),
                                                       frame_bytes());
}

// --- MaskStack -------------------------------------------------------------

MaskStack::MaskStack(Shape3 shape, std::vector<std::uint8_t> binary, std::vector<float> modulation)
    : shape_(shape), binary_(std::move(binary)), modulation_(std::move(modulation)) {
  check_dims(shape.t, shape.h, shape.w);
  if (binary_.size() != shape_.size() || modulation_.size() != shape_.size())
    fail(ErrorKind::kShape, "mask planes do not match shape");
  for (auto b : binary_)
    if (b > 1) fail(ErrorKind::kDomain, "binary mask value outside {0,1}");
  for (float c : modulation_)
    if (!(c >= 0.0f && c <= 1.0f)) fail(ErrorKind::kDomain, "modulation value outside [0,1]");
}

MaskStack MaskStack::clean(Shape3 shape) {
  return MaskStack(shape, std::vector<std::uint8_t>(shape.size(), 0),
                   std::vector<float>(shape.size(), 1.0f));
}

double MaskStack::coverage(int t) const {
  auto n = shape_.pixels_per_frame();
  auto begin = binary_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(t) * n);
  auto on = std::count(begin, begin + static_cast<std::ptrdiff_t>(n), std::uint8_t{1});
  return static_cast<double>(on) / static_cast<double>(n);
}

double MaskStack::coverage() const {
  auto on = std::count(binary_.begin(), binary_.end(), std::uint8_t{1});
  return static_cast<double>(on) / static_cast<double>(binary_.size());
}

// --- .rvf I/O --------------------------------------------------------------

FrameSequence read_sequence(const fs::path& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) return read_png_directory(path);
  if (!fs::exists(path, ec)) fail(ErrorKind::kIo, "no such file: " + path.string());
  RvfBlob blob = read_rvf(path);
  if (blob.c != FrameSequence::kChannels)
    fail(ErrorKind::kFormat, "expected C=3 in " + path.string() + ", found C=" + std::to_string(blob.c));
  return FrameSequence(blob.t, blob.h, blob.w, std::move(blob.payload), blob.rate);
}

void write_sequence(const FrameSequence& seq, const fs::path& path) {
  write_rvf(path, seq.frames(), seq.height(), seq.width(), FrameSequence::kChannels,
            seq.frame_rate(), seq.bytes());
}

MaskStack read_mask(const fs::path& path) {
  RvfBlob blob = read_rvf(path);
  if (blob.c != 2)
    fail(ErrorKind::kFormat, "expected C=2 mask in " + path.string() + ", found C=" + std::to_string(blob.c));
  Shape3 shape{blob.t, blob.h, blob.w};
  std::vector<std::uint8_t> binary(shape.size());
  std::vector<float> modulation(shape.size());
  for (std::size_t i = 0; i < shape.size(); ++i) {
    binary[i] = blob.payload[2 * i];
    modulation[i] = static_cast<float>(blob.payload[2 * i + 1]) / 255.0f;
  }
  return MaskStack(shape, std::move(binary), std::move(modulation));
}

void write_mask(const MaskStack& mask, const fs::path& path) {
  auto shape = mask.shape();
  std::vector<std::uint8_t> payload(shape.size() * 2);
  auto bin = mask.binary();
  auto mod = mask.modulation();
  for (std::size_t i = 0; i < shape.size(); ++i) {
    payload[2 * i] = bin[i];
    payload[2 * i + 1] = static_cast<std::uint8_t>(std::lround(mod[i] * 255.0f));
  }
  write_rvf(path, shape.t, shape.h, shape.w, 2, std::nullopt, payload);
}

// --- PNG -------------------------------------------------------------------

FrameSequence read_png_directory(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorKind::kIo, "not a directory: " + dir.string());
  int count = 0;
  while (fs::exists(dir / frame_name(count), ec)) ++count;
  if (count == 0) fail(ErrorKind::kFormat, "no 000000.png in " + dir.string());

  std::vector<std::uint8_t> bytes;
  int height = 0, width = 0;
  for (int i = 0; i < count; ++i) {
    auto file = dir / frame_name(i);
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, file.c_str()))
      fail(ErrorKind::kFormat, "cannot decode " + file.string() + ": " + image.message);
    image.format = PNG_FORMAT_RGB;
    int h = static_cast<int>(image.height), w = static_cast<int>(image.width);
    if (i == 0) {
      height = h;
      width = w;
    } else if (h != height || w != width) {
      png_image_free(&image);
      fail(ErrorKind::kShape, "inconsistent PNG dimensions: " + file.string() + " is " +
                                  std::to_string(w) + "x" + std::to_string(h) + ", expected " +
                                  std::to_string(width) + "x" + std::to_string(height));
    }
    std::size_t offset = bytes.size();
    bytes.resize(offset + PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, bytes.data() + offset, 0, nullptr))
      fail(ErrorKind::kFormat, "cannot decode " + file.string() + ": " + image.message);
  }
  return FrameSequence(count, height, width, std::move(bytes));
}

void write_png_directory(const FrameSequence& seq, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
  for (int t = 0; t < seq.frames(); ++t) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(seq.width());
    image.height = static_cast<png_uint_32>(seq.height());
    image.format = PNG_FORMAT_RGB;
    auto file = dir / frame_name(t);
    if (!png_image_write_to_file(&image, file.c_str(), 0, seq.frame(t).data(), 0, nullptr))
      fail(ErrorKind::kIo, "cannot write " + file.string() + ": " + image.message);
  }
}

std::vector<std::uint8_t> encode_png(const FrameSequence& seq, int t) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(seq.width());
  image.height = static_cast<png_uint_32>(seq.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  auto frame = seq.frame(t);
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, frame.data(), 0, nullptr))
    fail(ErrorKind::kFormat, std::string("png sizing failed: ") + image.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, frame.data(), 0, nullptr))
    fail(ErrorKind::kFormat, std::string("png encoding failed: ") + image.message);
  out.resize(size);
  return out;
}

}  // namespace rova
