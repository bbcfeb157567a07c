#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "rova/frame_store.hpp"
#include "support.hpp"

using namespace rova;
using rova::testing::TempDir;

namespace {

void write_raw(const std::filesystem::path& p, const std::string& header, std::size_t payload) {
  std::ofstream os(p, std::ios::binary);
  os << header << '\n';
  os << std::string(payload, '\x07');
}

std::uintmax_t size_of(const std::filesystem::path& p) { return std::filesystem::file_size(p); }

}  // namespace

TEST_CASE("FrameSequence rejects bad shapes and payloads") {
  CHECK_THROWS_AS(FrameSequence(0, 1, 1, {}), Error);
  CHECK_THROWS_AS(FrameSequence(1, 2, 2, std::vector<std::uint8_t>(11)), Error);
  CHECK_NOTHROW(FrameSequence(1, 2, 2, std::vector<std::uint8_t>(12)));
}

TEST_CASE("MaskStack validates binary and modulation ranges") {
  Shape3 s{1, 1, 2};
  CHECK_NOTHROW(MaskStack(s, {0, 1}, {0.0f, 1.0f}));
  CHECK_THROWS_AS(MaskStack(s, {0, 2}, {0.0f, 1.0f}), Error);
  CHECK_THROWS_AS(MaskStack(s, {0, 1}, {-0.1f, 1.0f}), Error);
  CHECK_THROWS_AS(MaskStack(s, {0, 1}, {0.0f, 1.5f}), Error);
  MaskStack m(s, {0, 1}, {0.3f, 0.25f});
  CHECK(m.fused_at(0, 0, 0) == 0.0f);
  CHECK(m.fused_at(0, 0, 1) == 0.25f);
  CHECK(m.coverage() == doctest::Approx(0.5));
}

TEST_CASE("rvf header with 96 payload bytes reads as (2,4,4,3)") {
  TempDir dir;
  auto p = dir / "a.rvf";
  write_raw(p, R"({"T":2,"H":4,"W":4,"C":3})", 96);
  auto seq = read_sequence(p);
  CHECK(seq.frames() == 2);
  CHECK(seq.height() == 4);
  CHECK(seq.width() == 4);
  CHECK(seq.bytes().size() == 96);
}

TEST_CASE("rvf payload shorter than the header declares is rejected") {
  TempDir dir;
  auto p = dir / "short.rvf";
  write_raw(p, R"({"T":2,"H":4,"W":4,"C":3})", 95);
  try {
    read_sequence(p);
    FAIL("expected a shape error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kShape);
  }
}

TEST_CASE("malformed rvf headers are format errors") {
  TempDir dir;
  for (std::string header : {"not json", R"({"T":2,"H":4,"W":4})", R"({"T":2,"H":4,"W":4,"C":4})",
                             R"({"T":-1,"H":4,"W":4,"C":3})"}) {
    auto p = dir / "bad.rvf";
    write_raw(p, header, 96);
    CHECK_THROWS_AS(read_sequence(p), Error);
  }
}

TEST_CASE("all-zero (1,2,2) sequence writes a 12-byte payload") {
  TempDir dir;
  auto p = dir / "z.rvf";
  write_sequence(FrameSequence::zeros(1, 2, 2), p);
  std::ifstream is(p, std::ios::binary);
  std::string header;
  std::getline(is, header);
  CHECK(size_of(p) == header.size() + 1 + 12);
}

TEST_CASE("random (8,32,32) sequence round-trips byte for byte") {
  TempDir dir;
  CounterRng rng(11);
  auto seq = testing::random_video(8, 32, 32, rng);
  auto p = dir / "r.rvf";
  write_sequence(seq, p);
  auto back = read_sequence(p);
  CHECK(back == seq);
}

TEST_CASE("round trip property over random shapes") {
  TempDir dir;
  CounterRng rng(5);
  for (int i = 0; i < 25; ++i) {
    int t = 1 + static_cast<int>(rng.below(5));
    int h = 1 + static_cast<int>(rng.below(9));
    int w = 1 + static_cast<int>(rng.below(9));
    auto seq = testing::random_video(t, h, w, rng);
    auto p = dir / ("s" + std::to_string(i) + ".rvf");
    write_sequence(seq, p);
    REQUIRE(read_sequence(p) == seq);
  }
}

TEST_CASE("frame rate hint survives the container") {
  TempDir dir;
  FrameSequence seq(1, 1, 1, {1, 2, 3}, FrameRate{30000, 1001});
  write_sequence(seq, dir / "f.rvf");
  auto back = read_sequence(dir / "f.rvf");
  REQUIRE(back.frame_rate().has_value());
  CHECK(back.frame_rate()->num == 30000);
  CHECK(back.frame_rate()->den == 1001);
}

TEST_CASE("unwritable path is an I/O error") {
  try {
    write_sequence(FrameSequence::zeros(1, 1, 1), "/nonexistent-dir/x/y.rvf");
    FAIL("expected an I/O error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
  }
}

TEST_CASE("missing input is an I/O error") {
  CHECK_THROWS_AS(read_sequence("/nonexistent-file.rvf"), Error);
}

TEST_CASE("PNG directory of 16 frames reads as (16,64,64)") {
  TempDir dir;
  CounterRng rng(3);
  auto seq = testing::random_video(16, 64, 64, rng);
  write_png_directory(seq, dir / "frames");
  CHECK(std::filesystem::exists(dir / "frames" / "000000.png"));
  CHECK(std::filesystem::exists(dir / "frames" / "000015.png"));
  auto back = read_sequence(dir / "frames");
  CHECK(back.frames() == 16);
  CHECK(back.height() == 64);
  CHECK(back.width() == 64);
  CHECK(back == seq);
}

TEST_CASE("PNG frames with inconsistent dimensions are rejected") {
  TempDir dir;
  CounterRng rng(4);
  write_png_directory(testing::random_video(1, 8, 8, rng), dir / "a");
  write_png_directory(testing::random_video(1, 4, 8, rng), dir / "b");
  std::filesystem::copy_file(dir / "b" / "000000.png", dir / "a" / "000001.png");
  try {
    read_sequence(dir / "a");
    FAIL("expected a shape error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kShape);
  }
}

TEST_CASE("mask container round-trips binary exactly and modulation to 8 bits") {
  TempDir dir;
  Shape3 s{2, 3, 3};
  std::vector<std::uint8_t> b(18);
  std::vector<float> c(18);
  for (int i = 0; i < 18; ++i) {
    b[i] = static_cast<std::uint8_t>(i % 2);
    c[i] = static_cast<float>(i) / 17.0f;
  }
  MaskStack m(s, b, c);
  write_mask(m, dir / "m.rvf");
  auto back = read_mask(dir / "m.rvf");
  CHECK(back.shape() == s);
  for (int i = 0; i < 18; ++i) {
    CHECK(back.binary()[i] == b[i]);
    CHECK(back.modulation()[i] == doctest::Approx(c[i]).epsilon(0.5 / 255.0));
  }
  write_mask(back, dir / "m2.rvf");
  CHECK(read_mask(dir / "m2.rvf") == back);
}

TEST_CASE("encode_png produces a PNG signature") {
  auto png = encode_png(FrameSequence::zeros(2, 4, 4), 1);
  REQUIRE(png.size() > 8);
  CHECK(png[1] == 'P');
  CHECK(png[2] == 'N');
  CHECK(png[3] == 'G');
  CHECK_THROWS_AS(encode_png(FrameSequence::zeros(2, 4, 4), 2), Error);
}
