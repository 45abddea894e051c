// io_test.cc

// Copyright 2026 The convbss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "convbss/io.h"
#include "test_support.h"

namespace convbss {
namespace {

using testing::MaxAbs;
using testing::RandomNormal;
using testing::TempDir;

void WriteFile(const std::filesystem::path &path, const std::string &content) {
  std::ofstream(path, std::ios::binary) << content;
}

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

TEST(CsvTest, RoundTripIsExact) {
  TempDir dir("csv");
  Matrix x = RandomNormal(3, 257, 1);
  x(0, 0) = 1e-300;
  x(1, 5) = -123456789.123456789;
  write_csv(dir / "x.csv", MultichannelSignal(x), {"a", "b", "c"});
  const NamedSignal back = read_csv(dir / "x.csv");
  EXPECT_EQ(back.signal.samples(), x);
  EXPECT_EQ(back.names, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(CsvTest, DefaultNamesAndHeaderLayout) {
  TempDir dir("csv");
  Matrix x(2, 2);
  x << 1, 2,
       3, 4.5;
  write_csv(dir / "x.csv", MultichannelSignal(x));
  EXPECT_EQ(ReadFile(dir / "x.csv"), "ch0,ch1\n1,3\n2,4.5\n");
}

TEST(CsvTest, ParsesWhitespaceAndCrLf) {
  TempDir dir("csv");
  WriteFile(dir / "x.csv", "u, v\r\n 1.5, -2\r\n3,4e-3\r\n\r\n");
  const NamedSignal s = read_csv(dir / "x.csv");
  EXPECT_EQ(s.names, (std::vector<std::string>{"u", "v"}));
  Matrix expected(2, 2);
  expected << 1.5, 3,
              -2, 4e-3;
  EXPECT_EQ(s.signal.samples(), expected);
}

TEST(CsvTest, MalformedInputsAreIoErrors) {
  TempDir dir("csv");
  WriteFile(dir / "ragged.csv", "a,b\n1,2\n3\n");
  EXPECT_THROW(read_csv(dir / "ragged.csv"), IoError);
  WriteFile(dir / "text.csv", "a\nfoo\n");
  EXPECT_THROW(read_csv(dir / "text.csv"), IoError);
  WriteFile(dir / "empty.csv", "");
  EXPECT_THROW(read_csv(dir / "empty.csv"), IoError);
  WriteFile(dir / "header_only.csv", "a,b\n");
  EXPECT_THROW(read_csv(dir / "header_only.csv"), IoError);
  EXPECT_THROW(read_csv(dir / "missing.csv"), IoError);
}

TEST(CsvTest, NameCountMustMatch) {
  TempDir dir("csv");
  EXPECT_THROW(write_csv(dir / "x.csv", MultichannelSignal(RandomNormal(2, 3, 1)), {"a"}),
               DimensionError);
}

TEST(WavTest, Float32RoundTrip) {
  TempDir dir("wav");
  const Matrix x = 0.3 * RandomNormal(2, 1000, 2);
  write_wav(dir / "x.wav", MultichannelSignal(x, 8000.0));
  const MultichannelSignal back = read_wav(dir / "x.wav");
  EXPECT_EQ(back.sample_rate(), 8000.0);
  const Matrix as_float = x.cast<float>().cast<double>();
  EXPECT_EQ(back.samples(), as_float);
}

TEST(WavTest, PcmRoundTripWithinQuantization) {
  TempDir dir("wav");
  const Matrix x = (0.25 * RandomNormal(3, 500, 3)).cwiseMax(-1.0).cwiseMin(1.0);
  write_wav(dir / "a.wav", MultichannelSignal(x), WavEncoding::kPcm16);
  EXPECT_LE(MaxAbs(read_wav(dir / "a.wav").samples() - x), 0.5 / 32768.0 + 1e-15);
  write_wav(dir / "b.wav", MultichannelSignal(x), WavEncoding::kPcm24);
  EXPECT_LE(MaxAbs(read_wav(dir / "b.wav").samples() - x), 0.5 / 8388608.0 + 1e-15);
}

TEST(WavTest, PcmClipsOutOfRange) {
  TempDir dir("wav");
  Matrix x(1, 3);
  x << 3.0, -3.0, 0.5;
  write_wav(dir / "x.wav", MultichannelSignal(x), WavEncoding::kPcm16);
  const Matrix back = read_wav(dir / "x.wav").samples();
  EXPECT_EQ(back(0, 0), 32767.0 / 32768.0);
  EXPECT_EQ(back(0, 1), -1.0);
  EXPECT_EQ(back(0, 2), 0.5);
}

std::string Le16(std::uint16_t v) { return {char(v & 0xFF), char(v >> 8)}; }
std::string Le32(std::uint32_t v) {
  return {char(v & 0xFF), char((v >> 8) & 0xFF), char((v >> 16) & 0xFF), char(v >> 24)};
}

TEST(WavTest, ReadsHandBuiltPcm16WithExtraChunk) {
  // Stereo, two frames: (16384, -16384), (32767, -32768); a LIST chunk with
  // odd size precedes the data chunk.
  std::string data = Le16(16384) + Le16(static_cast<std::uint16_t>(-16384)) +
                     Le16(32767) + Le16(0x8000);
  std::string fmt = "fmt " + Le32(16) + Le16(1) + Le16(2) + Le32(44100) +
                    Le32(44100 * 4) + Le16(4) + Le16(16);
  std::string list = "LIST" + Le32(3) + "abc" + std::string(1, '\0');
  std::string body = "WAVE" + fmt + list + "data" + Le32(8) + data;
  TempDir dir("wav");
  WriteFile(dir / "x.wav", "RIFF" + Le32(static_cast<std::uint32_t>(body.size())) + body);
  const MultichannelSignal s = read_wav(dir / "x.wav");
  ASSERT_EQ(s.channels(), 2);
  ASSERT_EQ(s.length(), 2);
  EXPECT_EQ(s.sample_rate(), 44100.0);
  EXPECT_EQ(s.samples()(0, 0), 0.5);
  EXPECT_EQ(s.samples()(1, 0), -0.5);
  EXPECT_EQ(s.samples()(0, 1), 32767.0 / 32768.0);
  EXPECT_EQ(s.samples()(1, 1), -1.0);
}

TEST(WavTest, ReadsExtensibleFloat) {
  const float value = 0.125f;
  std::uint32_t bits;
  std::memcpy(&bits, &value, 4);
  std::string fmt = "fmt " + Le32(40) + Le16(0xFFFE) + Le16(1) + Le32(16000) +
                    Le32(16000 * 4) + Le16(4) + Le16(32) + Le16(22) + Le16(32) +
                    Le32(4) + Le16(3) + std::string(14, '\x01');
  std::string body = "WAVE" + fmt + "data" + Le32(4) + Le32(bits);
  TempDir dir("wav");
  WriteFile(dir / "x.wav", "RIFF" + Le32(static_cast<std::uint32_t>(body.size())) + body);
  const MultichannelSignal s = read_wav(dir / "x.wav");
  EXPECT_EQ(s.samples()(0, 0), 0.125);
}

TEST(WavTest, RejectsGarbage) {
  TempDir dir("wav");
  WriteFile(dir / "x.wav", "not a wave file at all");
  EXPECT_THROW(read_wav(dir / "x.wav"), IoError);
  EXPECT_THROW(read_wav(dir / "missing.wav"), IoError);
}

TEST(SignalFileTest, DispatchByExtension) {
  TempDir dir("sig");
  const Matrix x = RandomNormal(2, 20, 4);
  write_signal(dir / "x.csv", MultichannelSignal(x), SignalFormat::kCsv);
  EXPECT_EQ(read_signal(dir / "x.csv").samples(), x);
  write_signal(dir / "x.wav", MultichannelSignal(0.1 * x), SignalFormat::kWav);
  EXPECT_LE(MaxAbs(read_signal(dir / "x.wav").samples() - 0.1 * x), 1e-7);
  EXPECT_THROW(read_signal(dir / "x.txt"), IoError);
  EXPECT_EQ(SignalFormatFromString("wav"), SignalFormat::kWav);
  EXPECT_EQ(Extension(SignalFormat::kCsv), ".csv");
  EXPECT_THROW(SignalFormatFromString("flac"), InvalidArgumentError);
}

}  // namespace
}  // namespace convbss
