// io.cc

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

#include "convbss/io.h"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace convbss {

SignalFormat SignalFormatFromString(const std::string &name) {
  if (name == "csv") return SignalFormat::kCsv;
  if (name == "wav") return SignalFormat::kWav;
  throw InvalidArgumentError("unknown signal format '" + name + "'");
}

std::string ToString(SignalFormat format) {
  return format == SignalFormat::kCsv ? "csv" : "wav";
}

std::string Extension(SignalFormat format) { return "." + ToString(format); }

namespace {

std::vector<std::string> SplitCommas(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    std::size_t start = field.find_first_not_of(' ');
    fields.push_back(start == std::string::npos ? "" : field.substr(start));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool ParseDouble(const std::string &text, double &out) {
  const char *first = text.data();
  const char *last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

NamedSignal read_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
  NamedSignal out;
  out.names = SplitCommas(line);
  const std::size_t channels = out.names.size();
  std::vector<std::vector<double>> columns(channels);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = SplitCommas(line);
    if (fields.size() != channels)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(channels) + " fields, got " +
                    std::to_string(fields.size()));
    for (std::size_t c = 0; c < channels; ++c) {
      double v = 0.0;
      if (!ParseDouble(fields[c], v))
        throw IoError(path.string() + ":" + std::to_string(line_no) +
                      ": not a number: '" + fields[c] + "'");
      columns[c].push_back(v);
    }
  }
  const std::size_t length = columns.empty() ? 0 : columns.front().size();
  if (length == 0) throw IoError(path.string() + " has no samples");
  Matrix samples(channels, length);
  for (std::size_t c = 0; c < channels; ++c)
    samples.row(c) = Eigen::Map<const Eigen::RowVectorXd>(columns[c].data(), length);
  out.signal = MultichannelSignal(std::move(samples));
  return out;
}

void write_csv(const std::filesystem::path &path,
               const MultichannelSignal &signal,
               const std::vector<std::string> &names) {
  if (!names.empty() && static_cast<Eigen::Index>(names.size()) != signal.channels())
    throw DimensionError("one name per channel required");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (Eigen::Index c = 0; c < signal.channels(); ++c) {
    if (c) out << ',';
    out << (names.empty() ? "ch" + std::to_string(c) : names[c]);
  }
  out << '\n';
  std::array<char, 32> buf;
  for (Eigen::Index k = 0; k < signal.length(); ++k) {
    for (Eigen::Index c = 0; c < signal.channels(); ++c) {
      if (c) out << ',';
      // Shortest representation that round-trips exactly.
      auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(),
                                     signal.samples()(c, k));
      out.write(buf.data(), ptr - buf.data());
    }
    out << '\n';
  }
  if (!out) throw IoError("write to " + path.string() + " failed");
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t ReadU32(const unsigned char *p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
         std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}
std::uint16_t ReadU16(const unsigned char *p) {
  return std::uint16_t(p[0] | p[1] << 8);
}

void PutU32(std::string &b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(char((v >> (8 * i)) & 0xFF));
}
void PutU16(std::string &b, std::uint16_t v) {
  b.push_back(char(v & 0xFF));
  b.push_back(char(v >> 8));
}

}  // namespace

MultichannelSignal read_wav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IoError(path.string() + " is not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char *data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    const std::uint32_t size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || avail < 16) throw IoError("truncated fmt chunk");
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      if (format == kFormatExtensible) {
        if (size < 40 || avail < 40) throw IoError("truncated extensible fmt");
        format = ReadU16(chunk + 8 + 24);  // first two bytes of SubFormat
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = std::min<std::size_t>(size, avail);
    }
    pos = body + size + (size & 1);
  }
  if (channels == 0 || data == nullptr)
    throw IoError(path.string() + " lacks fmt or data chunk");
  const bool is_float = format == kFormatFloat;
  if (!(format == kFormatPcm || is_float))
    throw IoError("unsupported WAV format tag " + std::to_string(format));
  if ((is_float && bits != 32 && bits != 64) ||
      (!is_float && bits != 16 && bits != 24 && bits != 32))
    throw IoError("unsupported WAV sample width " + std::to_string(bits));

  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  if (frames == 0) throw IoError(path.string() + " has no samples");
  Matrix samples(channels, static_cast<Eigen::Index>(frames));
  for (std::size_t k = 0; k < frames; ++k) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char *p = data + (k * channels + c) * width;
      double v = 0.0;
      if (is_float && bits == 32) {
        v = std::bit_cast<float>(ReadU32(p));
      } else if (is_float) {
        const std::uint64_t raw = std::uint64_t(ReadU32(p)) |
                                  std::uint64_t(ReadU32(p + 4)) << 32;
        v = std::bit_cast<double>(raw);
      } else if (bits == 16) {
        v = double(std::int16_t(ReadU16(p))) / 32768.0;
      } else if (bits == 24) {
        std::int32_t s = std::int32_t(p[0]) | std::int32_t(p[1]) << 8 |
                         std::int32_t(p[2]) << 16;
        if (s & 0x800000) s -= 0x1000000;
        v = double(s) / 8388608.0;
      } else {
        v = double(std::int32_t(ReadU32(p))) / 2147483648.0;
      }
      samples(c, k) = v;
    }
  }
  return MultichannelSignal(std::move(samples), double(rate));
}

void write_wav(const std::filesystem::path &path,
               const MultichannelSignal &signal, WavEncoding encoding) {
  if (signal.channels() < 1) throw DimensionError("cannot write empty signal");
  const std::uint16_t channels = static_cast<std::uint16_t>(signal.channels());
  const std::uint32_t rate =
      static_cast<std::uint32_t>(std::lround(signal.sample_rate().value_or(16000.0)));
  const std::uint16_t bits = encoding == WavEncoding::kPcm16   ? 16
                             : encoding == WavEncoding::kPcm24 ? 24
                                                               : 32;
  const std::uint16_t format =
      encoding == WavEncoding::kFloat32 ? kFormatFloat : kFormatPcm;
  const std::uint32_t block = channels * (bits / 8);
  const std::uint32_t data_size =
      block * static_cast<std::uint32_t>(signal.length());

  std::string b;
  b.reserve(44 + data_size);
  b += "RIFF";
  PutU32(b, 36 + data_size);
  b += "WAVEfmt ";
  PutU32(b, 16);
  PutU16(b, format);
  PutU16(b, channels);
  PutU32(b, rate);
  PutU32(b, rate * block);
  PutU16(b, static_cast<std::uint16_t>(block));
  PutU16(b, bits);
  b += "data";
  PutU32(b, data_size);
  for (Eigen::Index k = 0; k < signal.length(); ++k) {
    for (Eigen::Index c = 0; c < signal.channels(); ++c) {
      const double v = signal.samples()(c, k);
      if (encoding == WavEncoding::kFloat32) {
        PutU32(b, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      } else {
        const double clipped = std::clamp(v, -1.0, 1.0);
        if (encoding == WavEncoding::kPcm16) {
          const long s = std::clamp(std::lround(clipped * 32768.0), -32768L, 32767L);
          PutU16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(s)));
        } else {
          const long s =
              std::clamp(std::lround(clipped * 8388608.0), -8388608L, 8388607L);
          const std::uint32_t u = static_cast<std::uint32_t>(s);
          b.push_back(char(u & 0xFF));
          b.push_back(char((u >> 8) & 0xFF));
          b.push_back(char((u >> 16) & 0xFF));
        }
      }
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(b.data(), static_cast<std::streamsize>(b.size()));
  if (!out) throw IoError("write to " + path.string() + " failed");
}

MultichannelSignal read_signal(const std::filesystem::path &path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return read_csv(path).signal;
  if (ext == ".wav") return read_wav(path);
  throw IoError("unrecognized signal file extension '" + ext + "' (" +
                path.string() + ")");
}

void write_signal(const std::filesystem::path &path,
                  const MultichannelSignal &signal, SignalFormat format,
                  const std::vector<std::string> &names) {
  if (format == SignalFormat::kCsv)
    write_csv(path, signal, names);
  else
    write_wav(path, signal);
}

}  // namespace convbss
