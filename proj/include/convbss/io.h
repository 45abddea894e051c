// convbss/io.h

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

// Signal files: CSV (header row of channel names, one column per channel,
// full double precision) and RIFF WAV (PCM 16/24/32-bit, IEEE float 32/64).

#ifndef CONVBSS_IO_H_
#define CONVBSS_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "convbss/error.h"
#include "convbss/signal.h"

namespace convbss {

/// Thrown for unreadable/unwritable files and malformed content.
class IoError : public Error {
 public:
  using Error::Error;
};

enum class SignalFormat { kCsv, kWav };
enum class WavEncoding { kPcm16, kPcm24, kFloat32 };

SignalFormat SignalFormatFromString(const std::string &name);
std::string ToString(SignalFormat format);
/// File extension including the dot.
std::string Extension(SignalFormat format);

struct NamedSignal {
  MultichannelSignal signal;
  std::vector<std::string> names;
};

NamedSignal read_csv(const std::filesystem::path &path);
/// Default names are ch0, ch1, ...
void write_csv(const std::filesystem::path &path,
               const MultichannelSignal &signal,
               const std::vector<std::string> &names = {});

MultichannelSignal read_wav(const std::filesystem::path &path);
/// Samples are written as-is for float; PCM clips to [-1, 1].
void write_wav(const std::filesystem::path &path,
               const MultichannelSignal &signal,
               WavEncoding encoding = WavEncoding::kFloat32);

/// Chooses the reader from the file extension (.csv or .wav).
MultichannelSignal read_signal(const std::filesystem::path &path);
void write_signal(const std::filesystem::path &path,
                  const MultichannelSignal &signal, SignalFormat format,
                  const std::vector<std::string> &names = {});

}  // namespace convbss

#endif  // CONVBSS_IO_H_
