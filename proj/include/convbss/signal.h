// convbss/signal.h

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

#ifndef CONVBSS_SIGNAL_H_
#define CONVBSS_SIGNAL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace convbss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n channels x N real samples. Rows are channels.
///
/// Every row has the same length and all values are finite. A signal with
/// zero channels is allowed and represents the empty result of extracting
/// nothing.
class MultichannelSignal {
 public:
  MultichannelSignal() = default;
  explicit MultichannelSignal(Matrix samples,
                              std::optional<double> sample_rate = std::nullopt);

  Eigen::Index channels() const { return samples_.rows(); }
  Eigen::Index length() const { return samples_.cols(); }
  bool empty() const { return samples_.rows() == 0; }

  const Matrix &samples() const { return samples_; }
  auto channel(Eigen::Index i) const { return samples_.row(i); }
  std::optional<double> sample_rate() const { return sample_rate_; }

 private:
  Matrix samples_;
  std::optional<double> sample_rate_;
};

/// Bank of FIR filters, taps[out][in][lag], all filters of the same order.
class MimoFirFilter {
 public:
  using Taps = std::vector<std::vector<std::vector<double>>>;

  explicit MimoFirFilter(Taps taps);

  /// Diagonal bank: filter i maps input i to output i, off-diagonal zero.
  static MimoFirFilter Diagonal(const std::vector<std::vector<double>> &filters);

  std::size_t out_channels() const { return taps_.size(); }
  std::size_t in_channels() const { return taps_.front().size(); }
  std::size_t order() const { return taps_.front().front().size(); }
  double tap(std::size_t out, std::size_t in, std::size_t lag) const {
    return taps_[out][in][lag];
  }
  const Taps &taps() const { return taps_; }

 private:
  Taps taps_;
};

enum class Distribution { kUniform, kLaplacian, kBernoulliSign, kGaussian };

std::string ToString(Distribution d);
Distribution DistributionFromString(const std::string &name);

/// Innovation-process source model. Source i is innovation i passed through
/// coloring filter i (odd length 2R-1, centred at lag R-1).
struct InnovationSpec {
  std::vector<Distribution> distributions;
  std::vector<std::vector<double>> coloring_filters;
  std::uint64_t seed = 0;

  /// Half-width R of the coloring filters. All filters share it.
  std::size_t coloring_half_width() const;
};

struct GeneratedSources {
  MultichannelSignal innovations;
  MultichannelSignal sources;
};

/// Delay-embedded signal: rows are channel-major blocks of `order` delays,
/// newest first. Row i*order + d, column c holds channel i at sample c+order-1-d.
class StackedSignal {
 public:
  StackedSignal() = default;
  StackedSignal(Matrix data, Eigen::Index channels, Eigen::Index order);

  Eigen::Index channels() const { return channels_; }
  Eigen::Index order() const { return order_; }
  Eigen::Index dimension() const { return data_.rows(); }
  Eigen::Index frames() const { return data_.cols(); }
  const Matrix &data() const { return data_; }

 private:
  Matrix data_;
  Eigen::Index channels_ = 0;
  Eigen::Index order_ = 0;
};

/// Causal MIMO convolution with zero initial conditions; output length
/// equals input length.
MultichannelSignal apply_mimo_fir(const MimoFirFilter &filter,
                                  const MultichannelSignal &input);

/// Draws `count` iid innovation sequences of `length` samples (normalized to
/// zero sample mean and unit sample variance) and colors them.  The
/// non-causal coloring filter is applied with a bulk delay of R-1 samples.
GeneratedSources generate_sources(const InnovationSpec &params,
                                  Eigen::Index length, Eigen::Index count);

StackedSignal delay_embed(const MultichannelSignal &input, Eigen::Index order);

}  // namespace convbss

#endif  // CONVBSS_SIGNAL_H_
