// signal.cc

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

#include "convbss/signal.h"

#include <cmath>
#include <random>

#include "convbss/error.h"

namespace convbss {

MultichannelSignal::MultichannelSignal(Matrix samples,
                                       std::optional<double> sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (samples_.rows() > 0 && samples_.cols() < 1)
    throw InsufficientDataError("signal must hold at least one sample");
  if (!samples_.allFinite())
    throw NumericError("signal contains non-finite samples");
  if (sample_rate_ && !(*sample_rate_ > 0.0))
    throw InvalidArgumentError("sample rate must be positive");
}

MimoFirFilter::MimoFirFilter(Taps taps) : taps_(std::move(taps)) {
  if (taps_.empty() || taps_.front().empty() || taps_.front().front().empty())
    throw InvalidArgumentError("filter bank needs at least one 1-tap filter");
  const std::size_t in = taps_.front().size();
  const std::size_t order = taps_.front().front().size();
  for (const auto &row : taps_) {
    if (row.size() != in)
      throw DimensionError("filter bank rows have different input counts");
    bool any_nonzero = false;
    for (const auto &filter : row) {
      if (filter.size() != order)
        throw DimensionError("all filters in a bank must share one order");
      for (double t : filter) {
        if (!std::isfinite(t)) throw NumericError("non-finite filter tap");
        any_nonzero = any_nonzero || t != 0.0;
      }
    }
    if (!any_nonzero)
      throw InvalidArgumentError("every output row needs a nonzero tap");
  }
}

MimoFirFilter MimoFirFilter::Diagonal(
    const std::vector<std::vector<double>> &filters) {
  if (filters.empty()) throw InvalidArgumentError("empty filter list");
  const std::size_t n = filters.size();
  const std::size_t order = filters.front().size();
  Taps taps(n, std::vector<std::vector<double>>(n, std::vector<double>(order)));
  for (std::size_t i = 0; i < n; ++i) {
    if (filters[i].size() != order)
      throw DimensionError("all filters in a bank must share one order");
    taps[i][i] = filters[i];
  }
  return MimoFirFilter(std::move(taps));
}

std::string ToString(Distribution d) {
  switch (d) {
    case Distribution::kUniform: return "uniform";
    case Distribution::kLaplacian: return "laplacian";
    case Distribution::kBernoulliSign: return "bernoulli-sign";
    case Distribution::kGaussian: return "gaussian";
  }
  return "unknown";
}

Distribution DistributionFromString(const std::string &name) {
  if (name == "uniform") return Distribution::kUniform;
  if (name == "laplacian") return Distribution::kLaplacian;
  if (name == "bernoulli-sign") return Distribution::kBernoulliSign;
  if (name == "gaussian") return Distribution::kGaussian;
  throw InvalidArgumentError("unknown distribution '" + name + "'");
}

std::size_t InnovationSpec::coloring_half_width() const {
  if (coloring_filters.empty()) return 1;
  const std::size_t len = coloring_filters.front().size();
  return (len + 1) / 2;
}

StackedSignal::StackedSignal(Matrix data, Eigen::Index channels,
                             Eigen::Index order)
    : data_(std::move(data)), channels_(channels), order_(order) {
  if (channels_ < 1 || order_ < 1)
    throw InvalidArgumentError("stacked signal needs channels >= 1, order >= 1");
  if (data_.rows() != channels_ * order_)
    throw DimensionError("stacked rows must equal channels * order");
}

MultichannelSignal apply_mimo_fir(const MimoFirFilter &filter,
                                  const MultichannelSignal &input) {
  if (static_cast<Eigen::Index>(filter.in_channels()) != input.channels())
    throw DimensionError("filter expects " +
                         std::to_string(filter.in_channels()) +
                         " input channels, got " +
                         std::to_string(input.channels()));
  const Eigen::Index n_out = static_cast<Eigen::Index>(filter.out_channels());
  const Eigen::Index len = input.length();
  const Eigen::Index order = static_cast<Eigen::Index>(filter.order());
  const Matrix &x = input.samples();
  Matrix y = Matrix::Zero(n_out, len);
  for (Eigen::Index i = 0; i < n_out; ++i) {
    for (Eigen::Index j = 0; j < input.channels(); ++j) {
      for (Eigen::Index l = 0; l < order && l < len; ++l) {
        const double a = filter.tap(i, j, l);
        if (a == 0.0) continue;
        // y_i(k) += a * x_j(k - l) for k >= l.
        y.row(i).tail(len - l) += a * x.row(j).head(len - l);
      }
    }
  }
  return MultichannelSignal(std::move(y), input.sample_rate());
}

namespace {

double Draw(Distribution d, std::mt19937_64 &rng) {
  switch (d) {
    case Distribution::kUniform: {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      return u(rng);
    }
    case Distribution::kLaplacian: {
      // Inverse CDF; u in [-0.5, 0.5).
      std::uniform_real_distribution<double> u(-0.5, 0.5);
      const double v = u(rng);
      const double mag = -std::log1p(-2.0 * std::abs(v));
      return v < 0.0 ? -mag : mag;
    }
    case Distribution::kBernoulliSign: {
      std::bernoulli_distribution b(0.5);
      return b(rng) ? 1.0 : -1.0;
    }
    case Distribution::kGaussian:
      break;
  }
  throw InvalidArgumentError("gaussian innovations are not separable");
}

}  // namespace

GeneratedSources generate_sources(const InnovationSpec &params,
                                  Eigen::Index length, Eigen::Index count) {
  if (count < 1) throw InvalidArgumentError("need at least one source");
  if (static_cast<Eigen::Index>(params.distributions.size()) != count)
    throw DimensionError("one distribution per source required");
  if (static_cast<Eigen::Index>(params.coloring_filters.size()) != count)
    throw DimensionError("one coloring filter per source required");
  for (Distribution d : params.distributions)
    if (d == Distribution::kGaussian)
      throw InvalidArgumentError(
          "gaussian innovations are not separable; pick a non-gaussian family");
  const std::size_t taps = params.coloring_filters.front().size();
  if (taps % 2 == 0)
    throw InvalidArgumentError("coloring filters must have odd length 2R-1");
  if (length <= static_cast<Eigen::Index>(taps))
    throw InsufficientDataError("length must exceed the coloring filter length");

  std::mt19937_64 rng(params.seed);
  Matrix u(count, length);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index k = 0; k < length; ++k)
      u(i, k) = Draw(params.distributions[i], rng);
    const double mean = u.row(i).mean();
    u.row(i).array() -= mean;
    const double sd = std::sqrt(u.row(i).squaredNorm() / double(length));
    if (!(sd > 0.0)) throw NumericError("degenerate innovation draw");
    u.row(i) /= sd;
  }

  MultichannelSignal innovations(std::move(u));
  // Tap t of the causal realization is F(t - R + 1): a bulk delay of R-1.
  MultichannelSignal sources =
      apply_mimo_fir(MimoFirFilter::Diagonal(params.coloring_filters), innovations);
  return {std::move(innovations), std::move(sources)};
}

StackedSignal delay_embed(const MultichannelSignal &input, Eigen::Index order) {
  if (order < 1) throw InvalidArgumentError("embedding order must be >= 1");
  if (input.channels() < 1) throw DimensionError("cannot embed an empty signal");
  const Eigen::Index len = input.length();
  if (len < order)
    throw InsufficientDataError("signal of " + std::to_string(len) +
                                " samples is shorter than embedding order " +
                                std::to_string(order));
  const Eigen::Index frames = len - order + 1;
  const Eigen::Index n = input.channels();
  Matrix data(n * order, frames);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < order; ++d)
      data.row(i * order + d) = input.samples().row(i).segment(order - 1 - d, frames);
  return StackedSignal(std::move(data), n, order);
}

}  // namespace convbss
