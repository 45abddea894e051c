// evaluation.cc

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

#include "convbss/evaluation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "convbss/error.h"
#include "convbss/parallel.h"

namespace convbss {

std::vector<Eigen::Index> MatchReport::permutation() const {
  std::vector<Eigen::Index> p;
  for (const SourceMatch &s : per_source) p.push_back(s.output);
  return p;
}

double MatchReport::min_correlation() const {
  double c = per_source.empty() ? 0.0 : 1.0;
  for (const SourceMatch &s : per_source) c = std::min(c, s.correlation);
  return c;
}

LagCorrelation max_lag_correlation(const Vector &a, const Vector &b,
                                   Eigen::Index max_lag) {
  if (max_lag < 0) throw InvalidArgumentError("max lag must be >= 0");
  if (a.size() < max_lag + 2 || b.size() < max_lag + 2)
    throw InsufficientDataError("signals must be longer than max_lag + 1");
  auto variance_free = [](const Vector &x) {
    return (x.array() - x.mean()).matrix().squaredNorm() == 0.0;
  };
  if (variance_free(a) || variance_free(b))
    throw NumericError("correlation undefined for a zero-variance signal");

  LagCorrelation best;
  best.value = -1.0;
  for (Eigen::Index lag = -max_lag; lag <= max_lag; ++lag) {
    // Pair a(k) with b(k + lag) for every k where both exist.
    const Eigen::Index a_start = std::max<Eigen::Index>(0, -lag);
    const Eigen::Index a_end = std::min(a.size(), b.size() - lag);
    const Eigen::Index len = a_end - a_start;
    if (len < 2) continue;
    Vector sa = a.segment(a_start, len);
    Vector sb = b.segment(a_start + lag, len);
    sa.array() -= sa.mean();
    sb.array() -= sb.mean();
    const double denom = sa.norm() * sb.norm();
    if (denom == 0.0) continue;
    const double c = sa.dot(sb) / denom;
    if (std::abs(c) > best.value) {
      best.value = std::abs(c);
      best.lag = lag;
      best.sign = c < 0.0 ? -1 : 1;
    }
  }
  if (best.value < 0.0)
    throw NumericError("no lag with a defined correlation");
  best.value = std::min(best.value, 1.0);
  return best;
}

double sir_from_correlation(double c) {
  const double c2 = c * c;
  if (c2 >= 1.0) return kSirCapDb;
  if (c2 == 0.0) return -kSirCapDb;
  return std::clamp(10.0 * std::log10(c2 / (1.0 - c2)), -kSirCapDb, kSirCapDb);
}

MatchReport match_sources(const MultichannelSignal &outputs,
                          const MultichannelSignal &truths,
                          Eigen::Index max_lag) {
  const Eigen::Index m = outputs.channels();
  if (m != truths.channels())
    throw DimensionError("need as many outputs as truths");
  std::vector<LagCorrelation> table(static_cast<std::size_t>(m * m));
  ParallelFor(table.size(), [&](std::size_t idx) {
    const Eigen::Index i = static_cast<Eigen::Index>(idx) / m;
    const Eigen::Index j = static_cast<Eigen::Index>(idx) % m;
    table[idx] = max_lag_correlation(outputs.samples().row(i).transpose(),
                                     truths.samples().row(j).transpose(),
                                     max_lag);
  });

  MatchReport report;
  report.per_source.resize(m);
  std::vector<bool> used_output(m, false), used_truth(m, false);
  for (Eigen::Index step = 0; step < m; ++step) {
    double best = -1.0;
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (used_output[i]) continue;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (used_truth[j]) continue;
        if (table[i * m + j].value > best) {
          best = table[i * m + j].value;
          bi = i;
          bj = j;
        }
      }
    }
    used_output[bi] = used_truth[bj] = true;
    const LagCorrelation &c = table[bi * m + bj];
    // max_lag_correlation(output, truth) reports truth(k + lag) ~ output(k);
    // store the delay of the output relative to the truth.
    report.per_source[bj] = {bi, -c.lag, c.value, c.sign,
                             sir_from_correlation(c.value)};
  }
  return report;
}

double diagonalization_error(const MultichannelSignal &outputs,
                             Eigen::Index half_width) {
  const Eigen::Index m = outputs.channels();
  if (m < 2) throw InvalidArgumentError("diagonalization error needs m >= 2");
  if (half_width < 0) throw InvalidArgumentError("half width must be >= 0");
  const Eigen::Index width = 2 * half_width + 1;
  const Eigen::Index frames = outputs.length() - 2 * half_width;
  if (frames < 2)
    throw InsufficientDataError("need at least two frames of " +
                                std::to_string(width) + " samples");
  // Frame f is centred on sample f + L; row i*width + t holds y_i(f + 2L - t),
  // i.e. y_i(k+L), ..., y_i(k-L) for k = f + L.
  Matrix stacked(m * width, frames);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index t = 0; t < width; ++t)
      stacked.row(i * width + t) =
          outputs.samples().row(i).segment(2 * half_width - t, frames);
  const Matrix r = stacked * stacked.transpose() / double(frames);
  double total = 0.0, off = 0.0;
  for (Eigen::Index bi = 0; bi < m; ++bi) {
    for (Eigen::Index bj = 0; bj < m; ++bj) {
      const double e = r.block(bi * width, bj * width, width, width).squaredNorm();
      total += e;
      if (bi != bj) off += e;
    }
  }
  return total > 0.0 ? off / total : 0.0;
}

}  // namespace convbss
