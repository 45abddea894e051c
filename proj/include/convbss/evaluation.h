// convbss/evaluation.h

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

#ifndef CONVBSS_EVALUATION_H_
#define CONVBSS_EVALUATION_H_

#include <vector>

#include "convbss/signal.h"

namespace convbss {

inline constexpr double kSirCapDb = 99.0;

struct LagCorrelation {
  Eigen::Index lag = 0;   // b(k + lag) best matches a(k)
  double value = 0.0;     // |normalized correlation| in [0, 1]
  int sign = 1;
};

struct SourceMatch {
  Eigen::Index output = 0;  // output channel assigned to this truth
  Eigen::Index lag = 0;     // output(k) best matches truth(k - lag)
  double correlation = 0.0;
  int sign = 1;
  double sir_db = 0.0;
};

/// One entry per ground-truth channel, in truth order.
struct MatchReport {
  std::vector<SourceMatch> per_source;

  /// permutation()[j] is the output matched to truth j.
  std::vector<Eigen::Index> permutation() const;
  double min_correlation() const;
};

/// Best |corr| between a(k) and b(k + lag) over |lag| <= max_lag, each
/// overlapping segment mean-removed and normalized. A positive lag means b
/// is a delayed copy of a.
LagCorrelation max_lag_correlation(const Vector &a, const Vector &b,
                                   Eigen::Index max_lag);

/// 10 log10(c^2 / (1 - c^2)), capped at 99 dB.
double sir_from_correlation(double c);

/// Greedy assignment of outputs to truths by descending lag-matched
/// correlation.
MatchReport match_sources(const MultichannelSignal &outputs,
                          const MultichannelSignal &truths,
                          Eigen::Index max_lag);

/// Off-diagonal-block share of the Frobenius energy of the stacked lagged
/// correlation matrix of the outputs (each channel embedded over lags
/// -L..L). Zero when all cross-channel lagged correlations vanish.
double diagonalization_error(const MultichannelSignal &outputs,
                             Eigen::Index half_width);

}  // namespace convbss

#endif  // CONVBSS_EVALUATION_H_
