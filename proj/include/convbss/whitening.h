// convbss/whitening.h

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

#ifndef CONVBSS_WHITENING_H_
#define CONVBSS_WHITENING_H_

#include <vector>

#include "convbss/signal.h"

namespace convbss {

inline constexpr double kDefaultEigenvalueFloor = 1e-10;

/// Affine map v = H (x - mean) taking stacked observations to unit
/// covariance. Rows of H are ordered by decreasing data variance.
struct WhiteningModel {
  Vector mean;
  Matrix transform;
  /// Eigenvalues of the fitting covariance, decreasing, before clamping.
  Vector eigenvalues;
  /// Number of eigenvalues raised to the relative floor.
  Eigen::Index clamped = 0;

  Eigen::Index dimension() const { return mean.size(); }
};

/// Sample correlations R(l) = E{v(k) v(k-l)^T} of whitened frames for
/// l = -L..L. Negative lags are exact transposes of the positive ones.
class LaggedCorrelationSet {
 public:
  LaggedCorrelationSet(Eigen::Index half_width, std::vector<Matrix> nonnegative);

  Eigen::Index half_width() const { return half_width_; }
  Eigen::Index dimension() const { return positive_.front().rows(); }
  /// R(lag) for -L <= lag <= L.
  Matrix at(Eigen::Index lag) const;
  /// R(lag) for 0 <= lag <= L, without a copy.
  const Matrix &nonnegative(Eigen::Index lag) const { return positive_.at(lag); }

 private:
  Eigen::Index half_width_;
  std::vector<Matrix> positive_;
};

/// Eigen-decomposition whitening of the frame covariance (divisor M).
/// Eigenvalues below eigenvalue_floor * max are raised to that value so the
/// output dimension stays nQ.
WhiteningModel fit_whitener(const StackedSignal &stacked,
                            double eigenvalue_floor = kDefaultEigenvalueFloor);

StackedSignal apply_whitener(const WhiteningModel &model,
                             const StackedSignal &stacked);

/// R(l) = 1/(M-l) sum_k v(k) v(k-l)^T over the overlapping frames.
LaggedCorrelationSet compute_lagged_correlations(const StackedSignal &whitened,
                                                 Eigen::Index half_width);

/// Max-abs deviation of the (mean-removed) frame covariance from identity.
double whiteness_error(const StackedSignal &whitened);

}  // namespace convbss

#endif  // CONVBSS_WHITENING_H_
