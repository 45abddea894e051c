// convbss/reconstruction.h

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

#ifndef CONVBSS_RECONSTRUCTION_H_
#define CONVBSS_RECONSTRUCTION_H_

#include <vector>

#include "convbss/signal.h"

namespace convbss {

inline constexpr double kPseudoInverseCutoff = 1e-10;

/// (N + 2L) x (2L + 1) Toeplitz matrix; column c holds y starting at row c,
/// zero elsewhere.
class ShiftMatrix {
 public:
  ShiftMatrix(const Vector &y, Eigen::Index half_width);

  Eigen::Index half_width() const { return half_width_; }
  Eigen::Index signal_length() const { return length_; }
  const Matrix &data() const { return data_; }

 private:
  Matrix data_;
  Eigen::Index half_width_;
  Eigen::Index length_;
};

struct Regression {
  Vector contribution;  // length N
  double residual = 0.0;  // ||T beta - x_pad|| / ||x_pad||, 0 when x is zero
};

/// Contributions[i][j] is output i's share of observation j.
struct ContributionSet {
  std::vector<std::vector<Vector>> contributions;
  Matrix residual;  // m x n

  Eigen::Index sources() const { return residual.rows(); }
  Eigen::Index observations() const { return residual.cols(); }
};

ShiftMatrix build_shift_matrix(const Vector &y, Eigen::Index half_width);

/// Least-squares fit of the zero-padded observation onto the columns of T
/// (SVD pseudo-inverse, relative cutoff 1e-10); returns the centre N samples.
Regression regress_contribution(const ShiftMatrix &shifts, const Vector &x);

ContributionSet reconstruct_all(const MultichannelSignal &outputs,
                                const MultichannelSignal &observations,
                                Eigen::Index half_width);

}  // namespace convbss

#endif  // CONVBSS_RECONSTRUCTION_H_
