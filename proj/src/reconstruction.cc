// reconstruction.cc

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

#include "convbss/reconstruction.h"

#include <string>

#include "convbss/error.h"
#include "convbss/parallel.h"

namespace convbss {

ShiftMatrix::ShiftMatrix(const Vector &y, Eigen::Index half_width)
    : half_width_(half_width), length_(y.size()) {
  if (length_ < 1) throw InsufficientDataError("shift matrix needs samples");
  if (half_width_ < 0) throw InvalidArgumentError("half width must be >= 0");
  if (!y.allFinite()) throw NumericError("signal is not finite");
  const Eigen::Index cols = 2 * half_width_ + 1;
  data_ = Matrix::Zero(length_ + 2 * half_width_, cols);
  for (Eigen::Index c = 0; c < cols; ++c) data_.col(c).segment(c, length_) = y;
}

ShiftMatrix build_shift_matrix(const Vector &y, Eigen::Index half_width) {
  return ShiftMatrix(y, half_width);
}

namespace {

// One decomposition of T serves every observation regressed onto it.
class ShiftSolver {
 public:
  explicit ShiftSolver(const ShiftMatrix &shifts) : shifts_(shifts) {
    if (shifts.data().col(0).isZero(0.0))
      throw NumericError("shift space of an all-zero signal is degenerate");
    svd_.setThreshold(kPseudoInverseCutoff);
    svd_.compute(shifts.data(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd_.info() != Eigen::Success)
      throw NumericError("SVD of the shift matrix failed");
  }

  Regression Solve(const Vector &x) const {
    const Eigen::Index n = shifts_.signal_length();
    const Eigen::Index half = shifts_.half_width();
    if (x.size() != n)
      throw DimensionError("observation has " + std::to_string(x.size()) +
                           " samples, shift matrix expects " + std::to_string(n));
    Vector padded = Vector::Zero(n + 2 * half);
    padded.segment(half, n) = x;
    const Vector beta = svd_.solve(padded);
    const Vector fitted = shifts_.data() * beta;
    Regression out;
    out.contribution = fitted.segment(half, n);
    const double norm = padded.norm();
    out.residual = norm > 0.0 ? (fitted - padded).norm() / norm : 0.0;
    return out;
  }

 private:
  const ShiftMatrix &shifts_;
  Eigen::BDCSVD<Matrix> svd_;
};

}  // namespace

Regression regress_contribution(const ShiftMatrix &shifts, const Vector &x) {
  return ShiftSolver(shifts).Solve(x);
}

ContributionSet reconstruct_all(const MultichannelSignal &outputs,
                                const MultichannelSignal &observations,
                                Eigen::Index half_width) {
  if (outputs.length() != observations.length())
    throw DimensionError("outputs (" + std::to_string(outputs.length()) +
                         " samples) and observations (" +
                         std::to_string(observations.length()) +
                         " samples) are not time-aligned");
  const Eigen::Index m = outputs.channels();
  const Eigen::Index n = observations.channels();
  ContributionSet set;
  set.contributions.assign(m, std::vector<Vector>(n));
  set.residual = Matrix::Zero(m, n);
  ParallelFor(static_cast<std::size_t>(m), [&](std::size_t i) {
    const ShiftMatrix shifts(outputs.samples().row(i).transpose(), half_width);
    const ShiftSolver solver(shifts);
    for (Eigen::Index j = 0; j < n; ++j) {
      Regression r = solver.Solve(observations.samples().row(j).transpose());
      set.contributions[i][j] = std::move(r.contribution);
      set.residual(i, j) = r.residual;
    }
  });
  return set;
}

}  // namespace convbss
