// whitening.cc

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

#include "convbss/whitening.h"

#include <cmath>
#include <string>

#include "convbss/error.h"
#include "convbss/parallel.h"

namespace convbss {

LaggedCorrelationSet::LaggedCorrelationSet(Eigen::Index half_width,
                                           std::vector<Matrix> nonnegative)
    : half_width_(half_width), positive_(std::move(nonnegative)) {
  if (half_width_ < 0 ||
      static_cast<Eigen::Index>(positive_.size()) != half_width_ + 1)
    throw DimensionError("need one correlation matrix per lag 0..L");
}

Matrix LaggedCorrelationSet::at(Eigen::Index lag) const {
  if (lag < -half_width_ || lag > half_width_)
    throw InvalidArgumentError("lag " + std::to_string(lag) +
                               " outside the correlation window");
  if (lag >= 0) return positive_[lag];
  return positive_[-lag].transpose();
}

WhiteningModel fit_whitener(const StackedSignal &stacked,
                            double eigenvalue_floor) {
  if (!(eigenvalue_floor > 0.0))
    throw InvalidArgumentError("eigenvalue floor must be positive");
  const Eigen::Index dim = stacked.dimension();
  const Eigen::Index frames = stacked.frames();
  if (frames <= dim)
    throw InsufficientDataError("whitening needs more frames (" +
                                std::to_string(frames) + ") than dimensions (" +
                                std::to_string(dim) + ")");

  WhiteningModel model;
  model.mean = stacked.data().rowwise().mean();
  const Matrix centered = stacked.data().colwise() - model.mean;
  Matrix cov = Matrix::Zero(dim, dim);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0 / double(frames));
  cov = cov.selfadjointView<Eigen::Lower>();
  if (!cov.allFinite()) throw NumericError("frame covariance is not finite");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success)
    throw NumericError("eigendecomposition of the frame covariance failed");
  // Eigen returns ascending order; flip to principal-first.
  model.eigenvalues = eig.eigenvalues().reverse();
  const Matrix vectors = eig.eigenvectors().rowwise().reverse();
  const double largest = model.eigenvalues(0);
  if (!(largest > 0.0)) throw NumericError("frame covariance is zero");

  const double floor_value = eigenvalue_floor * largest;
  Vector scale(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    double lambda = model.eigenvalues(i);
    if (lambda < floor_value) {
      lambda = floor_value;
      ++model.clamped;
    }
    scale(i) = 1.0 / std::sqrt(lambda);
  }
  model.transform = scale.asDiagonal() * vectors.transpose();
  return model;
}

StackedSignal apply_whitener(const WhiteningModel &model,
                             const StackedSignal &stacked) {
  if (stacked.dimension() != model.dimension())
    throw DimensionError("whitener fitted for dimension " +
                         std::to_string(model.dimension()) + ", got " +
                         std::to_string(stacked.dimension()));
  if (stacked.frames() == 0) throw InsufficientDataError("no frames to whiten");
  Matrix v = model.transform * (stacked.data().colwise() - model.mean);
  return StackedSignal(std::move(v), stacked.channels(), stacked.order());
}

LaggedCorrelationSet compute_lagged_correlations(const StackedSignal &whitened,
                                                 Eigen::Index half_width) {
  if (half_width < 0) throw InvalidArgumentError("lag window must be >= 0");
  const Eigen::Index frames = whitened.frames();
  if (frames <= half_width + 1)
    throw InsufficientDataError("lag window " + std::to_string(half_width) +
                                " needs more than " +
                                std::to_string(half_width + 1) + " frames");
  const Matrix &v = whitened.data();
  std::vector<Matrix> positive(half_width + 1);
  ParallelFor(positive.size(), [&](std::size_t lag) {
    const Eigen::Index l = static_cast<Eigen::Index>(lag);
    const Eigen::Index overlap = frames - l;
    positive[lag] = (v.rightCols(overlap) * v.leftCols(overlap).transpose()) /
                    double(overlap);
  });
  return LaggedCorrelationSet(half_width, std::move(positive));
}

double whiteness_error(const StackedSignal &whitened) {
  if (whitened.frames() == 0) throw InsufficientDataError("no frames");
  const Matrix centered =
      whitened.data().colwise() - whitened.data().rowwise().mean();
  const Matrix cov =
      centered * centered.transpose() / double(whitened.frames());
  return (cov - Matrix::Identity(cov.rows(), cov.cols())).cwiseAbs().maxCoeff();
}

}  // namespace convbss
