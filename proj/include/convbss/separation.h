// convbss/separation.h

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

// Fixed-point negentropy maximization on whitened, delay-embedded data.
//
// Each separating row w_i acts on the whitened frame v(k) and produces
// y_i(k) = w_i^T v(k). Rows are kept apart by requiring w_i^T R(l) w_j = 0
// for the other rows j and |l| <= L. That requirement is enforced by
// projecting w_i off the dominant left singular subspace of the block
// [R(-L) w_j, ..., R(L) w_j, ...]; the dominant part is the smallest prefix
// of singular values holding a fraction alpha of the Frobenius norm.
//
// Deflation extracts rows one after another against the rows already fixed.
// Symmetric mode sweeps over all rows, each constrained against all others.

#ifndef CONVBSS_SEPARATION_H_
#define CONVBSS_SEPARATION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "convbss/nonlinearity.h"
#include "convbss/signal.h"
#include "convbss/whitening.h"

namespace convbss {

enum class SeparationMode { kDeflation, kSymmetric };

/// Matrix norm used by the symmetric stop rule on |W' W^T| - I.
enum class StopNorm { kSpectral, kMaxAbs };

std::string ToString(SeparationMode mode);
SeparationMode SeparationModeFromString(const std::string &name);
std::string ToString(StopNorm norm);
StopNorm StopNormFromString(const std::string &name);

inline constexpr double kDefaultRankThreshold = 0.99995;
inline constexpr double kDefaultTolerance = 1e-7;
inline constexpr int kDefaultMaxIterations = 500;
inline constexpr Eigen::Index kDefaultEmbedOrder = 20;

struct SeparationConfig {
  Eigen::Index embed_order = kDefaultEmbedOrder;
  /// Correlation half-window L; 2 * embed_order when unset.
  std::optional<Eigen::Index> lag_window;
  double rank_threshold = kDefaultRankThreshold;
  double tol = kDefaultTolerance;
  int max_iter = kDefaultMaxIterations;
  SeparationMode mode = SeparationMode::kDeflation;
  NonlinearityKind nonlinearity = NonlinearityKind::kTanh;
  std::uint64_t seed = 0;
  StopNorm stop_norm = StopNorm::kSpectral;
  /// Re-randomizations allowed per row when the projection absorbs w.
  int max_restarts = 5;
  /// Iterations of non-decreasing residual before damping kicks in.
  int damping_window = 20;

  Eigen::Index effective_lag_window() const {
    return lag_window.value_or(2 * embed_order);
  }
  /// Throws InvalidArgumentError on out-of-domain fields.
  void Validate() const;
};

/// Orthonormal basis (nQ x r) of the dominant constraint subspace.
struct ConstraintBasis {
  Matrix basis;
  Eigen::Index rank = 0;
  /// Every singular value of the block, non-increasing.
  Vector singular_values;
};

struct RowReport {
  int iterations = 0;
  /// Last value of the stop statistic for this row.
  double residual = 0.0;
  bool converged = false;
  int restarts = 0;
  bool damped = false;
};

struct SeparationModel {
  Matrix W;  // m x nQ, unit rows
  std::vector<RowReport> reports;
  SeparationConfig config;

  Eigen::Index sources() const { return W.rows(); }
  bool converged() const;
};

/// E{v g(w^T v)} - E{g'(w^T v)} w over all frames. Not normalized.
Vector fixed_point_update(const Vector &w, const StackedSignal &whitened,
                          const Nonlinearity &nl);

/// Columns R(l) w_j, j-major with l ascending from -L to L.
/// Deflation uses the rows j < row; symmetric uses every j != row whose
/// current W row is nonzero. `row` is zero-based.
Matrix build_constraint_block(const LaggedCorrelationSet &correlations,
                              const Matrix &W, Eigen::Index row,
                              SeparationMode mode);

/// Leading left singular vectors of `block`: r is the smallest count with
/// sqrt(s_1^2 + ... + s_r^2) / ||s|| >= alpha. Empty or zero blocks give r = 0.
ConstraintBasis effective_rank_basis(const Matrix &block, double alpha);

/// The cumulative energy ratios mu(1), ..., mu(p) of a singular spectrum.
Vector effective_rank_profile(const Vector &singular_values);

/// w - U U^T w. Throws DegenerateDirectionError when the result has norm
/// below 1e-12.
Vector project_out(const Vector &w, const ConstraintBasis &basis);

/// || |previous * current^T| - I || in the requested norm.
double symmetric_convergence_metric(const Matrix &previous,
                                    const Matrix &current, StopNorm norm);

SeparationModel run_deflation(const StackedSignal &whitened,
                              const LaggedCorrelationSet &correlations,
                              const SeparationConfig &config, Eigen::Index m);

SeparationModel run_symmetric(const StackedSignal &whitened,
                              const LaggedCorrelationSet &correlations,
                              const SeparationConfig &config, Eigen::Index m);

/// Dispatches on config.mode.
SeparationModel run_separation(const StackedSignal &whitened,
                               const LaggedCorrelationSet &correlations,
                               const SeparationConfig &config, Eigen::Index m);

/// y(k) = W v(k): m channels, one sample per frame.
MultichannelSignal extract_outputs(const SeparationModel &model,
                                   const StackedSignal &whitened);

/// (E{G(y)} - E{G(z)})^2, the negentropy approximation without its constant.
double negentropy_proxy(const Vector &y, const Nonlinearity &nl,
                        double gaussian_reference);
double negentropy_proxy(const Vector &y, const Nonlinearity &nl);

}  // namespace convbss

#endif  // CONVBSS_SEPARATION_H_
