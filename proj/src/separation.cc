// separation.cc

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

#include "convbss/separation.h"

#include <cmath>
#include <random>
#include <string>

#include "convbss/error.h"

namespace convbss {

std::string ToString(SeparationMode mode) {
  return mode == SeparationMode::kDeflation ? "deflation" : "symmetric";
}

SeparationMode SeparationModeFromString(const std::string &name) {
  if (name == "deflation") return SeparationMode::kDeflation;
  if (name == "symmetric") return SeparationMode::kSymmetric;
  throw InvalidArgumentError("unknown mode '" + name + "'");
}

std::string ToString(StopNorm norm) {
  return norm == StopNorm::kSpectral ? "spectral" : "max-abs";
}

StopNorm StopNormFromString(const std::string &name) {
  if (name == "spectral") return StopNorm::kSpectral;
  if (name == "max-abs") return StopNorm::kMaxAbs;
  throw InvalidArgumentError("unknown stop norm '" + name + "'");
}

void SeparationConfig::Validate() const {
  if (embed_order < 1) throw InvalidArgumentError("embed order Q must be >= 1");
  if (lag_window && *lag_window < 0)
    throw InvalidArgumentError("lag window L must be >= 0");
  if (!(rank_threshold > 0.0 && rank_threshold <= 1.0))
    throw InvalidArgumentError("rank threshold alpha must lie in (0, 1]");
  if (!(tol > 0.0)) throw InvalidArgumentError("tol must be positive");
  if (max_iter < 1) throw InvalidArgumentError("max_iter must be >= 1");
  if (max_restarts < 0) throw InvalidArgumentError("max_restarts must be >= 0");
  if (damping_window < 1)
    throw InvalidArgumentError("damping window must be >= 1");
}

bool SeparationModel::converged() const {
  for (const RowReport &r : reports)
    if (!r.converged) return false;
  return true;
}

Vector fixed_point_update(const Vector &w, const StackedSignal &whitened,
                          const Nonlinearity &nl) {
  if (w.size() != whitened.dimension())
    throw DimensionError("w has " + std::to_string(w.size()) +
                         " entries, data dimension is " +
                         std::to_string(whitened.dimension()));
  if (std::abs(w.norm() - 1.0) > 1e-6)
    throw InvalidArgumentError("fixed-point update expects a unit vector");
  const Eigen::Index frames = whitened.frames();
  if (frames == 0) throw InsufficientDataError("no frames");

  const Matrix &v = whitened.data();
  const Vector y = v.transpose() * w;
  Vector gy(frames);
  double mean_gp = 0.0;
  for (Eigen::Index k = 0; k < frames; ++k) {
    gy(k) = nl.g(y(k));
    mean_gp += nl.g_prime(y(k));
  }
  mean_gp /= double(frames);
  Vector next = (v * gy) / double(frames) - mean_gp * w;
  if (!next.allFinite())
    throw NumericError("fixed-point update produced non-finite values");
  return next;
}

Matrix build_constraint_block(const LaggedCorrelationSet &correlations,
                              const Matrix &W, Eigen::Index row,
                              SeparationMode mode) {
  if (row < 0 || row >= W.rows())
    throw InvalidArgumentError("row index out of range");
  if (W.cols() != correlations.dimension())
    throw DimensionError("W width does not match correlation dimension");
  std::vector<Eigen::Index> others;
  if (mode == SeparationMode::kDeflation) {
    for (Eigen::Index j = 0; j < row; ++j) others.push_back(j);
  } else {
    for (Eigen::Index j = 0; j < W.rows(); ++j)
      if (j != row && !W.row(j).isZero(0.0)) others.push_back(j);
  }
  const Eigen::Index lags = 2 * correlations.half_width() + 1;
  Matrix block(W.cols(), static_cast<Eigen::Index>(others.size()) * lags);
  Eigen::Index col = 0;
  for (Eigen::Index j : others) {
    const Vector wj = W.row(j).transpose();
    for (Eigen::Index l = -correlations.half_width();
         l <= correlations.half_width(); ++l) {
      // R(-l) = R(l)^T, so avoid materializing the transpose.
      if (l >= 0)
        block.col(col++) = correlations.nonnegative(l) * wj;
      else
        block.col(col++) = correlations.nonnegative(-l).transpose() * wj;
    }
  }
  return block;
}

Vector effective_rank_profile(const Vector &singular_values) {
  Vector mu(singular_values.size());
  double cumulative = 0.0;
  for (Eigen::Index r = 0; r < singular_values.size(); ++r) {
    cumulative += singular_values(r) * singular_values(r);
    mu(r) = cumulative;
  }
  if (mu.size() == 0 || !(cumulative > 0.0)) return Vector::Zero(mu.size());
  const double total = std::sqrt(cumulative);
  for (Eigen::Index r = 0; r < mu.size(); ++r) mu(r) = std::sqrt(mu(r)) / total;
  return mu;
}

ConstraintBasis effective_rank_basis(const Matrix &block, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InvalidArgumentError("alpha must lie in (0, 1]");
  ConstraintBasis out;
  out.basis = Matrix(block.rows(), 0);
  out.singular_values = Vector(0);
  if (block.cols() == 0 || block.rows() == 0) return out;
  if (!block.allFinite()) throw NumericError("constraint block is not finite");

  Eigen::BDCSVD<Matrix> svd(block, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success)
    throw NumericError("SVD of the constraint block failed");
  out.singular_values = svd.singularValues();
  if (!(out.singular_values(0) > 0.0)) return out;

  const Vector mu = effective_rank_profile(out.singular_values);
  Eigen::Index r = mu.size();
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu(i) >= alpha) {
      r = i + 1;
      break;
    }
  }
  out.rank = r;
  out.basis = svd.matrixU().leftCols(r);
  return out;
}

Vector project_out(const Vector &w, const ConstraintBasis &basis) {
  if (basis.basis.rows() != w.size())
    throw DimensionError("basis and vector dimensions differ");
  Vector out = w;
  if (basis.rank > 0) out -= basis.basis * (basis.basis.transpose() * w);
  if (out.norm() < 1e-12)
    throw DegenerateDirectionError("direction lies in the constraint span");
  return out;
}

double symmetric_convergence_metric(const Matrix &previous,
                                    const Matrix &current, StopNorm norm) {
  if (previous.rows() != current.rows() || previous.cols() != current.cols())
    throw DimensionError("separating matrices differ in shape");
  const Eigen::Index m = current.rows();
  if (m == 0) return 0.0;
  const Matrix d =
      (previous * current.transpose()).cwiseAbs() - Matrix::Identity(m, m);
  if (norm == StopNorm::kMaxAbs) return d.cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<Matrix> svd(d);
  return svd.singularValues()(0);
}

namespace {

Vector RandomUnit(Eigen::Index dim, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector w(dim);
  do {
    for (Eigen::Index i = 0; i < dim; ++i) w(i) = normal(rng);
  } while (w.norm() == 0.0);
  return w.normalized();
}

// Watches a stop statistic; flips to damped once it has failed to decrease
// for `window` consecutive iterations.
class OscillationGuard {
 public:
  explicit OscillationGuard(int window) : window_(window) {}
  void Observe(double residual) {
    stalled_ = residual >= last_ ? stalled_ + 1 : 0;
    last_ = residual;
    if (stalled_ >= window_) damped_ = true;
  }
  void Reset() {
    last_ = INFINITY;
    stalled_ = 0;
    damped_ = false;
  }
  bool damped() const { return damped_; }

 private:
  int window_;
  double last_ = INFINITY;
  int stalled_ = 0;
  bool damped_ = false;
};

// Average with the previous iterate (sign-aligned) and renormalize.
Vector Damp(const Vector &next, const Vector &previous) {
  const double sign = next.dot(previous) < 0.0 ? -1.0 : 1.0;
  const Vector mid = next + sign * previous;
  const double n = mid.norm();
  return n < 1e-12 ? next : Vector(mid / n);
}

void CheckInputs(const StackedSignal &whitened,
                 const LaggedCorrelationSet &correlations,
                 const SeparationConfig &config, Eigen::Index m) {
  config.Validate();
  if (m < 1) throw InvalidArgumentError("number of sources must be >= 1");
  if (correlations.dimension() != whitened.dimension())
    throw DimensionError("correlations and data dimensions differ");
}

}  // namespace

SeparationModel run_deflation(const StackedSignal &whitened,
                              const LaggedCorrelationSet &correlations,
                              const SeparationConfig &config, Eigen::Index m) {
  CheckInputs(whitened, correlations, config, m);
  const Nonlinearity nl(config.nonlinearity);
  const Eigen::Index dim = whitened.dimension();
  std::mt19937_64 rng(config.seed);

  SeparationModel model;
  model.config = config;
  model.W = Matrix::Zero(m, dim);
  model.reports.resize(m);

  for (Eigen::Index row = 0; row < m; ++row) {
    RowReport &report = model.reports[row];
    // Constraints only involve rows that are already fixed.
    const ConstraintBasis basis = effective_rank_basis(
        build_constraint_block(correlations, model.W, row,
                               SeparationMode::kDeflation),
        config.rank_threshold);
    OscillationGuard guard(config.damping_window);
    Vector w = RandomUnit(dim, rng);
    for (int it = 1; it <= config.max_iter; ++it) {
      report.iterations = it;
      const Vector previous = w;
      Vector next;
      try {
        next = project_out(fixed_point_update(w, whitened, nl), basis);
      } catch (const DegenerateDirectionError &e) {
        if (++report.restarts > config.max_restarts)
          throw ExtractionFailure(static_cast<std::size_t>(row), e.what());
        w = RandomUnit(dim, rng);
        guard.Reset();
        continue;
      }
      next.normalize();
      if (guard.damped()) next = Damp(next, previous);
      const double residual = std::abs(std::abs(next.dot(previous)) - 1.0);
      guard.Observe(residual);
      report.damped = report.damped || guard.damped();
      report.residual = residual;
      w = next;
      if (residual <= config.tol) {
        report.converged = true;
        break;
      }
    }
    model.W.row(row) = w.transpose();
  }
  return model;
}

SeparationModel run_symmetric(const StackedSignal &whitened,
                              const LaggedCorrelationSet &correlations,
                              const SeparationConfig &config, Eigen::Index m) {
  CheckInputs(whitened, correlations, config, m);
  const Nonlinearity nl(config.nonlinearity);
  const Eigen::Index dim = whitened.dimension();
  std::mt19937_64 rng(config.seed);

  SeparationModel model;
  model.config = config;
  model.W = Matrix(m, dim);
  model.reports.resize(m);
  for (Eigen::Index i = 0; i < m; ++i)
    model.W.row(i) = RandomUnit(dim, rng).transpose();

  OscillationGuard guard(config.damping_window);
  bool converged = false;
  for (int sweep = 1; sweep <= config.max_iter && !converged; ++sweep) {
    const Matrix previous = model.W;
    for (Eigen::Index i = 0; i < m; ++i) {
      RowReport &report = model.reports[i];
      // Every other row moves between sweeps, so the basis is rebuilt here.
      const ConstraintBasis basis = effective_rank_basis(
          build_constraint_block(correlations, model.W, i,
                                 SeparationMode::kSymmetric),
          config.rank_threshold);
      Vector w = model.W.row(i).transpose();
      Vector next;
      for (;;) {
        try {
          next = project_out(fixed_point_update(w, whitened, nl), basis);
          break;
        } catch (const DegenerateDirectionError &e) {
          if (++report.restarts > config.max_restarts)
            throw ExtractionFailure(static_cast<std::size_t>(i), e.what());
          w = RandomUnit(dim, rng);
        }
      }
      next.normalize();
      if (guard.damped()) next = Damp(next, previous.row(i).transpose());
      model.W.row(i) = next.transpose();
    }
    const double metric =
        symmetric_convergence_metric(previous, model.W, config.stop_norm);
    guard.Observe(metric);
    converged = metric <= config.tol;
    for (Eigen::Index i = 0; i < m; ++i) {
      RowReport &report = model.reports[i];
      report.iterations = sweep;
      report.residual = std::abs(std::abs(previous.row(i).dot(model.W.row(i))) - 1.0);
      report.damped = guard.damped();
    }
  }
  for (RowReport &report : model.reports) report.converged = converged;
  return model;
}

SeparationModel run_separation(const StackedSignal &whitened,
                               const LaggedCorrelationSet &correlations,
                               const SeparationConfig &config, Eigen::Index m) {
  return config.mode == SeparationMode::kDeflation
             ? run_deflation(whitened, correlations, config, m)
             : run_symmetric(whitened, correlations, config, m);
}

MultichannelSignal extract_outputs(const SeparationModel &model,
                                   const StackedSignal &whitened) {
  if (model.W.rows() == 0) return MultichannelSignal();
  if (model.W.cols() != whitened.dimension())
    throw DimensionError("separating matrix width " +
                         std::to_string(model.W.cols()) +
                         " does not match data dimension " +
                         std::to_string(whitened.dimension()));
  return MultichannelSignal(model.W * whitened.data());
}

double negentropy_proxy(const Vector &y, const Nonlinearity &nl,
                        double gaussian_reference) {
  if (y.size() == 0) throw InsufficientDataError("no samples");
  double mean = 0.0;
  for (Eigen::Index k = 0; k < y.size(); ++k) mean += nl.G(y(k));
  mean /= double(y.size());
  const double d = mean - gaussian_reference;
  return d * d;
}

double negentropy_proxy(const Vector &y, const Nonlinearity &nl) {
  return negentropy_proxy(y, nl, nl.gaussian_reference());
}

}  // namespace convbss
