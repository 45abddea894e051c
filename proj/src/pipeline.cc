// pipeline.cc

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

#include "convbss/pipeline.h"

#include "convbss/error.h"

namespace convbss {

SeparationResult separate_observations(const MultichannelSignal &observations,
                                       const SeparationConfig &config,
                                       Eigen::Index sources,
                                       double eigenvalue_floor) {
  config.Validate();
  const StackedSignal stacked = delay_embed(observations, config.embed_order);
  WhiteningModel whitening = fit_whitener(stacked, eigenvalue_floor);
  StackedSignal whitened = apply_whitener(whitening, stacked);
  LaggedCorrelationSet correlations =
      compute_lagged_correlations(whitened, config.effective_lag_window());
  SeparationModel model = run_separation(whitened, correlations, config, sources);
  MultichannelSignal outputs(extract_outputs(model, whitened).samples(),
                             observations.sample_rate());
  return {std::move(whitening), std::move(whitened), std::move(correlations),
          std::move(model), std::move(outputs), config.embed_order - 1};
}

MultichannelSignal crop_front(const MultichannelSignal &signal,
                              Eigen::Index offset) {
  if (offset < 0 || offset >= signal.length())
    throw InsufficientDataError("crop offset exceeds signal length");
  return MultichannelSignal(signal.samples().rightCols(signal.length() - offset),
                            signal.sample_rate());
}

}  // namespace convbss
