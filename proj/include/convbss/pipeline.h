// convbss/pipeline.h

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

#ifndef CONVBSS_PIPELINE_H_
#define CONVBSS_PIPELINE_H_

#include "convbss/separation.h"
#include "convbss/signal.h"
#include "convbss/whitening.h"

namespace convbss {

/// Everything produced between raw observations and separated outputs.
struct SeparationResult {
  WhiteningModel whitening;
  StackedSignal whitened;
  LaggedCorrelationSet correlations;
  SeparationModel model;
  MultichannelSignal outputs;
  /// Output sample c lines up with observation sample c + frame_offset.
  Eigen::Index frame_offset = 0;
};

/// embed -> whiten -> lagged correlations -> separation -> outputs.
SeparationResult separate_observations(
    const MultichannelSignal &observations, const SeparationConfig &config,
    Eigen::Index sources, double eigenvalue_floor = kDefaultEigenvalueFloor);

/// Drops the first `offset` samples of every channel.
MultichannelSignal crop_front(const MultichannelSignal &signal,
                              Eigen::Index offset);

}  // namespace convbss

#endif  // CONVBSS_PIPELINE_H_
