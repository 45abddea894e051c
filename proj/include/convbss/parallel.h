// convbss/parallel.h

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

#ifndef CONVBSS_PARALLEL_H_
#define CONVBSS_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace convbss {

/// Worker cap: CONVBSS_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t MaxThreads();

/// Runs body(i) for i in [0, count). Each index is handled by exactly one
/// worker, so results written to slot i are independent of the thread count.
/// The first exception thrown by any body is rethrown on the caller.
void ParallelFor(std::size_t count, const std::function<void(std::size_t)> &body);

}  // namespace convbss

#endif  // CONVBSS_PARALLEL_H_
