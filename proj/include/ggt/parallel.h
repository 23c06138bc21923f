// Copyright 2026 The GGT Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GGT_PARALLEL_H_
#define GGT_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace ggt {

// Worker count: GGT_THREADS if set and positive, else hardware concurrency.
int DefaultThreadCount();

// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = default).
// Each index is processed exactly once; callers write results into
// per-index slots so output never depends on scheduling. If any call throws,
// the exception from the lowest failing index is rethrown.
void ParallelFor(size_t count, int threads, const std::function<void(size_t)>& fn);

}  // namespace ggt

#endif  // GGT_PARALLEL_H_
