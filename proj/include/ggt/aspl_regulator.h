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

#ifndef GGT_ASPL_REGULATOR_H_
#define GGT_ASPL_REGULATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ggt/graph.h"

namespace ggt {

inline constexpr int kDefaultMaxSwaps = 10'000;
inline constexpr int kDefaultRestartFactor = 50;

// Target interval [lower, upper) for the average shortest path length, plus
// the swap-attempt budget of one regulation run.
struct AsplTarget {
  double lower = 3.0;
  double upper = 5.0;
  int max_swaps = kDefaultMaxSwaps;

  void Validate() const;
  bool Contains(double d) const { return lower <= d && d < upper; }
  std::string Label() const;  // "3-5" style, used in file names
};

struct RegulationResult {
  RelationalGraph graph;
  double aspl = 0.0;
  int accepted_swaps = 0;
  int attempts = 0;
  // ASPL after every accepted swap, starting with the initial value.
  std::vector<double> trajectory;
};

// Degree-preserving double-edge swaps with greedy acceptance: below the
// interval only strictly increasing swaps are kept, at or above it only
// strictly decreasing ones, and swaps that disconnect the graph or jump over
// the whole interval are rejected. Throws kRegulationExhausted when
// `max_swaps` attempts (including collisions) pass without success.
RegulationResult RegulateAspl(const RelationalGraph& g, const AsplTarget& target, uint64_t seed);

struct BatchOptions {
  int max_tries = kDefaultGenerationTries;
  // Fresh random graphs tried per bin = restart_factor * per_bin.
  int restart_factor = kDefaultRestartFactor;
  int threads = 0;  // 0: use DefaultThreadCount()
};

struct BinOutcome {
  AsplTarget target;
  std::vector<RelationalGraph> graphs;
  int restarts_used = 0;
  bool filled = false;
};

// Fills each disjoint target bin with up to `per_bin` graphs by regulating
// fresh random k-regular graphs. Bins may come back underfilled.
std::vector<BinOutcome> BatchGenerate(int node_count, int degree,
                                      const std::vector<AsplTarget>& targets, int per_bin,
                                      uint64_t seed, const BatchOptions& options = {});

// "n64_k3_bin3-5_0007.json"
std::string BinGraphFileName(int node_count, int degree, const AsplTarget& target, int index);

}  // namespace ggt

#endif  // GGT_ASPL_REGULATOR_H_
