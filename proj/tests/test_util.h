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

#ifndef GGT_TESTS_TEST_UTIL_H_
#define GGT_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "ggt/error.h"
#include "ggt/graph.h"
#include "ggt/rng.h"

namespace ggt::testing {

// Fails the current test unless `fn` throws ggt::Error of kind `kind`.
#define EXPECT_GGT_ERROR(stmt, error_kind)                                     \
  do {                                                                         \
    bool caught_ = false;                                                      \
    try {                                                                      \
      stmt;                                                                    \
    } catch (const ::ggt::Error& e_) {                                         \
      caught_ = true;                                                          \
      EXPECT_EQ(e_.kind(), error_kind) << e_.what();                           \
    }                                                                          \
    EXPECT_TRUE(caught_) << "expected " << ::ggt::ErrorKindName(error_kind);   \
  } while (0)

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ggt_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Floyd-Warshall ASPL over the dense adjacency; independent of the BFS
// implementation. Returns +inf when disconnected.
inline double FloydWarshallAspl(const RelationalGraph& g) {
  const int n = g.node_count();
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<int> d(static_cast<size_t>(n) * n, inf);
  for (int i = 0; i < n; ++i) {
    d[i * n + i] = 0;
    for (int j = 0; j < n; ++j)
      if (g.HasEdge(i, j)) d[i * n + j] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i * n + k] + d[k * n + j] < d[i * n + j]) d[i * n + j] = d[i * n + k] + d[k * n + j];
  long long sum = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (d[i * n + j] >= inf) return std::numeric_limits<double>::infinity();
      sum += d[i * n + j];
    }
  return static_cast<double>(sum) / (static_cast<double>(n) * (n - 1) / 2.0);
}

inline RelationalGraph Cycle(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  return RelationalGraph::FromEdges(n, e);
}

inline RelationalGraph Petersen() {
  std::vector<Edge> e;
  for (int i = 0; i < 5; ++i) {
    e.push_back({i, (i + 1) % 5});          // outer cycle
    e.push_back({i, i + 5});                // spokes
    e.push_back({5 + i, 5 + (i + 2) % 5});  // inner pentagram
  }
  return RelationalGraph::FromEdges(10, e);
}

// Random simple graph (not necessarily regular or connected).
inline RelationalGraph RandomGraph(int n, double p, Rng& rng) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.Uniform01() < p) e.push_back({i, j});
  return RelationalGraph::FromEdges(n, e);
}

}  // namespace ggt::testing

#endif  // GGT_TESTS_TEST_UTIL_H_
