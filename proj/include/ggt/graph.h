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

#ifndef GGT_GRAPH_H_
#define GGT_GRAPH_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ggt {

// Dense storage keeps masking simple; every experiment uses N = 64.
inline constexpr int kMaxGraphNodes = 256;
inline constexpr int kDefaultGenerationTries = 1'000'000;

using Edge = std::pair<int, int>;
using AdjacencyList = std::vector<std::vector<int>>;

// Undirected simple graph over nodes 0..N-1 describing which channel groups
// exchange messages between consecutive layers. Immutable once built.
class RelationalGraph {
 public:
  // Validates node range, self-loops and duplicates. Regularity and
  // connectivity are properties, not construction requirements.
  static RelationalGraph FromEdges(int node_count, std::span<const Edge> edges,
                                   uint64_t seed = 0);
  static RelationalGraph Complete(int node_count);

  int node_count() const { return n_; }
  int edge_count() const { return m_; }
  uint64_t seed() const { return seed_; }

  bool HasEdge(int i, int j) const { return adj_[static_cast<size_t>(i) * n_ + j] != 0; }
  int Degree(int i) const { return static_cast<int>(neighbors_[i].size()); }
  std::span<const int> Neighbors(int i) const { return neighbors_[i]; }
  const AdjacencyList& adjacency_list() const { return neighbors_; }

  // Common degree when every node has the same degree.
  std::optional<int> RegularDegree() const;

  // Edges as (i, j) with i < j, lexicographically sorted.
  std::vector<Edge> Edges() const;

  friend bool operator==(const RelationalGraph& a, const RelationalGraph& b) {
    return a.n_ == b.n_ && a.adj_ == b.adj_;
  }

 private:
  RelationalGraph() = default;

  int n_ = 0;
  int m_ = 0;
  uint64_t seed_ = 0;
  std::vector<uint8_t> adj_;
  AdjacencyList neighbors_;
};

struct GraphMetrics {
  double average_degree = 0.0;
  double aspl = 0.0;
  double pruning_rate = 0.0;
};

// Configuration-model pairing with rejection of self-loops, multi-edges and
// disconnected realizations. Deterministic in `seed`.
RelationalGraph GenerateRegularGraph(int node_count, int degree, uint64_t seed,
                                     int max_tries = kDefaultGenerationTries);

double AverageDegree(const RelationalGraph& g);
double PruningRate(const RelationalGraph& g);
bool IsConnected(const RelationalGraph& g);

// Mean shortest-path length over unordered node pairs; throws
// ErrorKind::kDisconnected if some pair is unreachable.
double Aspl(const RelationalGraph& g);
GraphMetrics ComputeMetrics(const RelationalGraph& g);

// All-pairs BFS over adjacency lists. Returns nullopt when disconnected.
std::optional<double> AsplOfLists(const AdjacencyList& adjacency);

// JSON graph files: {"n", "k", "seed", "aspl", "edges"}.
std::string GraphToJson(const RelationalGraph& g);
RelationalGraph GraphFromJson(const std::string& text);
void SaveGraph(const RelationalGraph& g, const std::filesystem::path& path);
RelationalGraph LoadGraph(const std::filesystem::path& path);

// Hex SHA-256 of the canonical JSON serialization.
std::string GraphHash(const RelationalGraph& g);

}  // namespace ggt

#endif  // GGT_GRAPH_H_
