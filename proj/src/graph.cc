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

#include "ggt/graph.h"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "ggt/error.h"
#include "ggt/io.h"
#include "ggt/rng.h"

namespace ggt {
namespace {

using json = nlohmann::json;

// Tolerance used when validating the stored "aspl" field of a graph file.
constexpr double kAsplFileTolerance = 1e-9;

bool ListsConnected(const AdjacencyList& adj) {
  const int n = static_cast<int>(adj.size());
  if (n == 0) return true;
  std::vector<uint8_t> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

}  // namespace

RelationalGraph RelationalGraph::FromEdges(int node_count, std::span<const Edge> edges,
                                           uint64_t seed) {
  Require(node_count >= 1 && node_count <= kMaxGraphNodes, ErrorKind::kInvalidArgument,
          "node count must be in [1, " + std::to_string(kMaxGraphNodes) + "], got " +
              std::to_string(node_count));
  RelationalGraph g;
  g.n_ = node_count;
  g.seed_ = seed;
  g.adj_.assign(static_cast<size_t>(node_count) * node_count, 0);
  g.neighbors_.assign(node_count, {});
  for (auto [a, b] : edges) {
    Require(a >= 0 && a < node_count && b >= 0 && b < node_count, ErrorKind::kInvalidArgument,
            "edge endpoint out of range");
    Require(a != b, ErrorKind::kInvalidArgument, "self-loop at node " + std::to_string(a));
    auto& cell = g.adj_[static_cast<size_t>(a) * node_count + b];
    Require(cell == 0, ErrorKind::kInvalidArgument,
            "duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
    cell = 1;
    g.adj_[static_cast<size_t>(b) * node_count + a] = 1;
    ++g.m_;
  }
  // Neighbor lists in ascending order so traversal order is canonical.
  for (int i = 0; i < node_count; ++i) {
    for (int j = 0; j < node_count; ++j) {
      if (g.HasEdge(i, j)) g.neighbors_[i].push_back(j);
    }
  }
  return g;
}

RelationalGraph RelationalGraph::Complete(int node_count) {
  std::vector<Edge> edges;
  for (int i = 0; i < node_count; ++i)
    for (int j = i + 1; j < node_count; ++j) edges.emplace_back(i, j);
  return FromEdges(node_count, edges);
}

std::optional<int> RelationalGraph::RegularDegree() const {
  const int d = Degree(0);
  for (int i = 1; i < n_; ++i)
    if (Degree(i) != d) return std::nullopt;
  return d;
}

std::vector<Edge> RelationalGraph::Edges() const {
  std::vector<Edge> out;
  out.reserve(m_);
  for (int i = 0; i < n_; ++i)
    for (int j : neighbors_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

RelationalGraph GenerateRegularGraph(int node_count, int degree, uint64_t seed, int max_tries) {
  Require(node_count >= 2 && node_count <= kMaxGraphNodes, ErrorKind::kInvalidArgument,
          "node count must be in [2, " + std::to_string(kMaxGraphNodes) + "]");
  Require(degree >= 1 && degree <= node_count - 1, ErrorKind::kInfeasibleDegree,
          "degree " + std::to_string(degree) + " outside [1, N-1]");
  Require((static_cast<int64_t>(node_count) * degree) % 2 == 0, ErrorKind::kInfeasibleDegree,
          "N*k = " + std::to_string(node_count * degree) + " is odd");
  Require(max_tries >= 1, ErrorKind::kInvalidArgument, "max_tries must be positive");

  if (degree == node_count - 1) {
    // The complete graph is the only realization.
    auto edges = RelationalGraph::Complete(node_count).Edges();
    return RelationalGraph::FromEdges(node_count, edges, seed);
  }

  // Above half density the configuration model almost never yields a simple
  // graph; sample the sparse complement instead (a bijection on simple graphs).
  const bool complement = 2 * degree > node_count - 1;
  const int sampled = complement ? node_count - 1 - degree : degree;

  Rng rng(seed);
  std::vector<int> stubs(static_cast<size_t>(node_count) * sampled);
  std::vector<uint8_t> used(static_cast<size_t>(node_count) * node_count);
  AdjacencyList lists(node_count);
  std::vector<Edge> edges;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    for (size_t s = 0; s < stubs.size(); ++s) stubs[s] = static_cast<int>(s / sampled);
    rng.Shuffle(std::span<int>(stubs));
    std::fill(used.begin(), used.end(), 0);
    bool simple = true;
    for (size_t s = 0; s + 1 < stubs.size(); s += 2) {
      int a = stubs[s], b = stubs[s + 1];
      if (a > b) std::swap(a, b);
      auto& cell = used[static_cast<size_t>(a) * node_count + b];
      if (a == b || cell) {
        simple = false;
        break;
      }
      cell = 1;
    }
    if (!simple) continue;
    edges.clear();
    for (auto& l : lists) l.clear();
    for (int a = 0; a < node_count; ++a) {
      for (int b = a + 1; b < node_count; ++b) {
        if ((used[static_cast<size_t>(a) * node_count + b] != 0) == complement) continue;
        edges.emplace_back(a, b);
        lists[a].push_back(b);
        lists[b].push_back(a);
      }
    }
    if (!ListsConnected(lists)) continue;
    return RelationalGraph::FromEdges(node_count, edges, seed);
  }
  Fail(ErrorKind::kGenerationExhausted,
       "no connected simple " + std::to_string(degree) + "-regular graph on " +
           std::to_string(node_count) + " nodes within " + std::to_string(max_tries) + " tries");
}

double AverageDegree(const RelationalGraph& g) {
  return 2.0 * g.edge_count() / g.node_count();
}

double PruningRate(const RelationalGraph& g) {
  return 1.0 - AverageDegree(g) / g.node_count();
}

bool IsConnected(const RelationalGraph& g) { return ListsConnected(g.adjacency_list()); }

std::optional<double> AsplOfLists(const AdjacencyList& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  if (n < 2) return 0.0;
  std::vector<int> dist(n);
  std::vector<int> queue(n);
  int64_t total = 0;
  for (int src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[src] = 0;
    int head = 0, tail = 0;
    queue[tail++] = src;
    while (head < tail) {
      const int u = queue[head++];
      for (int v : adjacency[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue[tail++] = v;
        }
      }
    }
    if (tail != n) return std::nullopt;
    for (int v = src + 1; v < n; ++v) total += dist[v];
  }
  return 2.0 * static_cast<double>(total) / (static_cast<double>(n) * (n - 1));
}

double Aspl(const RelationalGraph& g) {
  auto d = AsplOfLists(g.adjacency_list());
  if (!d) Fail(ErrorKind::kDisconnected, "graph has unreachable node pairs");
  return *d;
}

GraphMetrics ComputeMetrics(const RelationalGraph& g) {
  return {AverageDegree(g), Aspl(g), PruningRate(g)};
}

std::string GraphToJson(const RelationalGraph& g) {
  json j;
  j["n"] = g.node_count();
  j["k"] = g.RegularDegree().value_or(-1);
  j["seed"] = g.seed();
  auto d = AsplOfLists(g.adjacency_list());
  j["aspl"] = d ? json(*d) : json(nullptr);
  json edges = json::array();
  for (auto [a, b] : g.Edges()) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  return j.dump();
}

RelationalGraph GraphFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("graph JSON: ") + e.what());
  }
  try {
    const int n = j.at("n").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      Require(e.is_array() && e.size() == 2, ErrorKind::kFormat, "graph JSON: malformed edge");
      const int a = e[0].get<int>(), b = e[1].get<int>();
      Require(a < b, ErrorKind::kFormat, "graph JSON: edges must satisfy i<j");
      edges.emplace_back(a, b);
    }
    Require(std::is_sorted(edges.begin(), edges.end()), ErrorKind::kFormat,
            "graph JSON: edges must be sorted");
    auto g = RelationalGraph::FromEdges(n, edges, j.value("seed", uint64_t{0}));
    const int k = j.at("k").get<int>();
    Require(g.RegularDegree().value_or(-1) == k, ErrorKind::kFormat,
            "graph JSON: edge list does not realize degree k=" + std::to_string(k));
    const auto& stored = j.at("aspl");
    auto d = AsplOfLists(g.adjacency_list());
    if (stored.is_null()) {
      Require(!d.has_value(), ErrorKind::kFormat, "graph JSON: aspl missing for connected graph");
    } else {
      Require(d && std::abs(*d - stored.get<double>()) <= kAsplFileTolerance, ErrorKind::kFormat,
              "graph JSON: stored aspl disagrees with edge list");
    }
    return g;
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("graph JSON: ") + e.what());
  }
}

void SaveGraph(const RelationalGraph& g, const std::filesystem::path& path) {
  WriteFile(path, GraphToJson(g) + "\n");
}

RelationalGraph LoadGraph(const std::filesystem::path& path) {
  try {
    return GraphFromJson(ReadFile(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    Fail(e.kind(), path.string() + ": " + e.what());
  }
}

std::string GraphHash(const RelationalGraph& g) { return Sha256Hex(GraphToJson(g)); }

}  // namespace ggt
