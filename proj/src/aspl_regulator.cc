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

#include "ggt/aspl_regulator.h"

#include <algorithm>
#include <cstdio>
#include <iostream>

#include "ggt/error.h"
#include "ggt/parallel.h"
#include "ggt/rng.h"

namespace ggt {
namespace {

std::string FormatBound(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Mutable copy of a graph used only inside one regulation run.
class SwapWorkspace {
 public:
  explicit SwapWorkspace(const RelationalGraph& g)
      : n_(g.node_count()),
        lists_(g.adjacency_list()),
        adj_(static_cast<size_t>(n_) * n_, 0) {
    for (int i = 0; i < n_; ++i)
      for (int j : lists_[i]) adj_[Index(i, j)] = 1;
  }

  int node_count() const { return n_; }
  const AdjacencyList& lists() const { return lists_; }
  bool HasEdge(int a, int b) const { return adj_[Index(a, b)] != 0; }

  void Replace(int a, int old_b, int new_b) {
    auto& l = lists_[a];
    *std::find(l.begin(), l.end(), old_b) = new_b;
    adj_[Index(a, old_b)] = 0;
    adj_[Index(a, new_b)] = 1;
  }

  // Removes (i,w),(j,v) and adds (i,v),(j,w).
  void Swap(int i, int w, int j, int v) {
    Replace(i, w, v);
    Replace(w, i, j);
    Replace(j, v, w);
    Replace(v, j, i);
  }

  void Undo(int i, int w, int j, int v) {
    Replace(i, v, w);
    Replace(w, j, i);
    Replace(j, w, v);
    Replace(v, i, j);
  }

  RelationalGraph Freeze(uint64_t seed) const {
    std::vector<Edge> edges;
    for (int a = 0; a < n_; ++a)
      for (int b : lists_[a])
        if (a < b) edges.emplace_back(a, b);
    std::sort(edges.begin(), edges.end());
    return RelationalGraph::FromEdges(n_, edges, seed);
  }

 private:
  size_t Index(int a, int b) const { return static_cast<size_t>(a) * n_ + b; }

  int n_;
  AdjacencyList lists_;
  std::vector<uint8_t> adj_;
};

}  // namespace

void AsplTarget::Validate() const {
  Require(lower >= 1.0, ErrorKind::kInvalidArgument, "ASPL lower bound must be >= 1");
  Require(upper > lower, ErrorKind::kInvalidArgument,
          "ASPL bin [" + FormatBound(lower) + "," + FormatBound(upper) + ") is empty");
  Require(max_swaps >= 1, ErrorKind::kInvalidArgument, "max_swaps must be positive");
}

std::string AsplTarget::Label() const { return FormatBound(lower) + "-" + FormatBound(upper); }

RegulationResult RegulateAspl(const RelationalGraph& g, const AsplTarget& target, uint64_t seed) {
  target.Validate();
  const auto initial = AsplOfLists(g.adjacency_list());
  Require(initial.has_value(), ErrorKind::kDisconnected, "regulation needs a connected graph");
  Require(g.RegularDegree().has_value(), ErrorKind::kInvalidArgument,
          "regulation needs a regular graph");

  RegulationResult result{g, *initial, 0, 0, {*initial}};
  if (target.Contains(*initial)) return result;

  const int n = g.node_count();
  Require(n >= 4 && g.edge_count() >= 2, ErrorKind::kRegulationExhausted,
          "graph too small for double-edge swaps");
  const bool increase = *initial < target.lower;
  SwapWorkspace ws(g);
  Rng rng(seed);
  double current = *initial;

  while (result.attempts < target.max_swaps) {
    ++result.attempts;
    const int i = static_cast<int>(rng.UniformIndex(n));
    int j = static_cast<int>(rng.UniformIndex(n - 1));
    if (j >= i) ++j;
    const auto& ni = ws.lists()[i];
    const auto& nj = ws.lists()[j];
    if (ni.empty() || nj.empty()) continue;
    const int w = ni[rng.UniformIndex(ni.size())];
    const int v = nj[rng.UniformIndex(nj.size())];
    if (w == j || v == i || w == v) continue;
    if (ws.HasEdge(i, v) || ws.HasEdge(j, w)) continue;

    ws.Swap(i, w, j, v);
    const auto next = AsplOfLists(ws.lists());
    const bool accept = next.has_value() && (increase ? (*next > current && *next < target.upper)
                                                      : (*next < current && *next >= target.lower));
    if (!accept) {
      ws.Undo(i, w, j, v);
      continue;
    }
    current = *next;
    ++result.accepted_swaps;
    result.trajectory.push_back(current);
    if (target.Contains(current)) {
      result.graph = ws.Freeze(g.seed());
      result.aspl = current;
      return result;
    }
  }
  Fail(ErrorKind::kRegulationExhausted,
       "ASPL " + std::to_string(current) + " not in [" + FormatBound(target.lower) + "," +
           FormatBound(target.upper) + ") after " + std::to_string(target.max_swaps) + " swaps");
}

std::vector<BinOutcome> BatchGenerate(int node_count, int degree,
                                      const std::vector<AsplTarget>& targets, int per_bin,
                                      uint64_t seed, const BatchOptions& options) {
  Require(per_bin >= 1, ErrorKind::kInvalidArgument, "per_bin must be positive");
  for (const auto& t : targets) t.Validate();
  for (size_t a = 0; a < targets.size(); ++a)
    for (size_t b = a + 1; b < targets.size(); ++b)
      Require(targets[a].upper <= targets[b].lower || targets[b].upper <= targets[a].lower,
              ErrorKind::kInvalidArgument,
              "ASPL bins " + targets[a].Label() + " and " + targets[b].Label() + " overlap");

  std::vector<BinOutcome> out(targets.size());
  ParallelFor(targets.size(), options.threads, [&](size_t b) {
    BinOutcome& bin = out[b];
    bin.target = targets[b];
    const int budget = options.restart_factor * per_bin;
    for (int r = 0; r < budget && static_cast<int>(bin.graphs.size()) < per_bin; ++r) {
      ++bin.restarts_used;
      const uint64_t graph_seed = DeriveSeed(seed, {b, static_cast<uint64_t>(r), 0});
      auto g = GenerateRegularGraph(node_count, degree, graph_seed, options.max_tries);
      try {
        bin.graphs.push_back(RegulateAspl(g, targets[b], DeriveSeed(graph_seed, {1})).graph);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kRegulationExhausted) throw;
      }
    }
    bin.filled = static_cast<int>(bin.graphs.size()) == per_bin;
  });
  for (const auto& bin : out) {
    if (!bin.filled) {
      std::clog << "ggt: ASPL bin [" << bin.target.Label() << ") underfilled: "
                << bin.graphs.size() << "/" << per_bin << " graphs after " << bin.restarts_used
                << " restarts\n";
    }
  }
  return out;
}

std::string BinGraphFileName(int node_count, int degree, const AsplTarget& target, int index) {
  return "n" + std::to_string(node_count) + "_k" + std::to_string(degree) + "_bin" +
         target.Label() + "_" + std::to_string(index) + ".json";
}

}  // namespace ggt
