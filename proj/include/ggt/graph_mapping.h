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

#ifndef GGT_GRAPH_MAPPING_H_
#define GGT_GRAPH_MAPPING_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ggt/graph.h"
#include "ggt/model_spec.h"

namespace ggt {

// Channel -> node ownership for one side of a layer. Channels are split into
// contiguous groups in node order; the first (n_c mod N) nodes own one extra.
struct ChannelAssignment {
  int node_count = 0;
  std::vector<int> node_of_channel;

  int channel_count() const { return static_cast<int>(node_of_channel.size()); }
  friend bool operator==(const ChannelAssignment&, const ChannelAssignment&) = default;
};

// Throws kTooFewChannels when channel_count < node_count.
ChannelAssignment AssignChannels(int channel_count, int node_count);

// 0/1 mask over a weight tensor laid out as [out][in][taps]. Entry is 1 iff
// the owning nodes are adjacent or identical; all taps of a channel pair share
// one bit.
std::vector<uint8_t> BuildMask(const WeightLayout& layout, const ChannelAssignment& in_assign,
                               const ChannelAssignment& out_assign, const RelationalGraph& g);

struct GraphRef {
  std::string file;
  std::string sha256;
  friend bool operator==(const GraphRef&, const GraphRef&) = default;
};

struct LayerMask {
  size_t layer = 0;
  WeightLayout layout;
  ChannelAssignment in_assign;
  ChannelAssignment out_assign;
  std::vector<uint8_t> mask;

  double density() const;

  friend bool operator==(const LayerMask& a, const LayerMask& b) {
    return a.layer == b.layer && a.in_assign == b.in_assign && a.out_assign == b.out_assign &&
           a.mask == b.mask;
  }
};

// Masks for every maskable layer of one model, all derived from one graph.
struct MaskPlan {
  GraphRef graph;
  std::vector<LayerMask> layers;

  const LayerMask* ForLayer(size_t layer) const;
  // Fraction of zeros over all masked weights.
  double Sparsity() const;

  friend bool operator==(const MaskPlan&, const MaskPlan&) = default;
};

// The input layer and the classifier layer are never maskable (see
// ModelSpec::Validate); every maskable layer needs >= N channels on both sides.
MaskPlan PlanForModel(const ModelSpec& spec, const RelationalGraph& g, GraphRef ref = {});

// JSON with run-length-encoded bitmaps.
std::string MaskPlanToJson(const MaskPlan& plan);
MaskPlan MaskPlanFromJson(const std::string& text);
void SaveMaskPlan(const MaskPlan& plan, const std::filesystem::path& path);
MaskPlan LoadMaskPlan(const std::filesystem::path& path);
std::string MaskPlanHash(const MaskPlan& plan);

// Runs of alternating values, starting with a run of zeros (possibly empty).
std::vector<uint32_t> EncodeRuns(const std::vector<uint8_t>& bits);
std::vector<uint8_t> DecodeRuns(const std::vector<uint32_t>& runs, size_t expected_size);

}  // namespace ggt

#endif  // GGT_GRAPH_MAPPING_H_
