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

#include "ggt/graph_mapping.h"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <numeric>

#include "ggt/error.h"
#include "ggt/io.h"

namespace ggt {

using json = nlohmann::json;

ChannelAssignment AssignChannels(int channel_count, int node_count) {
  Require(node_count >= 1, ErrorKind::kInvalidArgument, "node count must be positive");
  Require(channel_count >= node_count, ErrorKind::kTooFewChannels,
          std::to_string(channel_count) + " channels for " + std::to_string(node_count) +
              " nodes");
  ChannelAssignment a;
  a.node_count = node_count;
  a.node_of_channel.reserve(channel_count);
  const int base = channel_count / node_count;
  const int extra = channel_count % node_count;
  for (int node = 0; node < node_count; ++node) {
    const int owned = base + (node < extra ? 1 : 0);
    a.node_of_channel.insert(a.node_of_channel.end(), owned, node);
  }
  return a;
}

std::vector<uint8_t> BuildMask(const WeightLayout& layout, const ChannelAssignment& in_assign,
                               const ChannelAssignment& out_assign, const RelationalGraph& g) {
  Require(layout.out_channels == out_assign.channel_count() &&
              layout.in_channels == in_assign.channel_count(),
          ErrorKind::kShapeMismatch,
          "weight layout [" + std::to_string(layout.out_channels) + "][" +
              std::to_string(layout.in_channels) + "] does not match channel assignments");
  Require(in_assign.node_count == g.node_count() && out_assign.node_count == g.node_count(),
          ErrorKind::kShapeMismatch, "assignment node count differs from graph");
  Require(layout.taps >= 1, ErrorKind::kShapeMismatch, "weight layout has no taps");
  std::vector<uint8_t> mask(layout.size());
  auto it = mask.begin();
  for (int o = 0; o < layout.out_channels; ++o) {
    const int node_o = out_assign.node_of_channel[o];
    for (int i = 0; i < layout.in_channels; ++i) {
      const int node_i = in_assign.node_of_channel[i];
      const uint8_t keep = (node_o == node_i || g.HasEdge(node_o, node_i)) ? 1 : 0;
      it = std::fill_n(it, layout.taps, keep);
    }
  }
  return mask;
}

double LayerMask::density() const {
  if (mask.empty()) return 1.0;
  const auto ones = std::count(mask.begin(), mask.end(), uint8_t{1});
  return static_cast<double>(ones) / static_cast<double>(mask.size());
}

const LayerMask* MaskPlan::ForLayer(size_t layer) const {
  for (const auto& l : layers)
    if (l.layer == layer) return &l;
  return nullptr;
}

double MaskPlan::Sparsity() const {
  size_t zeros = 0, total = 0;
  for (const auto& l : layers) {
    total += l.mask.size();
    zeros += std::count(l.mask.begin(), l.mask.end(), uint8_t{0});
  }
  return total == 0 ? 0.0 : static_cast<double>(zeros) / static_cast<double>(total);
}

MaskPlan PlanForModel(const ModelSpec& spec, const RelationalGraph& g, GraphRef ref) {
  spec.Validate();
  MaskPlan plan;
  plan.graph = std::move(ref);
  for (size_t layer : spec.MaskableLayers()) {
    const WeightLayout layout = spec.Layout(layer);
    LayerMask lm;
    lm.layer = layer;
    lm.layout = layout;
    try {
      lm.in_assign = AssignChannels(layout.in_channels, g.node_count());
      lm.out_assign = AssignChannels(layout.out_channels, g.node_count());
    } catch (const Error& e) {
      Fail(e.kind(), "layer " + std::to_string(layer) + " (" +
                         LayerKindName(spec.layers[layer].kind) + "): " + e.what());
    }
    lm.mask = BuildMask(layout, lm.in_assign, lm.out_assign, g);
    plan.layers.push_back(std::move(lm));
  }
  return plan;
}

std::vector<uint32_t> EncodeRuns(const std::vector<uint8_t>& bits) {
  std::vector<uint32_t> runs;
  uint8_t value = 0;
  uint32_t length = 0;
  for (uint8_t b : bits) {
    const uint8_t bit = b ? 1 : 0;
    if (bit != value) {
      runs.push_back(length);
      value = bit;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

std::vector<uint8_t> DecodeRuns(const std::vector<uint32_t>& runs, size_t expected_size) {
  std::vector<uint8_t> bits;
  bits.reserve(expected_size);
  uint8_t value = 0;
  for (uint32_t r : runs) {
    Require(bits.size() + r <= expected_size, ErrorKind::kFormat, "mask runs overflow layout");
    bits.insert(bits.end(), r, value);
    value ^= 1;
  }
  Require(bits.size() == expected_size, ErrorKind::kFormat, "mask runs shorter than layout");
  return bits;
}

std::string MaskPlanToJson(const MaskPlan& plan) {
  json j;
  j["graph"] = {{"file", plan.graph.file}, {"sha256", plan.graph.sha256}};
  json layers = json::array();
  for (const auto& l : plan.layers) {
    layers.push_back({
        {"layer", l.layer},
        {"layout", {l.layout.out_channels, l.layout.in_channels, l.layout.taps}},
        {"node_count", l.in_assign.node_count},
        {"in_assign", l.in_assign.node_of_channel},
        {"out_assign", l.out_assign.node_of_channel},
        {"mask_runs", EncodeRuns(l.mask)},
    });
  }
  j["layers"] = std::move(layers);
  return j.dump();
}

MaskPlan MaskPlanFromJson(const std::string& text) {
  try {
    const json j = json::parse(text);
    MaskPlan plan;
    plan.graph.file = j.at("graph").at("file").get<std::string>();
    plan.graph.sha256 = j.at("graph").at("sha256").get<std::string>();
    for (const auto& jl : j.at("layers")) {
      LayerMask l;
      l.layer = jl.at("layer").get<size_t>();
      const auto dims = jl.at("layout").get<std::vector<int>>();
      Require(dims.size() == 3, ErrorKind::kFormat, "mask plan: layout must have 3 dims");
      l.layout = {dims[0], dims[1], dims[2]};
      const int nodes = jl.at("node_count").get<int>();
      l.in_assign = {nodes, jl.at("in_assign").get<std::vector<int>>()};
      l.out_assign = {nodes, jl.at("out_assign").get<std::vector<int>>()};
      Require(l.in_assign.channel_count() == l.layout.in_channels &&
                  l.out_assign.channel_count() == l.layout.out_channels,
              ErrorKind::kFormat, "mask plan: assignment size disagrees with layout");
      l.mask = DecodeRuns(jl.at("mask_runs").get<std::vector<uint32_t>>(), l.layout.size());
      plan.layers.push_back(std::move(l));
    }
    return plan;
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("mask plan JSON: ") + e.what());
  }
}

void SaveMaskPlan(const MaskPlan& plan, const std::filesystem::path& path) {
  WriteFile(path, MaskPlanToJson(plan) + "\n");
}

MaskPlan LoadMaskPlan(const std::filesystem::path& path) {
  return MaskPlanFromJson(ReadFile(path));
}

std::string MaskPlanHash(const MaskPlan& plan) { return Sha256Hex(MaskPlanToJson(plan)); }

}  // namespace ggt
