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

#ifndef GGT_NETWORK_H_
#define GGT_NETWORK_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ggt/error.h"
#include "ggt/graph_mapping.h"
#include "ggt/model_spec.h"
#include "ggt/rng.h"

namespace ggt {

template <typename T>
struct LayerParams {
  std::vector<T> weights;  // [out][in][taps]
  std::vector<T> bias;     // [out]
  std::vector<uint8_t> mask;  // empty: unmasked
};

// Per-layer outputs of one forward pass, kept for backpropagation.
template <typename T>
struct Activations {
  std::vector<std::vector<T>> values;  // values[0] = input, values[i+1] = layer i
  std::vector<std::vector<int>> argmax;  // maxpool layers only
  // Conv layers only: input patches, row (channel, tap), column position.
  std::vector<std::vector<T>> patches;
  std::vector<T> probabilities;
};

template <typename T>
struct Gradients {
  T loss = 0;
  std::vector<T> input;
  std::vector<std::vector<T>> weights;
  std::vector<std::vector<T>> bias;
};

// Parameters of a layer stack. Masked layers compute with weight∘mask, so
// whatever sits in a masked slot never reaches an output or a gradient.
template <typename T>
class Network {
 public:
  Network() = default;
  explicit Network(ModelSpec spec) : spec_(std::move(spec)) {
    spec_.Validate();
    shapes_ = spec_.Shapes();
    params_.resize(spec_.layers.size());
    for (size_t i = 0; i < spec_.layers.size(); ++i) {
      if (!spec_.layers[i].parametric()) continue;
      const WeightLayout lay = spec_.Layout(i);
      params_[i].weights.assign(lay.size(), T(0));
      params_[i].bias.assign(lay.out_channels, T(0));
    }
  }

  const ModelSpec& spec() const { return spec_; }
  const std::vector<Shape3>& shapes() const { return shapes_; }
  std::vector<LayerParams<T>>& params() { return params_; }
  const std::vector<LayerParams<T>>& params() const { return params_; }

  // Uniform(-b, b) with b = sqrt(6 / fan_in); zero biases.
  void InitFanInUniform(uint64_t seed) {
    Rng rng(seed);
    for (size_t i = 0; i < params_.size(); ++i) {
      if (!spec_.layers[i].parametric()) continue;
      const WeightLayout lay = spec_.Layout(i);
      const double bound = std::sqrt(6.0 / (static_cast<double>(lay.in_channels) * lay.taps));
      for (T& w : params_[i].weights) w = static_cast<T>(rng.Uniform(-bound, bound));
      std::fill(params_[i].bias.begin(), params_[i].bias.end(), T(0));
    }
    ZeroMaskedWeights();
  }

  void ApplyMasks(const MaskPlan& plan) {
    for (auto& p : params_) p.mask.clear();
    for (const auto& lm : plan.layers) {
      Require(lm.layer < params_.size() && spec_.layers[lm.layer].maskable,
              ErrorKind::kShapeMismatch,
              "mask plan targets non-maskable layer " + std::to_string(lm.layer));
      Require(lm.mask.size() == params_[lm.layer].weights.size(), ErrorKind::kShapeMismatch,
              "mask size differs from weights at layer " + std::to_string(lm.layer));
      params_[lm.layer].mask = lm.mask;
    }
    ZeroMaskedWeights();
  }

  void ZeroMaskedWeights() {
    for (auto& p : params_) {
      if (p.mask.empty()) continue;
      for (size_t k = 0; k < p.weights.size(); ++k)
        if (!p.mask[k]) p.weights[k] = T(0);
    }
  }

  template <typename U>
  Network<U> Cast() const {
    Network<U> out(spec_);
    for (size_t i = 0; i < params_.size(); ++i) {
      auto& dst = out.params()[i];
      dst.weights.assign(params_[i].weights.begin(), params_[i].weights.end());
      dst.bias.assign(params_[i].bias.begin(), params_[i].bias.end());
      dst.mask = params_[i].mask;
    }
    return out;
  }

 private:
  ModelSpec spec_;
  std::vector<Shape3> shapes_;
  std::vector<LayerParams<T>> params_;
};

// Immutable snapshot of a network's effective (masked) weights. Forward and
// backward passes skip input channels whose whole block is masked out.
template <typename T>
class Evaluator {
 public:
  explicit Evaluator(const Network<T>& net) : spec_(net.spec()), shapes_(net.shapes()) {
    const size_t n = spec_.layers.size();
    layouts_.resize(n);
    weights_.resize(n);
    bias_.resize(n);
    masks_.resize(n);
    active_.resize(n);
    for (size_t i = 0; i < n; ++i) {
      if (!spec_.layers[i].parametric()) continue;
      const auto& p = net.params()[i];
      const WeightLayout lay = spec_.Layout(i);
      layouts_[i] = lay;
      weights_[i] = p.weights;
      bias_[i] = p.bias;
      masks_[i] = p.mask;
      active_[i].resize(lay.out_channels);
      for (int o = 0; o < lay.out_channels; ++o) {
        for (int c = 0; c < lay.in_channels; ++c) {
          bool any = p.mask.empty();
          const size_t base = (static_cast<size_t>(o) * lay.in_channels + c) * lay.taps;
          for (int t = 0; !any && t < lay.taps; ++t) any = p.mask[base + t] != 0;
          if (any) active_[i][o].push_back(c);
        }
      }
      if (!p.mask.empty()) {
        for (size_t k = 0; k < p.mask.size(); ++k)
          if (!p.mask[k]) weights_[i][k] = T(0);
      }
    }
  }

  const ModelSpec& spec() const { return spec_; }

  void Forward(std::span<const T> x, Activations<T>& acts) const {
    Require(x.size() == shapes_[0].size(), ErrorKind::kShapeMismatch,
            "input has " + std::to_string(x.size()) + " values, expected " +
                std::to_string(shapes_[0].size()));
    const size_t n = spec_.layers.size();
    acts.values.resize(n + 1);
    acts.argmax.resize(n);
    acts.patches.resize(n);
    acts.values[0].assign(x.begin(), x.end());
    RequireFinite(acts.values[0], "input");
    for (size_t i = 0; i < n; ++i) {
      const std::vector<T>& in = acts.values[i];
      std::vector<T>& out = acts.values[i + 1];
      out.assign(shapes_[i + 1].size(), T(0));
      switch (spec_.layers[i].kind) {
        case LayerKind::kConv: ConvForward(i, in, out, acts.patches[i]); break;
        case LayerKind::kDense: DenseForward(i, in, out); break;
        case LayerKind::kMaxPool: PoolForward(i, in, out, acts.argmax[i]); break;
        case LayerKind::kRelu:
          for (size_t k = 0; k < in.size(); ++k) out[k] = in[k] > T(0) ? in[k] : T(0);
          break;
      }
      if (spec_.layers[i].parametric()) RequireFinite(out, "layer " + std::to_string(i));
    }
    acts.probabilities = Softmax(acts.values[n]);
  }

  std::vector<T> Probabilities(std::span<const T> x) const {
    Activations<T> acts;
    Forward(x, acts);
    return std::move(acts.probabilities);
  }

  // Allocates gradient buffers shaped like the parameters.
  Gradients<T> ZeroGradients(bool want_input, bool want_weights) const {
    Gradients<T> g;
    if (want_input) g.input.assign(shapes_[0].size(), T(0));
    if (want_weights) {
      g.weights.resize(weights_.size());
      g.bias.resize(bias_.size());
      for (size_t i = 0; i < weights_.size(); ++i) {
        g.weights[i].assign(weights_[i].size(), T(0));
        g.bias[i].assign(bias_[i].size(), T(0));
      }
    }
    return g;
  }

  // Backpropagates softmax cross-entropy for `label`. Weight gradients are
  // accumulated into `grads`; the input gradient (if requested) overwrites.
  // Returns the loss.
  T Backward(const Activations<T>& acts, int label, Gradients<T>& grads) const {
    const size_t n = spec_.layers.size();
    Require(label >= 0 && label < spec_.class_count, ErrorKind::kInvalidArgument,
            "label out of range");
    const T p = acts.probabilities[label];
    const T loss = -std::log(std::max(p, std::numeric_limits<T>::min()));
    std::vector<T> g_out = acts.probabilities;
    g_out[label] -= T(1);
    std::vector<T> g_in;
    const bool want_weights = !grads.weights.empty();
    const bool want_input = !grads.input.empty();
    for (size_t i = n; i-- > 0;) {
      const std::vector<T>& in = acts.values[i];
      const bool need_in = i > 0 || want_input;
      g_in.assign(need_in ? in.size() : 0, T(0));
      switch (spec_.layers[i].kind) {
        case LayerKind::kConv:
          ConvBackward(i, acts.patches[i], g_out, need_in ? &g_in : nullptr,
                       want_weights ? &grads.weights[i] : nullptr,
                       want_weights ? &grads.bias[i] : nullptr);
          break;
        case LayerKind::kDense:
          DenseBackward(i, in, g_out, need_in ? &g_in : nullptr,
                        want_weights ? &grads.weights[i] : nullptr,
                        want_weights ? &grads.bias[i] : nullptr);
          break;
        case LayerKind::kMaxPool:
          if (need_in)
            for (size_t k = 0; k < g_out.size(); ++k) g_in[acts.argmax[i][k]] += g_out[k];
          break;
        case LayerKind::kRelu:
          if (need_in)
            for (size_t k = 0; k < in.size(); ++k) g_in[k] = in[k] > T(0) ? g_out[k] : T(0);
          break;
      }
      if (!need_in) break;
      g_out.swap(g_in);
    }
    if (want_input) grads.input = std::move(g_out);
    return loss;
  }

  // Zeroes weight-gradient entries in masked slots.
  void MaskGradients(Gradients<T>& grads) const {
    for (size_t i = 0; i < masks_.size() && i < grads.weights.size(); ++i) {
      if (masks_[i].empty()) continue;
      for (size_t k = 0; k < masks_[i].size(); ++k)
        if (!masks_[i][k]) grads.weights[i][k] = T(0);
    }
  }

  static std::vector<T> Softmax(const std::vector<T>& logits) {
    const T mx = *std::max_element(logits.begin(), logits.end());
    std::vector<T> p(logits.size());
    T sum = 0;
    for (size_t k = 0; k < logits.size(); ++k) {
      p[k] = std::exp(logits[k] - mx);
      sum += p[k];
    }
    for (T& v : p) v /= sum;
    return p;
  }

 private:
  static void RequireFinite(const std::vector<T>& v, const std::string& where) {
    for (T e : v)
      if (!std::isfinite(e)) Fail(ErrorKind::kNonFinite, "non-finite value in " + where);
  }

  void Unfold(size_t i, const std::vector<T>& in, std::vector<T>& patches) const {
    const Shape3 is = shapes_[i], os = shapes_[i + 1];
    const int k = spec_.layers[i].kernel;
    const size_t plane = static_cast<size_t>(os.height) * os.width;
    patches.resize(static_cast<size_t>(is.channels) * k * k * plane);
    T* dst = patches.data();
    for (int c = 0; c < is.channels; ++c) {
      const T* src = &in[static_cast<size_t>(c) * is.height * is.width];
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          for (int y = 0; y < os.height; ++y) {
            const T* row = src + static_cast<size_t>(y + ky) * is.width + kx;
            std::copy(row, row + os.width, dst);
            dst += os.width;
          }
        }
      }
    }
  }

  void ConvForward(size_t i, const std::vector<T>& in, std::vector<T>& out,
                   std::vector<T>& patches) const {
    const WeightLayout& lay = layouts_[i];
    const Shape3 os = shapes_[i + 1];
    const size_t plane = static_cast<size_t>(os.height) * os.width;
    Unfold(i, in, patches);
    for (int o = 0; o < os.channels; ++o) {
      T* dst = &out[o * plane];
      std::fill(dst, dst + plane, bias_[i][o]);
      for (int c : active_[i][o]) {
        const size_t row0 = static_cast<size_t>(c) * lay.taps;
        const T* w = &weights_[i][static_cast<size_t>(o) * lay.in_channels * lay.taps + row0];
        for (int t = 0; t < lay.taps; ++t) {
          const T wv = w[t];
          const T* src = &patches[(row0 + t) * plane];
          for (size_t q = 0; q < plane; ++q) dst[q] += wv * src[q];
        }
      }
    }
  }

  void ConvBackward(size_t i, const std::vector<T>& patches, const std::vector<T>& g_out,
                    std::vector<T>* g_in, std::vector<T>* g_w, std::vector<T>* g_b) const {
    const Shape3 is = shapes_[i], os = shapes_[i + 1];
    const WeightLayout& lay = layouts_[i];
    const int k = spec_.layers[i].kernel;
    const size_t plane = static_cast<size_t>(os.height) * os.width;
    for (int o = 0; o < os.channels; ++o) {
      const T* go = &g_out[o * plane];
      if (g_b) {
        T s = 0;
        for (size_t q = 0; q < plane; ++q) s += go[q];
        (*g_b)[o] += s;
      }
      for (int c : active_[i][o]) {
        const size_t wbase = (static_cast<size_t>(o) * lay.in_channels + c) * lay.taps;
        if (g_w) {
          for (int t = 0; t < lay.taps; ++t) {
            const T* src = &patches[(static_cast<size_t>(c) * lay.taps + t) * plane];
            T acc = 0;
            for (size_t q = 0; q < plane; ++q) acc += go[q] * src[q];
            (*g_w)[wbase + t] += acc;
          }
        }
        if (g_in) {
          const T* w = &weights_[i][wbase];
          const size_t ibase = static_cast<size_t>(c) * is.height * is.width;
          for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
              const T wv = w[ky * k + kx];
              for (int y = 0; y < os.height; ++y) {
                T* girow = &(*g_in)[ibase + static_cast<size_t>(y + ky) * is.width + kx];
                const T* grow = go + static_cast<size_t>(y) * os.width;
                for (int x = 0; x < os.width; ++x) girow[x] += wv * grow[x];
              }
            }
          }
        }
      }
    }
  }

  void DenseForward(size_t i, const std::vector<T>& in, std::vector<T>& out) const {
    const WeightLayout& lay = layouts_[i];
    const size_t row = static_cast<size_t>(lay.in_channels) * lay.taps;
    for (int o = 0; o < lay.out_channels; ++o) {
      const T* w = &weights_[i][o * row];
      T s = bias_[i][o];
      for (int c : active_[i][o]) {
        const size_t off = static_cast<size_t>(c) * lay.taps;
        for (int t = 0; t < lay.taps; ++t) s += w[off + t] * in[off + t];
      }
      out[o] = s;
    }
  }

  void DenseBackward(size_t i, const std::vector<T>& in, const std::vector<T>& g_out,
                     std::vector<T>* g_in, std::vector<T>* g_w, std::vector<T>* g_b) const {
    const WeightLayout& lay = layouts_[i];
    const size_t row = static_cast<size_t>(lay.in_channels) * lay.taps;
    for (int o = 0; o < lay.out_channels; ++o) {
      const T go = g_out[o];
      if (g_b) (*g_b)[o] += go;
      if (go == T(0)) continue;
      const T* w = &weights_[i][o * row];
      for (int c : active_[i][o]) {
        const size_t off = static_cast<size_t>(c) * lay.taps;
        if (g_w) {
          T* gw = &(*g_w)[o * row + off];
          for (int t = 0; t < lay.taps; ++t) gw[t] += go * in[off + t];
        }
        if (g_in) {
          T* gi = &(*g_in)[off];
          for (int t = 0; t < lay.taps; ++t) gi[t] += go * w[off + t];
        }
      }
    }
  }

  void PoolForward(size_t i, const std::vector<T>& in, std::vector<T>& out,
                   std::vector<int>& argmax) const {
    const Shape3 is = shapes_[i], os = shapes_[i + 1];
    const int p = spec_.layers[i].size;
    argmax.assign(out.size(), 0);
    for (int c = 0; c < os.channels; ++c) {
      for (int y = 0; y < os.height; ++y) {
        for (int x = 0; x < os.width; ++x) {
          int best = (c * is.height + y * p) * is.width + x * p;
          for (int dy = 0; dy < p; ++dy) {
            for (int dx = 0; dx < p; ++dx) {
              const int idx = (c * is.height + y * p + dy) * is.width + x * p + dx;
              if (in[idx] > in[best]) best = idx;
            }
          }
          const size_t o = (static_cast<size_t>(c) * os.height + y) * os.width + x;
          out[o] = in[best];
          argmax[o] = best;
        }
      }
    }
  }

  ModelSpec spec_;
  std::vector<WeightLayout> layouts_;
  std::vector<Shape3> shapes_;
  std::vector<std::vector<T>> weights_;
  std::vector<std::vector<T>> bias_;
  std::vector<std::vector<uint8_t>> masks_;
  // active_[layer][out] = input channels with at least one retained weight.
  std::vector<std::vector<std::vector<int>>> active_;
};

extern template class Network<float>;
extern template class Network<double>;
extern template class Evaluator<float>;
extern template class Evaluator<double>;

}  // namespace ggt

#endif  // GGT_NETWORK_H_
