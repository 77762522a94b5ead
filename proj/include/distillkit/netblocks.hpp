// Copyright 2026 The distillkit Authors. All Rights Reserved.
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

#pragma once

// Block-structured MobileNetV2-style networks: architecture descriptions,
// block-removal student derivation, parameter accounting, and the
// forward/backward pass over the block sequence with an optional attention
// tap at any block output.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "distillkit/layers.hpp"
#include "distillkit/tensor.hpp"

namespace dk {

enum class BlockKind { kConvBNReLU, kInvertedResidual, kClassifier };

std::string block_kind_name(BlockKind k);
BlockKind parse_block_kind(const std::string& s);

struct BlockSpec {
  BlockKind kind = BlockKind::kConvBNReLU;
  int block_id = 0;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t expansion = 1;  // InvertedResidual only
  std::size_t stride = 1;
  std::size_t kernel = 3;  // ConvBNReLU only (3 for the stem, 1 for the head)

  bool has_skip() const {
    return kind == BlockKind::kInvertedResidual && stride == 1 && in_channels == out_channels;
  }
  std::size_t hidden_channels() const { return in_channels * expansion; }

  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

/// Named architecture families. MicroNet keeps the block grammar of the
/// CIFAR MobileNetV2 at desk-scale widths.
enum class Family { kMobileNetV2, kMicroNet };

std::string family_name(Family f);
Family parse_family(const std::string& s);

struct ModelSpec {
  std::string name;
  Family family = Family::kMobileNetV2;
  std::vector<BlockSpec> blocks;
  int attention_source = -1;  // block_id, or -1 when the model has no tap
  std::size_t num_classes = 10;
  std::array<std::size_t, 3> input_shape{3, 32, 32};

  /// Position of `block_id` in `blocks`, if retained.
  std::optional<std::size_t> index_of(int block_id) const;
  std::size_t inverted_residual_count() const;
  std::size_t output_features() const;  // input width of the classifier

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Throws ShapeError when channel widths do not chain, the classifier is not
/// last, or the attention source is not a retained non-classifier block.
void validate(const ModelSpec& spec);

ModelSpec teacher_spec(Family family = Family::kMobileNetV2, std::size_t num_classes = 10);

/// Block-removal counts accepted by derive_student for a family (0 excluded).
std::vector<std::size_t> valid_removals(Family family);

/// Removes the last `n_blocks_removed` InvertedResidual blocks (and, for a
/// non-zero removal, the final ConvBNReLU head) and sets the attention source
/// from the family's placement table. Zero returns the teacher unchanged.
ModelSpec derive_student(const ModelSpec& teacher, std::size_t n_blocks_removed);

/// Spatial output size (C, H, W) of the block at `block_id` for the spec's input.
std::array<std::size_t, 3> block_output_shape(const ModelSpec& spec, int block_id);

/// Trainable parameter tensors (name, shape), in canonical order.
std::vector<std::pair<std::string, Shape>> parameter_shapes(const ModelSpec& spec);
/// BatchNorm layer names and channel counts, in canonical order.
std::vector<std::pair<std::string, std::size_t>> batchnorm_layers(const ModelSpec& spec);

std::size_t param_count(const ModelSpec& spec);
/// Convolution layers plus the classifier head.
std::size_t layer_count(const ModelSpec& spec);
double compression_factor(std::size_t teacher_params, std::size_t student_params);

// ---------------------------------------------------------------------------

template <class T>
struct Model {
  ModelSpec spec;
  std::vector<std::string> param_names;
  std::vector<Tensor<T>> params;
  std::vector<std::string> bn_names;  // one per BatchNorm layer, e.g. "f3.dw.bn"
  std::vector<BatchNormRunning<T>> bn_running;

  std::size_t param_index(const std::string& name) const;
  Tensor<T>& param(const std::string& name) { return params[param_index(name)]; }
  const Tensor<T>& param(const std::string& name) const { return params[param_index(name)]; }

  std::size_t parameter_count() const;

  template <class U>
  Model<U> cast() const {
    Model<U> out;
    out.spec = spec;
    out.param_names = param_names;
    out.bn_names = bn_names;
    for (const auto& p : params) out.params.push_back(p.template cast<U>());
    for (const auto& b : bn_running) {
      out.bn_running.push_back({b.mean.template cast<U>(), b.var.template cast<U>()});
    }
    return out;
  }
};

/// He-uniform convolution/dense weights, BN gamma=1 beta=0, zero biases,
/// running mean 0 / var 1. Deterministic in `seed`.
template <class T>
Model<T> instantiate(const ModelSpec& spec, std::uint64_t seed);

template <class T>
Model<T> build_teacher(std::size_t num_classes, Family family = Family::kMobileNetV2, std::uint64_t seed = 0) {
  return instantiate<T>(teacher_spec(family, num_classes), seed);
}

/// Copies every tensor that `dst` shares by name and shape with `src`.
/// Returns the number of tensors copied.
template <class T>
std::size_t copy_shared_weights(const Model<T>& src, Model<T>& dst);

// --- forward / backward ----------------------------------------------------

template <class T>
struct UnitCache {
  Tensor<T> input;
  BatchNormCache<T> bn;
  Tensor<T> pre_act;  // BN output; empty for linear units
};

template <class T>
struct BlockCache {
  std::vector<UnitCache<T>> units;
  Tensor<T> pooled;  // classifier only
  Shape pool_input_shape;
};

/// Activations retained by a forward pass for the matching backward pass.
template <class T>
struct Tape {
  std::vector<BlockCache<T>> blocks;
  Shape input_shape;
  int tap = -1;
  bool recorded = false;
};

template <class T>
struct ForwardOutput {
  Tensor<T> logits;
  Tensor<T> attention_source;  // raw activation at the tap block; empty when no tap
};

/// Runs the block sequence. Train mode normalizes with batch statistics and
/// updates the running statistics in `model`. When `tape` is non-null all
/// activations needed by backward() are retained. `tap` selects the block
/// whose output is returned as `attention_source` (-1 for none).
template <class T>
ForwardOutput<T> forward(Model<T>& model, const Tensor<T>& x, Mode mode, Tape<T>* tape = nullptr, int tap = -1);

/// Eval-mode logits; never mutates the model.
template <class T>
Tensor<T> predict(const Model<T>& model, const Tensor<T>& x);

/// Eval-mode (logits, activation at the spec's attention source, or at `tap`
/// when given). Errors when the tap block is not retained.
template <class T>
ForwardOutput<T> forward_with_attention(const Model<T>& model, const Tensor<T>& x, std::optional<int> tap = {});

template <class T>
struct ModelGrads {
  std::vector<Tensor<T>> params;  // aligned with Model::params
  Tensor<T> input;
};

/// Backpropagates `dlogits` (and, when given, a gradient arriving at the tap
/// block's output) through a recorded tape.
template <class T>
ModelGrads<T> backward(const Model<T>& model, const Tape<T>& tape, const Tensor<T>& dlogits,
                       const Tensor<T>* dtap = nullptr);

}  // namespace dk
