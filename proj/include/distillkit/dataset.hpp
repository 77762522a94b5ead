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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "distillkit/tensor.hpp"

namespace dk {

struct Dataset {
  Tensor<float> images;  // N x C x H x W, values in [0, 1]
  std::vector<int> labels;
  std::vector<std::uint32_t> ids;  // stable per-image ids, preserved by subset()
  std::size_t num_classes = 10;
  std::string split;  // "train" or "test"

  std::size_t size() const { return labels.size(); }
  Shape image_shape() const { return {images.dim(1), images.dim(2), images.dim(3)}; }

  Dataset subset(std::span<const std::size_t> indices) const;
  Tensor<float> batch_images(std::span<const std::size_t> indices) const { return gather_rows(images, indices); }
  std::vector<int> batch_labels(std::span<const std::size_t> indices) const;
  std::vector<std::size_t> class_counts() const;

  /// SHA-256 over labels, ids and the float32 pixels, lowercase hex.
  std::string checksum() const;
};

struct Cifar10 {
  Dataset train;
  Dataset test;
};

inline constexpr std::size_t kCifarRecordBytes = 1 + 3 * 32 * 32;

/// Decodes one binary batch: records of 1 label byte + 3072 channel-planar
/// pixel bytes. Pixels are scaled by 1/255.
Dataset decode_cifar10_batch(std::span<const std::uint8_t> bytes, const std::string& source,
                             std::uint32_t first_id = 0);

/// Reads data_batch_1..5.bin and test_batch.bin from `dir`.
Cifar10 load_cifar10_binary(const std::filesystem::path& dir);

struct SyntheticOptions {
  std::size_t n_per_class = 100;
  std::size_t classes = 10;
  std::size_t size = 32;
  std::uint64_t seed = 0;
  double noise = 0.12;  // std-dev of additive Gaussian pixel noise
};

/// Parametric texture families (gratings, bars, rings, checkers, blobs).
/// Classes c and c+5 share a family and differ in frequency/orientation, so
/// the task has graded inter-class similarity. Class-balanced and
/// byte-deterministic in the seed.
Dataset generate_synthetic(const SyntheticOptions& opt);

/// Train split from `opt`, test split with `test_per_class` images per class
/// from an independent stream; test ids continue after the train ids.
Cifar10 synthetic_splits(const SyntheticOptions& opt, std::size_t test_per_class);

}  // namespace dk
