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

// Forward/backward primitives for the layer vocabulary of the
// MobileNetV2-style networks: standard and depthwise convolution, batch
// normalization, ReLU6, global average pooling, dense, and tempered softmax.
// All tensors are NCHW (or NxD), row-major. Instantiated for float and double.

#include <cstddef>
#include <vector>

#include "distillkit/tensor.hpp"

namespace dk {

enum class Mode { kTrain, kEval };

struct ConvGeom {
  std::size_t stride = 1;
  std::size_t pad = 0;
};

inline std::size_t conv_out_size(std::size_t in, std::size_t k, const ConvGeom& g) {
  return (in + 2 * g.pad - k) / g.stride + 1;
}

template <class T>
struct ConvGrads {
  Tensor<T> dx;
  Tensor<T> dw;
};

template <class T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& w, ConvGeom g);
template <class T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& w, ConvGeom g, const Tensor<T>& dy);

/// One k x k filter per channel; weight shape C x 1 x k x k.
template <class T>
Tensor<T> depthwise_conv_forward(const Tensor<T>& x, const Tensor<T>& w, ConvGeom g);
template <class T>
ConvGrads<T> depthwise_conv_backward(const Tensor<T>& x, const Tensor<T>& w, ConvGeom g, const Tensor<T>& dy);

inline constexpr double kBatchNormEps = 1e-5;
// running = momentum * running + (1 - momentum) * batch
inline constexpr double kBatchNormMomentum = 0.9;

template <class T>
struct BatchNormRunning {
  Tensor<T> mean;
  Tensor<T> var;
};

template <class T>
struct BatchNormCache {
  Tensor<T> xhat;
  std::vector<T> inv_std;
  Mode mode = Mode::kEval;
};

template <class T>
struct BatchNormGrads {
  Tensor<T> dx;
  Tensor<T> dgamma;
  Tensor<T> dbeta;
};

/// Train mode normalizes with batch statistics and updates `running`
/// (unbiased variance, as in common frameworks); eval mode reads `running`.
/// `cache` may be null when no backward pass will follow.
template <class T>
Tensor<T> batchnorm_forward(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                            BatchNormRunning<T>& running, Mode mode, BatchNormCache<T>* cache);
template <class T>
BatchNormGrads<T> batchnorm_backward(const Tensor<T>& dy, const Tensor<T>& gamma, const BatchNormCache<T>& cache);

template <class T>
Tensor<T> relu6_forward(const Tensor<T>& x);
/// Gradient is 1 strictly inside (0, 6), else 0. `x` is the forward input.
template <class T>
Tensor<T> relu6_backward(const Tensor<T>& x, const Tensor<T>& dy);

template <class T>
Tensor<T> global_avgpool_forward(const Tensor<T>& x);
template <class T>
Tensor<T> global_avgpool_backward(const Shape& input_shape, const Tensor<T>& dy);

template <class T>
struct DenseGrads {
  Tensor<T> dx;
  Tensor<T> dw;
  Tensor<T> db;
};

/// y = x W + b with x: N x D, W: D x K, b: K.
template <class T>
Tensor<T> dense_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);
template <class T>
DenseGrads<T> dense_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy);

/// Row-wise softmax(logits / temperature), max-subtracted.
template <class T>
Tensor<T> softmax_with_temperature(const Tensor<T>& logits, double temperature);
template <class T>
Tensor<T> log_softmax_with_temperature(const Tensor<T>& logits, double temperature);

}  // namespace dk
