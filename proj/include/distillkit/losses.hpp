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

// Training objectives: hard-label cross-entropy, temperature-scaled
// distillation divergence, attention maps and the attention-transfer penalty,
// and their weighted composition.
//
//   L_KD    = (1 - alpha) * CE + alpha * KL
//   L_total = (1 - alpha) * CE + alpha * KL + gamma * AT

#include <cstddef>
#include <span>
#include <string>

#include "distillkit/tensor.hpp"

namespace dk {

struct HyperParams {
  double alpha = 0.01;
  double temperature = 2.5;
  double gamma = 0.8;
  double overlay_p = 0.1;
  int attention_power = 2;
  double lr = 1e-3;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;

  /// Throws ConfigError naming the first field outside its range.
  void validate() const;

  /// Values reported as optimal after the hyperparameter search.
  static HyperParams published_optimal() { return {}; }
  /// Defaults of the reference training code (alpha 0.5, T 2.0, gamma 0.5, p 0.5).
  static HyperParams published_default() {
    HyperParams h;
    h.alpha = 0.5;
    h.temperature = 2.0;
    h.gamma = 0.5;
    h.overlay_p = 0.5;
    return h;
  }

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

template <class T>
struct LossAndGrad {
  double value = 0.0;
  Tensor<T> grad;
};

/// Mean over the batch of -log softmax(logits)[label].
template <class T>
LossAndGrad<T> cross_entropy(const Tensor<T>& logits, std::span<const int> labels);

/// KL(softmax(z_t/T) || softmax(z_s/T)) summed over classes, averaged over
/// the batch, times T^2. Gradient is with respect to the student logits.
template <class T>
LossAndGrad<T> kd_loss(const Tensor<T>& student_logits, const Tensor<T>& teacher_logits, double temperature);

double combine_kd(double ce, double kl, double alpha);

/// Per image: channel mean of |a|^power, then L2-normalized over the H*W
/// pixels. An all-zero map stays all-zero.
template <class T>
Tensor<T> attention_map(const Tensor<T>& activation, int power);

/// Vector-Jacobian product of attention_map with respect to the activation.
template <class T>
Tensor<T> attention_map_backward(const Tensor<T>& activation, int power, const Tensor<T>& dmap);

/// Batch mean of ||A_s - A_t||^2 over pixels. Gradient is for A_s.
template <class T>
LossAndGrad<T> at_loss(const Tensor<T>& student_map, const Tensor<T>& teacher_map);

struct LossBreakdown {
  double ce = 0.0;
  double kl = 0.0;
  double at = 0.0;
  double total = 0.0;
};

LossBreakdown total_loss(double ce, double kl, double at, double alpha, double gamma);

}  // namespace dk
