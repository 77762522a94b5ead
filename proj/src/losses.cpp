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

#include "distillkit/losses.hpp"

#include <cmath>
#include <string>

#include "distillkit/layers.hpp"

namespace dk {

void HyperParams::validate() const {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in01(alpha)) throw ConfigError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive, got " + std::to_string(temperature));
  if (!in01(gamma)) throw ConfigError("gamma must lie in [0, 1], got " + std::to_string(gamma));
  if (!in01(overlay_p)) throw ConfigError("overlay_p must lie in [0, 1], got " + std::to_string(overlay_p));
  if (attention_power < 1) throw ConfigError("attention_power must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (epochs == 0) throw ConfigError("epochs must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
}

template <class T>
LossAndGrad<T> cross_entropy(const Tensor<T>& logits, std::span<const int> labels) {
  require_rank(logits.shape(), 2, "cross_entropy");
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  if (labels.size() != n) {
    throw ShapeError("cross_entropy: " + std::to_string(labels.size()) + " labels for " + std::to_string(n) + " rows");
  }
  Tensor<T> logp = log_softmax_with_temperature(logits, 1.0);
  LossAndGrad<T> out{0.0, Tensor<T>({n, k})};
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= k) {
      throw ShapeError("cross_entropy: label " + std::to_string(y) + " outside [0, " + std::to_string(k) + ")");
    }
    acc -= static_cast<double>(logp[i * k + y]);
    for (std::size_t j = 0; j < k; ++j) {
      const T p = std::exp(logp[i * k + j]);
      out.grad[i * k + j] = (p - (static_cast<std::size_t>(y) == j ? T(1) : T(0))) / static_cast<T>(n);
    }
  }
  out.value = acc / static_cast<double>(n);
  return out;
}

template <class T>
LossAndGrad<T> kd_loss(const Tensor<T>& student_logits, const Tensor<T>& teacher_logits, double temperature) {
  require_shape(student_logits.shape(), teacher_logits.shape(), "kd_loss teacher logits");
  const std::size_t n = student_logits.dim(0), k = student_logits.dim(1);
  const Tensor<T> ls = log_softmax_with_temperature(student_logits, temperature);
  const Tensor<T> lt = log_softmax_with_temperature(teacher_logits, temperature);
  LossAndGrad<T> out{0.0, Tensor<T>({n, k})};
  const double t2 = temperature * temperature;
  double acc = 0.0;
  for (std::size_t i = 0; i < n * k; ++i) {
    const double pt = std::exp(static_cast<double>(lt[i]));
    acc += pt * (static_cast<double>(lt[i]) - static_cast<double>(ls[i]));
    const double ps = std::exp(static_cast<double>(ls[i]));
    // d/dz_s of T^2/N * KL = T/N * (p_s - p_t)
    out.grad[i] = static_cast<T>(temperature / static_cast<double>(n) * (ps - pt));
  }
  // Rounding can leave a tiny negative sum for identical distributions.
  out.value = std::max(0.0, acc * t2 / static_cast<double>(n));
  return out;
}

double combine_kd(double ce, double kl, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  return (1.0 - alpha) * ce + alpha * kl;
}

namespace {

template <class T>
void channel_power_mean(const Tensor<T>& a, int power, std::size_t img, std::vector<double>& q) {
  const std::size_t c = a.dim(1), hw = a.dim(2) * a.dim(3);
  q.assign(hw, 0.0);
  for (std::size_t ch = 0; ch < c; ++ch) {
    const T* src = a.data() + (img * c + ch) * hw;
    for (std::size_t j = 0; j < hw; ++j) q[j] += std::pow(std::abs(static_cast<double>(src[j])), power);
  }
  for (double& v : q) v /= static_cast<double>(c);
}

}  // namespace

template <class T>
Tensor<T> attention_map(const Tensor<T>& activation, int power) {
  require_rank(activation.shape(), 4, "attention_map");
  if (power < 1) throw ShapeError("attention_map: power must be >= 1");
  const std::size_t n = activation.dim(0), h = activation.dim(2), w = activation.dim(3);
  Tensor<T> out({n, h, w});
  std::vector<double> q;
  for (std::size_t i = 0; i < n; ++i) {
    channel_power_mean(activation, power, i, q);
    double norm = 0.0;
    for (double v : q) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    for (std::size_t j = 0; j < h * w; ++j) out[i * h * w + j] = static_cast<T>(q[j] / norm);
  }
  return out;
}

template <class T>
Tensor<T> attention_map_backward(const Tensor<T>& activation, int power, const Tensor<T>& dmap) {
  require_rank(activation.shape(), 4, "attention_map_backward");
  const std::size_t n = activation.dim(0), c = activation.dim(1), hw = activation.dim(2) * activation.dim(3);
  require_shape(dmap.shape(), {n, activation.dim(2), activation.dim(3)}, "attention_map_backward upstream gradient");
  Tensor<T> da(activation.shape());
  std::vector<double> q, dq(hw);
  for (std::size_t i = 0; i < n; ++i) {
    channel_power_mean(activation, power, i, q);
    double norm = 0.0;
    for (double v : q) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    // A = q / |q|  =>  dq = (dA - A (A . dA)) / |q|
    double adot = 0.0;
    for (std::size_t j = 0; j < hw; ++j) adot += q[j] / norm * static_cast<double>(dmap[i * hw + j]);
    for (std::size_t j = 0; j < hw; ++j) dq[j] = (static_cast<double>(dmap[i * hw + j]) - q[j] / norm * adot) / norm;
    for (std::size_t ch = 0; ch < c; ++ch) {
      const T* src = activation.data() + (i * c + ch) * hw;
      T* dst = da.data() + (i * c + ch) * hw;
      for (std::size_t j = 0; j < hw; ++j) {
        const double a = static_cast<double>(src[j]);
        if (a == 0.0) continue;
        const double d = power * std::pow(std::abs(a), power - 1) * (a > 0 ? 1.0 : -1.0) / static_cast<double>(c);
        dst[j] = static_cast<T>(dq[j] * d);
      }
    }
  }
  return da;
}

template <class T>
LossAndGrad<T> at_loss(const Tensor<T>& student_map, const Tensor<T>& teacher_map) {
  if (student_map.shape() != teacher_map.shape()) {
    throw ShapeError("at_loss: attention map shapes differ: student " + shape_str(student_map.shape()) + " vs teacher " +
                     shape_str(teacher_map.shape()));
  }
  if (student_map.rank() < 2) throw ShapeError("at_loss: maps need a batch axis");
  const std::size_t n = student_map.dim(0);
  LossAndGrad<T> out{0.0, Tensor<T>(student_map.shape())};
  double acc = 0.0;
  for (std::size_t i = 0; i < student_map.numel(); ++i) {
    const double d = static_cast<double>(student_map[i]) - static_cast<double>(teacher_map[i]);
    acc += d * d;
    out.grad[i] = static_cast<T>(2.0 * d / static_cast<double>(n));
  }
  out.value = acc / static_cast<double>(n);
  return out;
}

LossBreakdown total_loss(double ce, double kl, double at, double alpha, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  LossBreakdown b{ce, kl, at, 0.0};
  b.total = combine_kd(ce, kl, alpha) + gamma * at;
  return b;
}

#define DK_INSTANTIATE_LOSSES(T)                                                              \
  template LossAndGrad<T> cross_entropy(const Tensor<T>&, std::span<const int>);              \
  template LossAndGrad<T> kd_loss(const Tensor<T>&, const Tensor<T>&, double);                \
  template Tensor<T> attention_map(const Tensor<T>&, int);                                    \
  template Tensor<T> attention_map_backward(const Tensor<T>&, int, const Tensor<T>&);         \
  template LossAndGrad<T> at_loss(const Tensor<T>&, const Tensor<T>&);

DK_INSTANTIATE_LOSSES(float)
DK_INSTANTIATE_LOSSES(double)

#undef DK_INSTANTIATE_LOSSES

}  // namespace dk
