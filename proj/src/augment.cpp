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

#include "distillkit/augment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dk {

void AugmentPolicy::validate() const {
  if (!(overlay_p >= 0.0 && overlay_p <= 1.0)) throw ConfigError("overlay_p must lie in [0, 1]");
  if (!(scale_min > 0.0) || scale_min > scale_max) throw ConfigError("need 0 < scale_min <= scale_max");
  if (std::abs(blend_image + blend_map - 1.0) > 1e-12 || blend_image < 0.0 || blend_map < 0.0) {
    throw ConfigError("blend weights must be nonnegative and sum to 1");
  }
}

double sample_scale(Rng& rng, const AugmentPolicy& policy) {
  const double lo = std::log(policy.scale_min), hi = std::log(policy.scale_max);
  const double s = std::exp(lo + (hi - lo) * unit_draw(rng));
  return std::clamp(s, policy.scale_min, policy.scale_max);
}

Tensor<float> scale_map(const Tensor<float>& ig, double s) {
  Tensor<float> out(ig.shape());
  for (std::size_t i = 0; i < ig.numel(); ++i) {
    if (ig[i] < 0.0f) {
      throw ShapeError("scale_map: negative attribution " + std::to_string(ig[i]) + " at element " + std::to_string(i) +
                       "; expected channel-aggregated magnitudes");
    }
    out[i] = static_cast<float>(std::pow(static_cast<double>(ig[i]), s));
  }
  return out;
}

Tensor<float> normalize_map(const Tensor<float>& v) {
  Tensor<float> out(v.shape());
  if (v.empty()) return out;
  const auto [mn, mx] = std::minmax_element(v.vec().begin(), v.vec().end());
  const double lo = *mn, range = static_cast<double>(*mx) - lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < v.numel(); ++i) {
    out[i] = static_cast<float>(std::clamp((static_cast<double>(v[i]) - lo) / range, 0.0, 1.0));
  }
  return out;
}

Tensor<float> blend_overlay(const Tensor<float>& x, const Tensor<float>& map, const AugmentPolicy& policy) {
  require_rank(x.shape(), 3, "overlay image");
  require_shape(map.shape(), {x.dim(1), x.dim(2)}, "overlay map");
  const std::size_t c = x.dim(0), hw = x.dim(1) * x.dim(2);
  Tensor<float> out(x.shape());
  const float wi = static_cast<float>(policy.blend_image), wm = static_cast<float>(policy.blend_map);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t j = 0; j < hw; ++j) {
      const float px = x[ch * hw + j];
      if (!(px >= 0.0f && px <= 1.0f)) {
        throw ShapeError("overlay: image value " + std::to_string(px) + " outside [0, 1] at element " +
                         std::to_string(ch * hw + j) + " (augmentation must precede normalization)");
      }
      out[ch * hw + j] = std::clamp(wi * px + wm * map[j], 0.0f, 1.0f);
    }
  }
  return out;
}

Tensor<float> overlay(const Tensor<float>& x, const Tensor<float>& map, Rng& rng, const AugmentPolicy& policy) {
  const bool apply = unit_draw(rng) < policy.overlay_p;
  if (!apply) {
    for (float px : x.vec()) {
      if (!(px >= 0.0f && px <= 1.0f)) throw ShapeError("overlay: image value outside [0, 1]");
    }
    return x;
  }
  return blend_overlay(x, map, policy);
}

Tensor<float> augment_batch(const Tensor<float>& batch, std::span<const std::size_t> dataset_indices,
                            const IGStore& store, const AugmentPolicy& policy, std::uint64_t epoch) {
  require_rank(batch.shape(), 4, "augment_batch");
  if (dataset_indices.size() != batch.dim(0)) throw ShapeError("augment_batch: index count != batch size");
  if (store.height != batch.dim(2) || store.width != batch.dim(3)) {
    throw ShapeError("augment_batch: IG maps are " + std::to_string(store.height) + "x" + std::to_string(store.width) +
                     " but images are " + shape_str(batch.shape()));
  }
  if (policy.overlay_p == 0.0) return batch;
  Tensor<float> out = batch;
  const std::size_t per = batch.numel() / batch.dim(0);
  const Shape img_shape{batch.dim(1), batch.dim(2), batch.dim(3)};
  for (std::size_t i = 0; i < dataset_indices.size(); ++i) {
    const std::size_t idx = dataset_indices[i];
    Rng rng(derive_seed(policy.rng_seed, {epoch, idx}));
    const auto m = store.map(idx);
    Tensor<float> ig({store.height, store.width}, std::vector<float>(m.begin(), m.end()));
    const double s = sample_scale(rng, policy);
    const Tensor<float> hat = normalize_map(scale_map(ig, s));
    Tensor<float> x(img_shape, std::vector<float>(batch.data() + i * per, batch.data() + (i + 1) * per));
    const Tensor<float> y = overlay(x, hat, rng, policy);
    std::copy(y.vec().begin(), y.vec().end(), out.data() + i * per);
  }
  return out;
}

}  // namespace dk
