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

#include "distillkit/ig.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "distillkit/binio.hpp"
#include "distillkit/checkpoint.hpp"
#include "distillkit/layers.hpp"

namespace dk {

template <class T>
PathIntegral<T> integrate_path(const BatchGradFn<T>& fn, const Tensor<T>& x, const Tensor<T>& baseline,
                               std::size_t steps, std::size_t chunk) {
  require_rank(x.shape(), 3, "integrated gradients input");
  require_shape(baseline.shape(), x.shape(), "integrated gradients baseline");
  if (steps == 0) throw ShapeError("integrated gradients: steps must be >= 1");
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t per = x.numel();
  const Shape one = x.shape();

  std::vector<double> acc(per, 0.0);
  PathIntegral<T> out;
  out.steps = steps;
  std::vector<double> values;
  for (std::size_t k0 = 0; k0 <= steps; k0 += chunk) {
    const std::size_t kn = std::min(chunk, steps + 1 - k0);
    Tensor<T> pts({kn, one[0], one[1], one[2]});
    for (std::size_t j = 0; j < kn; ++j) {
      const double beta = static_cast<double>(k0 + j) / static_cast<double>(steps);
      T* dst = pts.data() + j * per;
      for (std::size_t i = 0; i < per; ++i) {
        dst[i] = static_cast<T>(static_cast<double>(baseline[i]) +
                                beta * (static_cast<double>(x[i]) - static_cast<double>(baseline[i])));
      }
    }
    Tensor<T> grads(pts.shape());
    values.assign(kn, 0.0);
    fn(pts, values, grads);
    for (std::size_t j = 0; j < kn; ++j) {
      const std::size_t k = k0 + j;
      const T* g = grads.data() + j * per;
      const double wgt = (k == 0 || k == steps) ? 0.5 : 1.0;
      for (std::size_t i = 0; i < per; ++i) {
        if (!std::isfinite(static_cast<double>(g[i]))) {
          throw NumericError("integrated gradients: non-finite gradient at path step " + std::to_string(k) + " of " +
                             std::to_string(steps));
        }
        acc[i] += wgt * static_cast<double>(g[i]);
      }
      if (k == 0) out.f_baseline = values[j];
      if (k == steps) out.f_input = values[j];
    }
  }
  out.raw = Tensor<T>(one);
  for (std::size_t i = 0; i < per; ++i) {
    out.raw[i] = static_cast<T>((static_cast<double>(x[i]) - static_cast<double>(baseline[i])) * acc[i] /
                                static_cast<double>(steps));
  }
  return out;
}

template <class T>
BatchGradFn<T> model_target_fn(const Model<T>& model, int target, IGTarget kind) {
  if (target < 0 || static_cast<std::size_t>(target) >= model.spec.num_classes) {
    throw ShapeError("integrated gradients: target class " + std::to_string(target) + " outside [0, " +
                     std::to_string(model.spec.num_classes) + ")");
  }
  return [&model, target, kind](const Tensor<T>& pts, std::vector<double>& values, Tensor<T>& grads) {
    Tape<T> tape;
    // Eval mode reads but never writes the running statistics.
    Model<T>& m = const_cast<Model<T>&>(model);
    const Tensor<T> logits = forward(m, pts, Mode::kEval, &tape).logits;
    const std::size_t n = logits.dim(0), k = logits.dim(1);
    Tensor<T> dlogits({n, k});
    if (kind == IGTarget::kLogit) {
      for (std::size_t i = 0; i < n; ++i) {
        values[i] = static_cast<double>(logits[i * k + target]);
        dlogits[i * k + target] = T(1);
      }
    } else {
      const Tensor<T> logp = log_softmax_with_temperature(logits, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        values[i] = static_cast<double>(logp[i * k + target]);
        for (std::size_t j = 0; j < k; ++j) {
          dlogits[i * k + j] = (j == static_cast<std::size_t>(target) ? T(1) : T(0)) - std::exp(logp[i * k + j]);
        }
      }
    }
    grads = backward(model, tape, dlogits).input;
  };
}

template <class T>
Tensor<T> aggregate(const Tensor<T>& raw) {
  require_rank(raw.shape(), 3, "aggregate");
  const std::size_t c = raw.dim(0), hw = raw.dim(1) * raw.dim(2);
  Tensor<T> out({raw.dim(1), raw.dim(2)});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t j = 0; j < hw; ++j) out[j] += std::abs(raw[ch * hw + j]);
  }
  return out;
}

template <class T>
AttributionMap integrated_gradients(const Model<T>& model, const Tensor<T>& x, const IGConfig& config) {
  Tensor<T> img = x.rank() == 4 && x.dim(0) == 1 ? x.reshaped({x.dim(1), x.dim(2), x.dim(3)}) : x;
  require_rank(img.shape(), 3, "integrated_gradients input");
  Tensor<T> base = config.baseline ? config.baseline->template cast<T>() : Tensor<T>(img.shape());
  const auto fn = model_target_fn(model, config.target, config.target_kind);
  const PathIntegral<T> p = integrate_path<T>(fn, img, base, config.steps, config.chunk);
  AttributionMap m;
  m.raw = p.raw.template cast<double>();
  m.aggregated = aggregate(m.raw);
  m.steps_used = config.steps;
  m.target_class = config.target;
  m.f_input = p.f_input;
  m.f_baseline = p.f_baseline;
  return m;
}

CompletenessResult completeness(const AttributionMap& map, double threshold) {
  CompletenessResult r;
  r.delta_f = map.f_input - map.f_baseline;
  for (double v : map.raw.vec()) r.attribution_sum += v;
  if (std::abs(r.delta_f) <= threshold) {
    r.degenerate = true;
    return r;
  }
  r.residual = std::abs(r.attribution_sum - r.delta_f) / std::abs(r.delta_f);
  return r;
}

template <class T>
CompletenessResult completeness_check(const Model<T>& model, const Tensor<T>& x, const IGConfig& config,
                                      double threshold) {
  return completeness(integrated_gradients(model, x, config), threshold);
}

template <class T>
ConvergenceReport steps_convergence(const Model<T>& model, const Tensor<T>& x, IGConfig config) {
  ConvergenceReport r;
  r.residual_coarse = completeness_check(model, x, config).residual;
  config.steps *= 2;
  r.residual_fine = completeness_check(model, x, config).residual;
  r.ratio = r.residual_coarse > 0.0 ? r.residual_fine / r.residual_coarse : 0.0;
  r.warn = r.ratio > 0.5;
  return r;
}

// --- store ---------------------------------------------------------------

namespace {

constexpr std::string_view kIgMagic = "DFIG1";

}  // namespace

std::span<const float> IGStore::map(std::size_t i) const {
  if (i >= count) throw DataError("IG store has no map for index " + std::to_string(i));
  return std::span<const float>(maps).subspan(i * height * width, height * width);
}

std::vector<std::uint8_t> encode_ig_store(const IGStore& s) {
  io::ByteWriter w;
  w.bytes(kIgMagic);
  w.u32(static_cast<std::uint32_t>(s.count));
  w.u32(static_cast<std::uint32_t>(s.height));
  w.u32(static_cast<std::uint32_t>(s.width));
  w.f32s(s.maps);
  return std::move(w.buffer());
}

IGStore decode_ig_store(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "IG map file");
  if (r.bytes(kIgMagic.size()) != kIgMagic) throw DataError("IG map file: bad magic (expected DFIG1)");
  IGStore s;
  s.count = r.u32();
  s.height = r.u32();
  s.width = r.u32();
  s.maps.resize(s.count * s.height * s.width);
  for (float& v : s.maps) v = r.f32();
  if (!r.at_end()) throw DataError("IG map file: trailing bytes at offset " + std::to_string(r.offset()));
  return s;
}

std::map<std::string, std::string> precompute_dataset(const Model<float>& model, const Dataset& data,
                                                      const PrecomputeOptions& opt,
                                                      const std::filesystem::path& out_path) {
  if (data.size() == 0) throw DataError("precompute_dataset: empty dataset");
  IGStore s;
  s.count = data.size();
  s.height = data.images.dim(2);
  s.width = data.images.dim(3);
  s.maps.reserve(s.count * s.height * s.width);
  IGConfig cfg = opt.ig;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Tensor<float> img = slice_batch(data.images, i);
    bool keep = true;
    if (opt.zero_misclassified) {
      const Tensor<float> logits = predict(model, img);
      const auto row = logits.span();
      keep = std::max_element(row.begin(), row.end()) - row.begin() == data.labels[i];
    }
    if (!keep) {
      s.maps.insert(s.maps.end(), s.height * s.width, 0.0f);
      continue;
    }
    cfg.target = data.labels[i];
    const AttributionMap m = integrated_gradients(model, img, cfg);
    for (double v : m.aggregated.vec()) s.maps.push_back(static_cast<float>(v));
  }
  std::map<std::string, std::string> manifest{
      {"model_fingerprint", model_fingerprint(model)},
      {"steps", std::to_string(cfg.steps)},
      {"baseline", opt.ig.baseline ? "custom" : "zeros"},
      {"dataset_sha256", data.checksum()},
      {"count", std::to_string(s.count)},
      {"target", opt.ig.target_kind == IGTarget::kLogit ? "logit" : "logprob"},
      {"zero_misclassified", opt.zero_misclassified ? "1" : "0"},
  };
  io::write_file(out_path, encode_ig_store(s));
  io::write_text(io::manifest_path(out_path), io::manifest_text(manifest));
  return manifest;
}

IGStore load_ig_store(const std::filesystem::path& path, const std::string& expect_fingerprint,
                      const std::string& expect_dataset_sha256) {
  IGStore s = decode_ig_store(io::read_file(path));
  const auto mbytes = io::read_file(io::manifest_path(path));
  s.manifest = io::parse_manifest(std::string(mbytes.begin(), mbytes.end()), "IG manifest");
  auto check = [&](const char* key, const std::string& want) {
    if (want.empty()) return;
    const auto it = s.manifest.find(key);
    const std::string got = it == s.manifest.end() ? "<missing>" : it->second;
    if (got != want) {
      throw DataError("IG store " + path.string() + ": " + key + " mismatch (manifest " + got + ", expected " + want +
                      "); recompute the attribution maps");
    }
  };
  check("model_fingerprint", expect_fingerprint);
  check("dataset_sha256", expect_dataset_sha256);
  return s;
}

#define DK_INSTANTIATE_IG(T)                                                                                        \
  template PathIntegral<T> integrate_path(const BatchGradFn<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t,  \
                                          std::size_t);                                                             \
  template BatchGradFn<T> model_target_fn(const Model<T>&, int, IGTarget);                                          \
  template Tensor<T> aggregate(const Tensor<T>&);                                                                   \
  template AttributionMap integrated_gradients(const Model<T>&, const Tensor<T>&, const IGConfig&);                 \
  template CompletenessResult completeness_check(const Model<T>&, const Tensor<T>&, const IGConfig&, double);       \
  template ConvergenceReport steps_convergence(const Model<T>&, const Tensor<T>&, IGConfig);

DK_INSTANTIATE_IG(float)
DK_INSTANTIATE_IG(double)

#undef DK_INSTANTIATE_IG

}  // namespace dk
