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

#include "distillkit/netblocks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace dk {
namespace {

struct StageConfig {
  std::size_t expansion, channels, repeats, stride;
};

struct FamilyLayout {
  std::size_t stem_channels;
  std::size_t stem_stride;
  std::vector<StageConfig> stages;
  std::size_t head_channels;
  std::size_t input_hw;
  // removed InvertedResidual count -> attention source block_id
  std::map<std::size_t, int> attention_by_removal;
};

// CIFAR variant of MobileNetV2: stride-1 stem and stride-1 second stage.
const FamilyLayout& layout(Family f) {
  static const FamilyLayout kMobileNetV2{
      32,
      1,
      {{1, 16, 1, 1}, {6, 24, 2, 1}, {6, 32, 3, 2}, {6, 64, 4, 2}, {6, 96, 3, 1}, {6, 160, 3, 2}, {6, 320, 1, 1}},
      1280,
      32,
      {{2, 9}, {4, 9}, {6, 9}, {8, 4}, {10, 4}, {12, 4}, {14, 2}, {16, 0}}};
  static const FamilyLayout kMicroNet{16,
                                      2,
                                      {{1, 8, 1, 1}, {4, 16, 2, 2}, {4, 24, 2, 2}, {4, 32, 1, 1}},
                                      128,
                                      32,
                                      {{1, 3}, {2, 3}, {3, 3}, {4, 2}, {5, 0}}};
  return f == Family::kMicroNet ? kMicroNet : kMobileNetV2;
}

struct UnitPlan {
  std::string prefix;
  bool depthwise;
  std::size_t in, out, k;
  ConvGeom geom;
  bool act;
};

std::vector<UnitPlan> units_of(const BlockSpec& b) {
  const std::string p = "f" + std::to_string(b.block_id);
  std::vector<UnitPlan> u;
  switch (b.kind) {
    case BlockKind::kConvBNReLU:
      u.push_back({p, false, b.in_channels, b.out_channels, b.kernel, {b.stride, b.kernel / 2}, true});
      break;
    case BlockKind::kInvertedResidual: {
      const std::size_t hid = b.hidden_channels();
      if (b.expansion != 1) u.push_back({p + ".expand", false, b.in_channels, hid, 1, {1, 0}, true});
      u.push_back({p + ".dw", true, hid, hid, 3, {b.stride, 1}, true});
      u.push_back({p + ".project", false, hid, b.out_channels, 1, {1, 0}, false});
      break;
    }
    case BlockKind::kClassifier:
      break;
  }
  return u;
}

Shape unit_weight_shape(const UnitPlan& u) {
  return u.depthwise ? Shape{u.out, 1, u.k, u.k} : Shape{u.out, u.in, u.k, u.k};
}

}  // namespace

std::string block_kind_name(BlockKind k) {
  switch (k) {
    case BlockKind::kConvBNReLU:
      return "ConvBNReLU";
    case BlockKind::kInvertedResidual:
      return "InvertedResidual";
    case BlockKind::kClassifier:
      return "Classifier";
  }
  return "?";
}

BlockKind parse_block_kind(const std::string& s) {
  if (s == "ConvBNReLU") return BlockKind::kConvBNReLU;
  if (s == "InvertedResidual") return BlockKind::kInvertedResidual;
  if (s == "Classifier") return BlockKind::kClassifier;
  throw ShapeError("unknown block kind '" + s + "'");
}

std::string family_name(Family f) { return f == Family::kMicroNet ? "micronet" : "mobilenetv2"; }

Family parse_family(const std::string& s) {
  if (s == "mobilenetv2") return Family::kMobileNetV2;
  if (s == "micronet") return Family::kMicroNet;
  throw ConfigError("unknown model family '" + s + "' (expected mobilenetv2 or micronet)");
}

std::optional<std::size_t> ModelSpec::index_of(int block_id) const {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].block_id == block_id) return i;
  }
  return std::nullopt;
}

std::size_t ModelSpec::inverted_residual_count() const {
  return static_cast<std::size_t>(std::count_if(
      blocks.begin(), blocks.end(), [](const BlockSpec& b) { return b.kind == BlockKind::kInvertedResidual; }));
}

std::size_t ModelSpec::output_features() const {
  if (blocks.empty() || blocks.back().kind != BlockKind::kClassifier) {
    throw ShapeError("model spec '" + name + "' has no classifier");
  }
  return blocks.back().in_channels;
}

void validate(const ModelSpec& spec) {
  if (spec.blocks.size() < 2) throw ShapeError("model spec needs at least a stem and a classifier");
  if (spec.blocks.front().kind != BlockKind::kConvBNReLU) throw ShapeError("first block must be ConvBNReLU");
  if (spec.blocks.back().kind != BlockKind::kClassifier) throw ShapeError("last block must be Classifier");
  if (spec.num_classes < 2) throw ShapeError("num_classes must be at least 2");
  if (spec.blocks.front().in_channels != spec.input_shape[0]) {
    throw ShapeError("stem input channels do not match the input shape");
  }
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const BlockSpec& b = spec.blocks[i];
    if (b.in_channels == 0 || b.out_channels == 0 || b.expansion == 0) {
      throw ShapeError("block " + std::to_string(b.block_id) + " has a zero width");
    }
    if (b.stride != 1 && b.stride != 2) throw ShapeError("block " + std::to_string(b.block_id) + " stride must be 1 or 2");
    if (b.kind == BlockKind::kClassifier && i + 1 != spec.blocks.size()) {
      throw ShapeError("Classifier must be the last block");
    }
    if (i > 0 && spec.blocks[i - 1].out_channels != b.in_channels) {
      throw ShapeError("block " + std::to_string(b.block_id) + " expects " + std::to_string(b.in_channels) +
                       " input channels but block " + std::to_string(spec.blocks[i - 1].block_id) + " produces " +
                       std::to_string(spec.blocks[i - 1].out_channels));
    }
  }
  if (spec.blocks.back().out_channels != spec.num_classes) throw ShapeError("classifier width != num_classes");
  if (spec.attention_source >= 0) {
    const auto idx = spec.index_of(spec.attention_source);
    if (!idx || spec.blocks[*idx].kind == BlockKind::kClassifier) {
      throw ShapeError("attention source block " + std::to_string(spec.attention_source) + " is not retained");
    }
  }
}

ModelSpec teacher_spec(Family family, std::size_t num_classes) {
  if (num_classes < 2) throw ShapeError("num_classes must be at least 2");
  const FamilyLayout& l = layout(family);
  ModelSpec s;
  s.name = family_name(family) + "-teacher";
  s.family = family;
  s.num_classes = num_classes;
  s.input_shape = {3, l.input_hw, l.input_hw};
  int id = 0;
  s.blocks.push_back({BlockKind::kConvBNReLU, id++, 3, l.stem_channels, 1, l.stem_stride, 3});
  std::size_t in = l.stem_channels;
  for (const StageConfig& st : l.stages) {
    for (std::size_t r = 0; r < st.repeats; ++r) {
      s.blocks.push_back({BlockKind::kInvertedResidual, id++, in, st.channels, st.expansion, r == 0 ? st.stride : 1, 3});
      in = st.channels;
    }
  }
  s.blocks.push_back({BlockKind::kConvBNReLU, id++, in, l.head_channels, 1, 1, 1});
  s.blocks.push_back({BlockKind::kClassifier, id++, l.head_channels, num_classes, 1, 1, 1});
  validate(s);
  return s;
}

std::vector<std::size_t> valid_removals(Family family) {
  std::vector<std::size_t> out;
  for (const auto& [n, src] : layout(family).attention_by_removal) out.push_back(n);
  return out;
}

ModelSpec derive_student(const ModelSpec& teacher, std::size_t n_blocks_removed) {
  if (n_blocks_removed == 0) return teacher;
  const FamilyLayout& l = layout(teacher.family);
  const auto it = l.attention_by_removal.find(n_blocks_removed);
  if (it == l.attention_by_removal.end()) {
    std::string valid;
    for (std::size_t n : valid_removals(teacher.family)) valid += (valid.empty() ? "" : ", ") + std::to_string(n);
    throw ShapeError("invalid block removal count " + std::to_string(n_blocks_removed) + " for " +
                     family_name(teacher.family) + "; valid configurations: 0, " + valid);
  }
  const std::size_t n_ir = teacher.inverted_residual_count();
  if (n_blocks_removed >= n_ir) throw ShapeError("block removal would leave no InvertedResidual block");
  const std::size_t keep = n_ir - n_blocks_removed;

  ModelSpec s;
  s.name = family_name(teacher.family) + "-student-r" + std::to_string(n_blocks_removed);
  s.family = teacher.family;
  s.num_classes = teacher.num_classes;
  s.input_shape = teacher.input_shape;
  std::size_t seen_ir = 0;
  for (const BlockSpec& b : teacher.blocks) {
    if (b.kind == BlockKind::kInvertedResidual) {
      if (seen_ir++ >= keep) break;
    }
    s.blocks.push_back(b);
  }
  BlockSpec cls = teacher.blocks.back();
  cls.in_channels = s.blocks.back().out_channels;
  s.blocks.push_back(cls);
  s.attention_source = it->second;
  validate(s);
  return s;
}

std::array<std::size_t, 3> block_output_shape(const ModelSpec& spec, int block_id) {
  std::size_t h = spec.input_shape[1], w = spec.input_shape[2];
  for (const BlockSpec& b : spec.blocks) {
    if (b.kind == BlockKind::kClassifier) break;
    const std::size_t k = b.kind == BlockKind::kConvBNReLU ? b.kernel : 3;
    const ConvGeom g{b.stride, k / 2};
    h = conv_out_size(h, k, g);
    w = conv_out_size(w, k, g);
    if (b.block_id == block_id) return {b.out_channels, h, w};
  }
  throw ShapeError("block " + std::to_string(block_id) + " is not a retained feature block of '" + spec.name + "'");
}

std::vector<std::pair<std::string, Shape>> parameter_shapes(const ModelSpec& spec) {
  std::vector<std::pair<std::string, Shape>> out;
  for (const BlockSpec& b : spec.blocks) {
    if (b.kind == BlockKind::kClassifier) {
      out.emplace_back("classifier.w", Shape{b.in_channels, b.out_channels});
      out.emplace_back("classifier.b", Shape{b.out_channels});
      continue;
    }
    for (const UnitPlan& u : units_of(b)) {
      out.emplace_back(u.prefix + ".conv.w", unit_weight_shape(u));
      out.emplace_back(u.prefix + ".bn.gamma", Shape{u.out});
      out.emplace_back(u.prefix + ".bn.beta", Shape{u.out});
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::size_t>> batchnorm_layers(const ModelSpec& spec) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const BlockSpec& b : spec.blocks) {
    for (const UnitPlan& u : units_of(b)) out.emplace_back(u.prefix + ".bn", u.out);
  }
  return out;
}

std::size_t param_count(const ModelSpec& spec) {
  std::size_t n = 0;
  for (const auto& [name, shape] : parameter_shapes(spec)) n += shape_numel(shape);
  return n;
}

std::size_t layer_count(const ModelSpec& spec) {
  std::size_t n = 0;
  for (const BlockSpec& b : spec.blocks) n += b.kind == BlockKind::kClassifier ? 1 : units_of(b).size();
  return n;
}

double compression_factor(std::size_t teacher_params, std::size_t student_params) {
  if (teacher_params == 0 || student_params == 0) throw ShapeError("compression_factor needs positive parameter counts");
  return static_cast<double>(teacher_params) / static_cast<double>(student_params);
}

// ---------------------------------------------------------------------------

template <class T>
std::size_t Model<T>::param_index(const std::string& name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i) {
    if (param_names[i] == name) return i;
  }
  throw ShapeError("model '" + spec.name + "' has no parameter '" + name + "'");
}

template <class T>
std::size_t Model<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params) n += p.numel();
  return n;
}

template <class T>
Model<T> instantiate(const ModelSpec& spec, std::uint64_t seed) {
  validate(spec);
  Model<T> m;
  m.spec = spec;
  std::mt19937_64 rng(seed);
  for (auto& [name, shape] : parameter_shapes(spec)) {
    Tensor<T> t(shape);
    const bool is_gamma = name.ends_with(".gamma");
    const bool is_zero = name.ends_with(".beta") || name == "classifier.b";
    if (is_gamma) {
      t.fill(T(1));
    } else if (!is_zero) {
      // fan_in: dense D x K uses D; conv O x I x k x k uses I*k*k
      const std::size_t fan_in = shape.size() == 2 ? shape[0] : shape[1] * shape[2] * shape[3];
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (auto& v : t.vec()) v = static_cast<T>(dist(rng));
    }
    m.param_names.push_back(name);
    m.params.push_back(std::move(t));
  }
  for (auto& [name, c] : batchnorm_layers(spec)) {
    m.bn_names.push_back(name);
    m.bn_running.push_back({Tensor<T>({c}, T(0)), Tensor<T>({c}, T(1))});
  }
  return m;
}

template <class T>
std::size_t copy_shared_weights(const Model<T>& src, Model<T>& dst) {
  std::size_t copied = 0;
  for (std::size_t i = 0; i < dst.param_names.size(); ++i) {
    for (std::size_t j = 0; j < src.param_names.size(); ++j) {
      if (src.param_names[j] == dst.param_names[i] && src.params[j].shape() == dst.params[i].shape()) {
        dst.params[i] = src.params[j];
        ++copied;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < dst.bn_names.size(); ++i) {
    for (std::size_t j = 0; j < src.bn_names.size(); ++j) {
      if (src.bn_names[j] == dst.bn_names[i] && src.bn_running[j].mean.shape() == dst.bn_running[i].mean.shape()) {
        dst.bn_running[i] = src.bn_running[j];
        ++copied;
        break;
      }
    }
  }
  return copied;
}

// --- forward / backward ------------------------------------------------------

namespace {

// Parameters are laid out per unit as (conv.w, bn.gamma, bn.beta), then the
// classifier (w, b); BN running stats follow the same unit order.
template <class T>
Tensor<T> run_unit(Model<T>& m, const UnitPlan& u, std::size_t& pcur, std::size_t& bcur, const Tensor<T>& x,
                   Mode mode, UnitCache<T>* cache) {
  const Tensor<T>& w = m.params[pcur];
  const Tensor<T>& gamma = m.params[pcur + 1];
  const Tensor<T>& beta = m.params[pcur + 2];
  pcur += 3;
  BatchNormRunning<T>& running = m.bn_running[bcur++];
  Tensor<T> y = u.depthwise ? depthwise_conv_forward(x, w, u.geom) : conv2d_forward(x, w, u.geom);
  Tensor<T> z = batchnorm_forward(y, gamma, beta, running, mode, cache ? &cache->bn : nullptr);
  Tensor<T> out = u.act ? relu6_forward(z) : z;
  if (cache) {
    cache->input = x;
    if (u.act) cache->pre_act = std::move(z);
  }
  return out;
}

}  // namespace

template <class T>
ForwardOutput<T> forward(Model<T>& model, const Tensor<T>& x, Mode mode, Tape<T>* tape, int tap) {
  const ModelSpec& spec = model.spec;
  require_rank(x.shape(), 4, "forward input");
  require_shape({x.dim(1), x.dim(2), x.dim(3)}, {spec.input_shape[0], spec.input_shape[1], spec.input_shape[2]},
                "forward input (per image)");
  if (tap >= 0) {
    const auto idx = spec.index_of(tap);
    if (!idx || spec.blocks[*idx].kind == BlockKind::kClassifier) {
      throw ShapeError("attention tap block " + std::to_string(tap) + " is not retained in '" + spec.name + "'");
    }
  }
  if (tape) {
    tape->blocks.assign(spec.blocks.size(), {});
    tape->input_shape = x.shape();
    tape->tap = tap;
    tape->recorded = false;
  }
  ForwardOutput<T> out;
  std::size_t pcur = 0, bcur = 0;
  Tensor<T> h = x;
  for (std::size_t bi = 0; bi < spec.blocks.size(); ++bi) {
    const BlockSpec& b = spec.blocks[bi];
    BlockCache<T>* bc = tape ? &tape->blocks[bi] : nullptr;
    if (b.kind == BlockKind::kClassifier) {
      Tensor<T> pooled = global_avgpool_forward(h);
      out.logits = dense_forward(pooled, model.params[pcur], model.params[pcur + 1]);
      if (bc) {
        bc->pool_input_shape = h.shape();
        bc->pooled = std::move(pooled);
      }
      break;
    }
    const auto units = units_of(b);
    if (bc) bc->units.resize(units.size());
    Tensor<T> y = h;
    for (std::size_t ui = 0; ui < units.size(); ++ui) {
      y = run_unit(model, units[ui], pcur, bcur, y, mode, bc ? &bc->units[ui] : nullptr);
    }
    if (b.has_skip()) {
      for (std::size_t i = 0; i < y.numel(); ++i) y[i] += h[i];
    }
    h = std::move(y);
    if (b.block_id == tap) out.attention_source = h;
  }
  if (tape) tape->recorded = true;
  return out;
}

template <class T>
Tensor<T> predict(const Model<T>& model, const Tensor<T>& x) {
  // Eval mode reads but never writes the running statistics.
  return forward(const_cast<Model<T>&>(model), x, Mode::kEval).logits;
}

template <class T>
ForwardOutput<T> forward_with_attention(const Model<T>& model, const Tensor<T>& x, std::optional<int> tap) {
  const int t = tap.value_or(model.spec.attention_source);
  if (t < 0) throw ShapeError("model '" + model.spec.name + "' has no attention source");
  return forward(const_cast<Model<T>&>(model), x, Mode::kEval, static_cast<Tape<T>*>(nullptr), t);
}

template <class T>
ModelGrads<T> backward(const Model<T>& model, const Tape<T>& tape, const Tensor<T>& dlogits, const Tensor<T>* dtap) {
  if (!tape.recorded) throw std::logic_error("backward called without a recorded forward pass");
  const ModelSpec& spec = model.spec;
  if (dtap && tape.tap < 0) throw ShapeError("tap gradient given but the forward pass had no tap");
  ModelGrads<T> g;
  g.params.reserve(model.params.size());
  for (const auto& p : model.params) g.params.emplace_back(p.shape());

  std::size_t pcur = model.params.size();
  Tensor<T> dh;
  for (std::size_t bi = spec.blocks.size(); bi-- > 0;) {
    const BlockSpec& b = spec.blocks[bi];
    const BlockCache<T>& bc = tape.blocks[bi];
    if (b.kind == BlockKind::kClassifier) {
      pcur -= 2;
      require_shape(dlogits.shape(), {bc.pooled.dim(0), b.out_channels}, "backward logits gradient");
      DenseGrads<T> dg = dense_backward(bc.pooled, model.params[pcur], dlogits);
      g.params[pcur] = std::move(dg.dw);
      g.params[pcur + 1] = std::move(dg.db);
      dh = global_avgpool_backward(bc.pool_input_shape, dg.dx);
      continue;
    }
    if (b.block_id == tape.tap && dtap) {
      require_shape(dtap->shape(), dh.shape(), "backward tap gradient");
      for (std::size_t i = 0; i < dh.numel(); ++i) dh[i] += (*dtap)[i];
    }
    const auto units = units_of(b);
    Tensor<T> dy = dh;
    for (std::size_t ui = units.size(); ui-- > 0;) {
      const UnitPlan& u = units[ui];
      const UnitCache<T>& uc = bc.units[ui];
      pcur -= 3;
      if (u.act) dy = relu6_backward(uc.pre_act, dy);
      BatchNormGrads<T> bg = batchnorm_backward(dy, model.params[pcur + 1], uc.bn);
      g.params[pcur + 1] = std::move(bg.dgamma);
      g.params[pcur + 2] = std::move(bg.dbeta);
      ConvGrads<T> cg = u.depthwise ? depthwise_conv_backward(uc.input, model.params[pcur], u.geom, bg.dx)
                                    : conv2d_backward(uc.input, model.params[pcur], u.geom, bg.dx);
      g.params[pcur] = std::move(cg.dw);
      dy = std::move(cg.dx);
    }
    if (b.has_skip()) {
      for (std::size_t i = 0; i < dy.numel(); ++i) dy[i] += dh[i];
    }
    dh = std::move(dy);
  }
  g.input = std::move(dh);
  return g;
}

#define DK_INSTANTIATE_MODEL(T)                                                                                   \
  template struct Model<T>;                                                                                       \
  template Model<T> instantiate<T>(const ModelSpec&, std::uint64_t);                                              \
  template std::size_t copy_shared_weights(const Model<T>&, Model<T>&);                                           \
  template ForwardOutput<T> forward(Model<T>&, const Tensor<T>&, Mode, Tape<T>*, int);                            \
  template Tensor<T> predict(const Model<T>&, const Tensor<T>&);                                                  \
  template ForwardOutput<T> forward_with_attention(const Model<T>&, const Tensor<T>&, std::optional<int>);        \
  template ModelGrads<T> backward(const Model<T>&, const Tape<T>&, const Tensor<T>&, const Tensor<T>*);

DK_INSTANTIATE_MODEL(float)
DK_INSTANTIATE_MODEL(double)

#undef DK_INSTANTIATE_MODEL

}  // namespace dk
