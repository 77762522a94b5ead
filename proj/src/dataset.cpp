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

#include "distillkit/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "distillkit/binio.hpp"
#include "distillkit/rng.hpp"

namespace dk {

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset d;
  d.images = gather_rows(images, indices);
  d.labels = batch_labels(indices);
  d.ids.reserve(indices.size());
  for (std::size_t i : indices) d.ids.push_back(ids.at(i));
  d.num_classes = num_classes;
  d.split = split;
  return d;
}

std::vector<int> Dataset::batch_labels(std::span<const std::size_t> indices) const {
  std::vector<int> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(labels.at(i));
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> c(num_classes, 0);
  for (int y : labels) ++c.at(static_cast<std::size_t>(y));
  return c;
}

std::string Dataset::checksum() const {
  io::ByteWriter w;
  for (std::size_t d : images.shape()) w.u32(static_cast<std::uint32_t>(d));
  for (int y : labels) w.u32(static_cast<std::uint32_t>(y));
  for (std::uint32_t id : ids) w.u32(id);
  w.f32s(images.span());
  return io::sha256_hex(w.buffer());
}

Dataset decode_cifar10_batch(std::span<const std::uint8_t> bytes, const std::string& source, std::uint32_t first_id) {
  if (bytes.size() % kCifarRecordBytes != 0) {
    const std::size_t bad = bytes.size() / kCifarRecordBytes * kCifarRecordBytes;
    throw DataError(source + ": truncated CIFAR-10 record at byte offset " + std::to_string(bad) + " (file size " +
                    std::to_string(bytes.size()) + " is not a multiple of " + std::to_string(kCifarRecordBytes) + ")");
  }
  const std::size_t n = bytes.size() / kCifarRecordBytes;
  Dataset d;
  d.images = Tensor<float>({n, 3, 32, 32});
  d.labels.resize(n);
  d.ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* rec = bytes.data() + i * kCifarRecordBytes;
    if (rec[0] > 9) {
      throw DataError(source + ": label " + std::to_string(rec[0]) + " out of range at byte offset " +
                      std::to_string(i * kCifarRecordBytes));
    }
    d.labels[i] = rec[0];
    d.ids[i] = first_id + static_cast<std::uint32_t>(i);
    float* dst = d.images.data() + i * 3072;
    for (std::size_t j = 0; j < 3072; ++j) dst[j] = static_cast<float>(rec[1 + j]) / 255.0f;
  }
  return d;
}

namespace {

Dataset concat(std::vector<Dataset> parts, const std::string& split) {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.size();
  Dataset d;
  d.images = Tensor<float>({n, 3, 32, 32});
  d.split = split;
  std::size_t off = 0;
  for (const auto& p : parts) {
    std::copy(p.images.vec().begin(), p.images.vec().end(), d.images.data() + off * 3072);
    d.labels.insert(d.labels.end(), p.labels.begin(), p.labels.end());
    d.ids.insert(d.ids.end(), p.ids.begin(), p.ids.end());
    off += p.size();
  }
  return d;
}

}  // namespace

Cifar10 load_cifar10_binary(const std::filesystem::path& dir) {
  std::vector<Dataset> train;
  std::uint32_t next_id = 0;
  for (int b = 1; b <= 5; ++b) {
    const auto path = dir / ("data_batch_" + std::to_string(b) + ".bin");
    const auto bytes = io::read_file(path);
    train.push_back(decode_cifar10_batch(bytes, path.string(), next_id));
    next_id += static_cast<std::uint32_t>(train.back().size());
  }
  const auto tpath = dir / "test_batch.bin";
  Dataset test = decode_cifar10_batch(io::read_file(tpath), tpath.string(), 0);
  test.split = "test";
  return {concat(std::move(train), "train"), std::move(test)};
}

Dataset generate_synthetic(const SyntheticOptions& opt) {
  if (opt.n_per_class == 0) throw ShapeError("generate_synthetic: n_per_class must be >= 1");
  if (opt.classes < 2) throw ShapeError("generate_synthetic: need at least 2 classes");
  constexpr double kPi = std::numbers::pi;
  const std::size_t s = opt.size;
  const std::size_t n = opt.n_per_class * opt.classes;
  Dataset d;
  d.images = Tensor<float>({n, 3, s, s});
  d.labels.resize(n);
  d.ids.resize(n);
  d.num_classes = opt.classes;
  d.split = "train";
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(s * s);
  for (std::size_t i = 0; i < n; ++i) {
    // Interleave classes so any prefix is near-balanced.
    const std::size_t c = i % opt.classes;
    const std::size_t family = c % 5;
    const std::size_t variant = (c / 5) % 2;
    const double base_freq = 2.0 + static_cast<double>(c / 10);  // cycles per image
    const double freq = (variant ? 1.7 * base_freq : base_freq) * (1.0 + 0.15 * (unit(rng) - 0.5));
    const double theta = (variant ? kPi / 2.0 : 0.0) + kPi / 4.0 * static_cast<double>(family % 2) + 0.25 * gauss(rng);
    const double phase = 2.0 * kPi * unit(rng);
    const double cx = 0.5 + 0.25 * (unit(rng) - 0.5), cy = 0.5 + 0.25 * (unit(rng) - 0.5);
    const double ct = std::cos(theta), st = std::sin(theta);
    for (std::size_t yy = 0; yy < s; ++yy) {
      for (std::size_t xx = 0; xx < s; ++xx) {
        const double x = (static_cast<double>(xx) + 0.5) / static_cast<double>(s) - cx;
        const double y = (static_cast<double>(yy) + 0.5) / static_cast<double>(s) - cy;
        const double u = x * ct + y * st, w = -x * st + y * ct;
        const double r = std::sqrt(x * x + y * y);
        double val = 0.0;
        switch (family) {
          case 0:  // grating
            val = 0.5 + 0.5 * std::sin(2 * kPi * freq * u + phase);
            break;
          case 1:  // bars
            val = std::sin(2 * kPi * freq * u + phase) > 0.0 ? 1.0 : 0.0;
            break;
          case 2:  // rings
            val = 0.5 + 0.5 * std::sin(2 * kPi * freq * r + phase);
            break;
          case 3:  // checkers
            val = std::sin(2 * kPi * 0.7 * freq * u + phase) * std::sin(2 * kPi * 0.7 * freq * w) > 0.0 ? 1.0 : 0.0;
            break;
          default: {  // blob on a ramp
            const double sigma = variant ? 0.12 : 0.24;
            val = 0.7 * std::exp(-r * r / (2 * sigma * sigma)) + 0.3 * (0.5 + u);
            break;
          }
        }
        v[yy * s + xx] = val;
      }
    }
    std::array<double, 3> fg{}, bg{};
    for (int ch = 0; ch < 3; ++ch) {
      fg[ch] = 0.55 + 0.45 * unit(rng);
      bg[ch] = 0.45 * unit(rng);
    }
    float* dst = d.images.data() + i * 3 * s * s;
    for (int ch = 0; ch < 3; ++ch) {
      for (std::size_t j = 0; j < s * s; ++j) {
        const double px = bg[ch] + (fg[ch] - bg[ch]) * v[j] + opt.noise * gauss(rng);
        dst[ch * s * s + j] = static_cast<float>(std::clamp(px, 0.0, 1.0));
      }
    }
    d.labels[i] = static_cast<int>(c);
    d.ids[i] = static_cast<std::uint32_t>(i);
  }
  return d;
}

Cifar10 synthetic_splits(const SyntheticOptions& opt, std::size_t test_per_class) {
  Cifar10 out;
  out.train = generate_synthetic(opt);
  SyntheticOptions t = opt;
  t.n_per_class = test_per_class;
  t.seed = derive_seed(opt.seed, {1});
  out.test = generate_synthetic(t);
  out.test.split = "test";
  const auto offset = static_cast<std::uint32_t>(out.train.size());
  for (auto& id : out.test.ids) id += offset;
  return out;
}

}  // namespace dk
