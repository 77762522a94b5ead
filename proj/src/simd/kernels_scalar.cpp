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

#include <algorithm>

#include "distillkit/simd.hpp"

namespace dk::simd::detail {
namespace {

template <class T>
T dot_scalar(const T* x, const T* y, std::size_t n) {
  T acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

template <class T>
void axpy_scalar(std::size_t n, T a, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <class T>
void scale_scalar(std::size_t n, T a, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] *= a;
}

template <class T>
void relu6_scalar(const T* x, T* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::min(std::max(x[i], T(0)), T(6));
}

template <class T>
T sum_scalar(const T* x, std::size_t n) {
  T acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

template <class T>
T sum_sq_dev_scalar(const T* x, std::size_t n, T m) {
  T acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const T d = x[i] - m;
    acc += d * d;
  }
  return acc;
}

template <class T>
const KernelTable<T> kTable{&dot_scalar<T>,  &axpy_scalar<T>, &scale_scalar<T>,
                            &relu6_scalar<T>, &sum_scalar<T>, &sum_sq_dev_scalar<T>};

}  // namespace

template <class T>
const KernelTable<T>& scalar_table() {
  return kTable<T>;
}

template const KernelTable<float>& scalar_table<float>();
template const KernelTable<double>& scalar_table<double>();

}  // namespace dk::simd::detail
