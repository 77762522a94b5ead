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

// Inner-loop kernels behind every dense layer. Each kernel has a portable
// scalar reference and an AVX2/FMA variant; the active table is chosen once
// at startup from CPUID and can be pinned with DISTILLKIT_ISA=scalar|avx2.

#include <cstddef>
#include <string_view>

namespace dk::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

template <class T>
struct KernelTable {
  // sum_i x[i] * y[i]
  T (*dot)(const T* x, const T* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(std::size_t n, T a, const T* x, T* y);
  // y[i] *= a
  void (*scale)(std::size_t n, T a, T* y);
  // out[i] = min(max(x[i], 0), 6)
  void (*relu6)(const T* x, T* out, std::size_t n);
  T (*sum)(const T* x, std::size_t n);
  // sum_i (x[i] - m)^2
  T (*sum_sq_dev)(const T* x, std::size_t n, T m);
};

/// True when the running CPU can execute the given variant.
bool isa_supported(Isa isa);

/// The variant selected for this process. Stable for the process lifetime
/// unless overridden with set_active_isa (tests only).
Isa active_isa();
void set_active_isa(Isa isa);

template <class T>
const KernelTable<T>& kernels(Isa isa);

template <class T>
const KernelTable<T>& kernels() {
  return kernels<T>(active_isa());
}

template <class T>
inline T dot(const T* x, const T* y, std::size_t n) {
  return kernels<T>().dot(x, y, n);
}
template <class T>
inline void axpy(std::size_t n, T a, const T* x, T* y) {
  kernels<T>().axpy(n, a, x, y);
}
template <class T>
inline void scale(std::size_t n, T a, T* y) {
  kernels<T>().scale(n, a, y);
}
template <class T>
inline void relu6(const T* x, T* out, std::size_t n) {
  kernels<T>().relu6(x, out, n);
}
template <class T>
inline T sum(const T* x, std::size_t n) {
  return kernels<T>().sum(x, n);
}
template <class T>
inline T sum_sq_dev(const T* x, std::size_t n, T m) {
  return kernels<T>().sum_sq_dev(x, n, m);
}

namespace detail {
template <class T>
const KernelTable<T>& scalar_table();
template <class T>
const KernelTable<T>& avx2_table();
}  // namespace detail

}  // namespace dk::simd
