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

#include "distillkit/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "distillkit/simd.hpp"

namespace dk {
namespace {

struct ConvDims {
  std::size_t n, c, h, w;  // input
  std::size_t o, k;        // filters, kernel size
  std::size_t ho, wo;      // output
};

template <class T>
ConvDims check_conv(const Tensor<T>& x, const Tensor<T>& w, ConvGeom g, bool depthwise, const char* what) {
  require_rank(x.shape(), 4, what);
  require_rank(w.shape(), 4, what);
  if (g.stride == 0) throw ShapeError(std::string(what) + ": stride must be positive");
  const std::size_t c = x.dim(1);
  if (depthwise) {
    if (w.dim(0) != c || w.dim(1) != 1) {
      throw ShapeError(std::string(what) + ": input " + shape_str(x.shape()) + " incompatible with depthwise weight " +
                       shape_str(w.shape()));
    }
  } else if (w.dim(1) != c) {
    throw ShapeError(std::string(what) + ": input " + shape_str(x.shape()) + " has " + std::to_string(c) +
                     " channels but weight " + shape_str(w.shape()) + " expects " + std::to_string(w.dim(1)));
  }
  const std::size_t k = w.dim(2);
  if (w.dim(3) != k) throw ShapeError(std::string(what) + ": non-square kernel " + shape_str(w.shape()));
  if (x.dim(2) + 2 * g.pad < k || x.dim(3) + 2 * g.pad < k) {
    throw ShapeError(std::string(what) + ": kernel " + shape_str(w.shape()) + " does not fit input " +
                     shape_str(x.shape()) + " with padding " + std::to_string(g.pad));
  }
  ConvDims d{x.dim(0), c, x.dim(2), x.dim(3), w.dim(0), k, 0, 0};
  d.ho = conv_out_size(d.h, k, g);
  d.wo = conv_out_size(d.w, k, g);
  return d;
}

bool is_pointwise(const ConvDims& d, ConvGeom g) { return d.k == 1 && g.stride == 1 && g.pad == 0; }

// col[(c*k + kh)*k + kw][oh*wo + ow]
template <class T>
void im2col(const T* img, const ConvDims& d, ConvGeom g, T* col) {
  const std::size_t p = d.ho * d.wo;
  for (std::size_t c = 0; c < d.c; ++c) {
    const T* plane = img + c * d.h * d.w;
    for (std::size_t kh = 0; kh < d.k; ++kh) {
      for (std::size_t kw = 0; kw < d.k; ++kw) {
        T* row = col + ((c * d.k + kh) * d.k + kw) * p;
        for (std::size_t oh = 0; oh < d.ho; ++oh) {
          const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * g.stride + kh) - static_cast<std::ptrdiff_t>(g.pad);
          T* out = row + oh * d.wo;
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(d.h)) {
            std::fill_n(out, d.wo, T(0));
            continue;
          }
          const T* src = plane + ih * d.w;
          for (std::size_t ow = 0; ow < d.wo; ++ow) {
            const std::ptrdiff_t iw =
                static_cast<std::ptrdiff_t>(ow * g.stride + kw) - static_cast<std::ptrdiff_t>(g.pad);
            out[ow] = (iw < 0 || iw >= static_cast<std::ptrdiff_t>(d.w)) ? T(0) : src[iw];
          }
        }
      }
    }
  }
}

template <class T>
void col2im_add(const T* col, const ConvDims& d, ConvGeom g, T* img) {
  const std::size_t p = d.ho * d.wo;
  for (std::size_t c = 0; c < d.c; ++c) {
    T* plane = img + c * d.h * d.w;
    for (std::size_t kh = 0; kh < d.k; ++kh) {
      for (std::size_t kw = 0; kw < d.k; ++kw) {
        const T* row = col + ((c * d.k + kh) * d.k + kw) * p;
        for (std::size_t oh = 0; oh < d.ho; ++oh) {
          const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * g.stride + kh) - static_cast<std::ptrdiff_t>(g.pad);
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(d.h)) continue;
          T* dst = plane + ih * d.w;
          const T* src = row + oh * d.wo;
          for (std::size_t ow = 0; ow < d.wo; ++ow) {
            const std::ptrdiff_t iw =
                static_cast<std::ptrdiff_t>(ow * g.stride + kw) - static_cast<std::ptrdiff_t>(g.pad);
            if (iw >= 0 && iw < static_cast<std::ptrdiff_t>(d.w)) dst[iw] += src[ow];
          }
        }
      }
    }
  }
}

// Valid output range [lo, hi) along one axis for kernel tap `kk`.
inline void tap_range(std::size_t kk, std::size_t pad, std::size_t stride, std::size_t in, std::size_t out,
                      std::size_t& lo, std::size_t& hi) {
  // need 0 <= o*stride + kk - pad < in
  lo = kk >= pad ? 0 : (pad - kk + stride - 1) / stride;
  const std::ptrdiff_t lim = static_cast<std::ptrdiff_t>(in) + static_cast<std::ptrdiff_t>(pad) -
                             static_cast<std::ptrdiff_t>(kk);  // o*stride < lim
  if (lim <= 0) {
    hi = lo;
    return;
  }
  hi = std::min(out, static_cast<std::size_t>((lim - 1) / static_cast<std::ptrdiff_t>(stride)) + 1);
  if (hi < lo) hi = lo;
}

}  // namespace

template <class T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& w, ConvGeom g) {
  const ConvDims d = check_conv(x, w, g, false, "conv2d_forward");
  const std::size_t p = d.ho * d.wo;
  const std::size_t r = d.c * d.k * d.k;
  Tensor<T> y({d.n, d.o, d.ho, d.wo});
  const bool pw = is_pointwise(d, g);
  std::vector<T> col(pw ? 0 : r * p);
  const auto& kt = simd::kernels<T>();
  for (std::size_t n = 0; n < d.n; ++n) {
    const T* img = x.data() + n * d.c * d.h * d.w;
    const T* src = img;
    if (!pw) {
      im2col(img, d, g, col.data());
      src = col.data();
    }
    T* out = y.data() + n * d.o * p;
    for (std::size_t o = 0; o < d.o; ++o) {
      const T* wrow = w.data() + o * r;
      T* orow = out + o * p;
      for (std::size_t j = 0; j < r; ++j) kt.axpy(p, wrow[j], src + j * p, orow);
    }
  }
  return y;
}

template <class T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& w, ConvGeom g, const Tensor<T>& dy) {
  const ConvDims d = check_conv(x, w, g, false, "conv2d_backward");
  require_shape(dy.shape(), {d.n, d.o, d.ho, d.wo}, "conv2d_backward upstream gradient");
  const std::size_t p = d.ho * d.wo;
  const std::size_t r = d.c * d.k * d.k;
  ConvGrads<T> gr{Tensor<T>(x.shape()), Tensor<T>(w.shape())};
  const bool pw = is_pointwise(d, g);
  std::vector<T> col(pw ? 0 : r * p);
  std::vector<T> dcol(pw ? 0 : r * p);
  const auto& kt = simd::kernels<T>();
  for (std::size_t n = 0; n < d.n; ++n) {
    const T* img = x.data() + n * d.c * d.h * d.w;
    const T* src = img;
    T* dsrc = gr.dx.data() + n * d.c * d.h * d.w;
    if (!pw) {
      im2col(img, d, g, col.data());
      src = col.data();
      std::fill(dcol.begin(), dcol.end(), T(0));
      dsrc = dcol.data();
    }
    const T* dout = dy.data() + n * d.o * p;
    for (std::size_t o = 0; o < d.o; ++o) {
      const T* drow = dout + o * p;
      const T* wrow = w.data() + o * r;
      T* dwrow = gr.dw.data() + o * r;
      for (std::size_t j = 0; j < r; ++j) {
        dwrow[j] += kt.dot(drow, src + j * p, p);
        kt.axpy(p, wrow[j], drow, dsrc + j * p);
      }
    }
    if (!pw) col2im_add(dcol.data(), d, g, gr.dx.data() + n * d.c * d.h * d.w);
  }
  return gr;
}

template <class T>
Tensor<T> depthwise_conv_forward(const Tensor<T>& x, const Tensor<T>& w, ConvGeom g) {
  const ConvDims d = check_conv(x, w, g, true, "depthwise_conv_forward");
  Tensor<T> y({d.n, d.c, d.ho, d.wo});
  const auto& kt = simd::kernels<T>();
  std::vector<T> strided(d.wo);
  for (std::size_t n = 0; n < d.n; ++n) {
    for (std::size_t c = 0; c < d.c; ++c) {
      const T* plane = x.data() + (n * d.c + c) * d.h * d.w;
      const T* filt = w.data() + c * d.k * d.k;
      T* out = y.data() + (n * d.c + c) * d.ho * d.wo;
      for (std::size_t kh = 0; kh < d.k; ++kh) {
        std::size_t oh_lo, oh_hi;
        tap_range(kh, g.pad, g.stride, d.h, d.ho, oh_lo, oh_hi);
        for (std::size_t kw = 0; kw < d.k; ++kw) {
          std::size_t ow_lo, ow_hi;
          tap_range(kw, g.pad, g.stride, d.w, d.wo, ow_lo, ow_hi);
          if (ow_hi <= ow_lo) continue;
          const T wv = filt[kh * d.k + kw];
          const std::size_t len = ow_hi - ow_lo;
          for (std::size_t oh = oh_lo; oh < oh_hi; ++oh) {
            const std::size_t ih = oh * g.stride + kh - g.pad;
            const std::size_t iw0 = ow_lo * g.stride + kw - g.pad;
            const T* src = plane + ih * d.w + iw0;
            T* dst = out + oh * d.wo + ow_lo;
            if (g.stride == 1) {
              kt.axpy(len, wv, src, dst);
            } else {
              for (std::size_t i = 0; i < len; ++i) strided[i] = src[i * g.stride];
              kt.axpy(len, wv, strided.data(), dst);
            }
          }
        }
      }
    }
  }
  return y;
}

template <class T>
ConvGrads<T> depthwise_conv_backward(const Tensor<T>& x, const Tensor<T>& w, ConvGeom g, const Tensor<T>& dy) {
  const ConvDims d = check_conv(x, w, g, true, "depthwise_conv_backward");
  require_shape(dy.shape(), {d.n, d.c, d.ho, d.wo}, "depthwise_conv_backward upstream gradient");
  ConvGrads<T> gr{Tensor<T>(x.shape()), Tensor<T>(w.shape())};
  const auto& kt = simd::kernels<T>();
  std::vector<T> strided(d.wo);
  for (std::size_t n = 0; n < d.n; ++n) {
    for (std::size_t c = 0; c < d.c; ++c) {
      const T* plane = x.data() + (n * d.c + c) * d.h * d.w;
      T* dplane = gr.dx.data() + (n * d.c + c) * d.h * d.w;
      const T* filt = w.data() + c * d.k * d.k;
      T* dfilt = gr.dw.data() + c * d.k * d.k;
      const T* dout = dy.data() + (n * d.c + c) * d.ho * d.wo;
      for (std::size_t kh = 0; kh < d.k; ++kh) {
        std::size_t oh_lo, oh_hi;
        tap_range(kh, g.pad, g.stride, d.h, d.ho, oh_lo, oh_hi);
        for (std::size_t kw = 0; kw < d.k; ++kw) {
          std::size_t ow_lo, ow_hi;
          tap_range(kw, g.pad, g.stride, d.w, d.wo, ow_lo, ow_hi);
          if (ow_hi <= ow_lo) continue;
          const T wv = filt[kh * d.k + kw];
          const std::size_t len = ow_hi - ow_lo;
          T acc = 0;
          for (std::size_t oh = oh_lo; oh < oh_hi; ++oh) {
            const std::size_t ih = oh * g.stride + kh - g.pad;
            const std::size_t iw0 = ow_lo * g.stride + kw - g.pad;
            const T* src = plane + ih * d.w + iw0;
            T* dsrc = dplane + ih * d.w + iw0;
            const T* grow = dout + oh * d.wo + ow_lo;
            if (g.stride == 1) {
              acc += kt.dot(grow, src, len);
              kt.axpy(len, wv, grow, dsrc);
            } else {
              for (std::size_t i = 0; i < len; ++i) strided[i] = src[i * g.stride];
              acc += kt.dot(grow, strided.data(), len);
              for (std::size_t i = 0; i < len; ++i) dsrc[i * g.stride] += wv * grow[i];
            }
          }
          dfilt[kh * d.k + kw] += acc;
        }
      }
    }
  }
  return gr;
}

template <class T>
Tensor<T> batchnorm_forward(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                            BatchNormRunning<T>& running, Mode mode, BatchNormCache<T>* cache) {
  require_rank(x.shape(), 4, "batchnorm_forward");
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  require_shape(gamma.shape(), {c}, "batchnorm_forward gamma");
  require_shape(beta.shape(), {c}, "batchnorm_forward beta");
  require_shape(running.mean.shape(), {c}, "batchnorm_forward running mean");
  require_shape(running.var.shape(), {c}, "batchnorm_forward running var");
  const auto& kt = simd::kernels<T>();
  const std::size_t count = n * hw;
  Tensor<T> y(x.shape());
  Tensor<T> xhat(cache ? x.shape() : Shape{});
  std::vector<T> inv_std(c);
  for (std::size_t ch = 0; ch < c; ++ch) {
    T mean, var;
    if (mode == Mode::kTrain) {
      T s = 0;
      for (std::size_t i = 0; i < n; ++i) s += kt.sum(x.data() + (i * c + ch) * hw, hw);
      mean = s / static_cast<T>(count);
      T ss = 0;
      for (std::size_t i = 0; i < n; ++i) ss += kt.sum_sq_dev(x.data() + (i * c + ch) * hw, hw, mean);
      var = ss / static_cast<T>(count);
      const T unbiased = count > 1 ? ss / static_cast<T>(count - 1) : var;
      const T mom = static_cast<T>(kBatchNormMomentum);
      running.mean[ch] = mom * running.mean[ch] + (T(1) - mom) * mean;
      running.var[ch] = mom * running.var[ch] + (T(1) - mom) * unbiased;
    } else {
      mean = running.mean[ch];
      var = running.var[ch];
    }
    const T istd = T(1) / std::sqrt(var + static_cast<T>(kBatchNormEps));
    inv_std[ch] = istd;
    const T gm = gamma[ch], bt = beta[ch];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * c + ch) * hw;
      for (std::size_t j = 0; j < hw; ++j) {
        const T xh = (x[off + j] - mean) * istd;
        if (cache) xhat[off + j] = xh;
        y[off + j] = gm * xh + bt;
      }
    }
  }
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
    cache->mode = mode;
  }
  return y;
}

template <class T>
BatchNormGrads<T> batchnorm_backward(const Tensor<T>& dy, const Tensor<T>& gamma, const BatchNormCache<T>& cache) {
  if (cache.xhat.empty()) throw std::logic_error("batchnorm_backward called without a cached forward pass");
  require_shape(dy.shape(), cache.xhat.shape(), "batchnorm_backward upstream gradient");
  const std::size_t n = dy.dim(0), c = dy.dim(1), hw = dy.dim(2) * dy.dim(3);
  const auto& kt = simd::kernels<T>();
  BatchNormGrads<T> g{Tensor<T>(dy.shape()), Tensor<T>({c}), Tensor<T>({c})};
  const T count = static_cast<T>(n * hw);
  for (std::size_t ch = 0; ch < c; ++ch) {
    T sdy = 0, sdyx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * c + ch) * hw;
      sdy += kt.sum(dy.data() + off, hw);
      sdyx += kt.dot(dy.data() + off, cache.xhat.data() + off, hw);
    }
    g.dbeta[ch] = sdy;
    g.dgamma[ch] = sdyx;
    const T k = gamma[ch] * cache.inv_std[ch];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * c + ch) * hw;
      for (std::size_t j = 0; j < hw; ++j) {
        if (cache.mode == Mode::kTrain) {
          g.dx[off + j] = k * (dy[off + j] - sdy / count - cache.xhat[off + j] * sdyx / count);
        } else {
          g.dx[off + j] = k * dy[off + j];
        }
      }
    }
  }
  return g;
}

template <class T>
Tensor<T> relu6_forward(const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  simd::relu6(x.data(), y.data(), x.numel());
  return y;
}

template <class T>
Tensor<T> relu6_backward(const Tensor<T>& x, const Tensor<T>& dy) {
  require_shape(dy.shape(), x.shape(), "relu6_backward");
  Tensor<T> dx(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) dx[i] = (x[i] > T(0) && x[i] < T(6)) ? dy[i] : T(0);
  return dx;
}

template <class T>
Tensor<T> global_avgpool_forward(const Tensor<T>& x) {
  require_rank(x.shape(), 4, "global_avgpool_forward");
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  Tensor<T> y({n, c});
  for (std::size_t i = 0; i < n * c; ++i) y[i] = simd::sum(x.data() + i * hw, hw) / static_cast<T>(hw);
  return y;
}

template <class T>
Tensor<T> global_avgpool_backward(const Shape& input_shape, const Tensor<T>& dy) {
  require_rank(input_shape, 4, "global_avgpool_backward");
  const std::size_t n = input_shape[0], c = input_shape[1], hw = input_shape[2] * input_shape[3];
  require_shape(dy.shape(), {n, c}, "global_avgpool_backward upstream gradient");
  Tensor<T> dx(input_shape);
  for (std::size_t i = 0; i < n * c; ++i) std::fill_n(dx.data() + i * hw, hw, dy[i] / static_cast<T>(hw));
  return dx;
}

template <class T>
Tensor<T> dense_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  require_rank(x.shape(), 2, "dense_forward input");
  require_rank(w.shape(), 2, "dense_forward weight");
  if (x.dim(1) != w.dim(0)) {
    throw ShapeError("dense_forward: input " + shape_str(x.shape()) + " incompatible with weight " +
                     shape_str(w.shape()));
  }
  const std::size_t n = x.dim(0), dim = w.dim(0), k = w.dim(1);
  require_shape(b.shape(), {k}, "dense_forward bias");
  Tensor<T> y({n, k});
  const auto& kt = simd::kernels<T>();
  for (std::size_t i = 0; i < n; ++i) {
    T* row = y.data() + i * k;
    std::copy_n(b.data(), k, row);
    for (std::size_t j = 0; j < dim; ++j) kt.axpy(k, x[i * dim + j], w.data() + j * k, row);
  }
  return y;
}

template <class T>
DenseGrads<T> dense_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy) {
  require_rank(x.shape(), 2, "dense_backward input");
  const std::size_t n = x.dim(0), dim = w.dim(0), k = w.dim(1);
  require_shape(dy.shape(), {n, k}, "dense_backward upstream gradient");
  DenseGrads<T> g{Tensor<T>(x.shape()), Tensor<T>(w.shape()), Tensor<T>({k})};
  const auto& kt = simd::kernels<T>();
  for (std::size_t i = 0; i < n; ++i) {
    const T* drow = dy.data() + i * k;
    kt.axpy(k, T(1), drow, g.db.data());
    for (std::size_t j = 0; j < dim; ++j) {
      kt.axpy(k, x[i * dim + j], drow, g.dw.data() + j * k);
      g.dx[i * dim + j] = kt.dot(drow, w.data() + j * k, k);
    }
  }
  return g;
}

template <class T>
Tensor<T> log_softmax_with_temperature(const Tensor<T>& logits, double temperature) {
  if (!(temperature > 0.0)) throw ShapeError("softmax temperature must be positive, got " + std::to_string(temperature));
  require_rank(logits.shape(), 2, "softmax_with_temperature");
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  Tensor<T> out({n, k});
  const T inv_t = static_cast<T>(1.0 / temperature);
  for (std::size_t i = 0; i < n; ++i) {
    const T* row = logits.data() + i * k;
    const T mx = *std::max_element(row, row + k);
    T s = 0;
    for (std::size_t j = 0; j < k; ++j) s += std::exp((row[j] - mx) * inv_t);
    const T lse = std::log(s);
    for (std::size_t j = 0; j < k; ++j) out[i * k + j] = (row[j] - mx) * inv_t - lse;
  }
  return out;
}

template <class T>
Tensor<T> softmax_with_temperature(const Tensor<T>& logits, double temperature) {
  if (!(temperature > 0.0)) throw ShapeError("softmax temperature must be positive, got " + std::to_string(temperature));
  require_rank(logits.shape(), 2, "softmax_with_temperature");
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  Tensor<T> out({n, k});
  const T inv_t = static_cast<T>(1.0 / temperature);
  for (std::size_t i = 0; i < n; ++i) {
    const T* row = logits.data() + i * k;
    const T mx = *std::max_element(row, row + k);
    T s = 0;
    for (std::size_t j = 0; j < k; ++j) {
      out[i * k + j] = std::exp((row[j] - mx) * inv_t);
      s += out[i * k + j];
    }
    for (std::size_t j = 0; j < k; ++j) out[i * k + j] /= s;
  }
  return out;
}

#define DK_INSTANTIATE_LAYERS(T)                                                                                 \
  template Tensor<T> conv2d_forward(const Tensor<T>&, const Tensor<T>&, ConvGeom);                               \
  template ConvGrads<T> conv2d_backward(const Tensor<T>&, const Tensor<T>&, ConvGeom, const Tensor<T>&);         \
  template Tensor<T> depthwise_conv_forward(const Tensor<T>&, const Tensor<T>&, ConvGeom);                       \
  template ConvGrads<T> depthwise_conv_backward(const Tensor<T>&, const Tensor<T>&, ConvGeom, const Tensor<T>&); \
  template Tensor<T> batchnorm_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, BatchNormRunning<T>&, \
                                       Mode, BatchNormCache<T>*);                                                \
  template BatchNormGrads<T> batchnorm_backward(const Tensor<T>&, const Tensor<T>&, const BatchNormCache<T>&);   \
  template Tensor<T> relu6_forward(const Tensor<T>&);                                                            \
  template Tensor<T> relu6_backward(const Tensor<T>&, const Tensor<T>&);                                         \
  template Tensor<T> global_avgpool_forward(const Tensor<T>&);                                                   \
  template Tensor<T> global_avgpool_backward(const Shape&, const Tensor<T>&);                                    \
  template Tensor<T> dense_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                        \
  template DenseGrads<T> dense_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                   \
  template Tensor<T> softmax_with_temperature(const Tensor<T>&, double);                                         \
  template Tensor<T> log_softmax_with_temperature(const Tensor<T>&, double);

DK_INSTANTIATE_LAYERS(float)
DK_INSTANTIATE_LAYERS(double)

#undef DK_INSTANTIATE_LAYERS

}  // namespace dk
