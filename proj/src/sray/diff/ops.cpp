// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/diff/ops.hpp"

#include <cmath>
#include <cstring>

#include "sray/diff/fastmath.hpp"

namespace sray::diff {

namespace {

bool recording(std::initializer_list<const Tensor*> ins) {
  if (!Tape::current()) return false;
  for (const Tensor* t : ins)
    if (t->needs_grad()) return true;
  return false;
}

void mark_and_record(Tensor& out, std::function<void()> fn) {
  out.node()->needs_grad = true;
  Tape::current()->record(std::move(fn));
}

void check_same_dtype(const Tensor& a, const Tensor& b, const char* op) {
  SRAY_CHECK(a.dtype() == b.dtype(), std::string("mixed dtypes in ") + op);
}

int64_t last_dim(const Tensor& t) { return t.shape().back(); }
int64_t row_count(const Tensor& t) { return t.size() / last_dim(t); }

template <class T, class F>
void unary_fwd(const Tensor& a, Tensor& out, F f) {
  const T* __restrict x = buffer_ptr<T>(a.node()->values);
  T* __restrict y = buffer_ptr<T>(out.node()->values);
  const size_t n = a.node()->values.size();
  for (size_t i = 0; i < n; ++i) y[i] = f(x[i]);
}

// dgrad(x_value, y_value) -> local derivative, evaluated in the storage type
template <class F>
void record_unary(const Tensor& a, Tensor& out, F dgrad) {
  auto an = a.node_ptr();
  auto on = out.node_ptr();
  mark_and_record(out, [an, on, dgrad] {
    if (!on->grad) return;
    Buffer& ag = an->ensure_grad();
    const size_t n = an->values.size();
    if (an->values.dtype() == Dtype::F32) {
      float* __restrict g = ag.f32();
      const float* __restrict x = an->values.f32();
      const float* __restrict y = on->values.f32();
      const float* __restrict dy = on->grad->f32();
      for (size_t i = 0; i < n; ++i) g[i] += dgrad(x[i], y[i]) * dy[i];
    } else {
      double* __restrict g = ag.f64();
      const double* __restrict x = an->values.f64();
      const double* __restrict y = on->values.f64();
      const double* __restrict dy = on->grad->f64();
      for (size_t i = 0; i < n; ++i) g[i] += dgrad(x[i], y[i]) * dy[i];
    }
  });
}

template <class F32Fn, class F64Fn>
Tensor make_unary(const Tensor& a, const char* name, F32Fn f, F64Fn dgrad) {
  Tensor out = Tensor::uninit(a.shape());
  if (a.dtype() == Dtype::F32)
    unary_fwd<float>(a, out, f);
  else
    unary_fwd<double>(a, out, f);
  check_finite(out, name);
  if (recording({&a})) record_unary(a, out, dgrad);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// matmul / linear

namespace {

template <class T>
void matmul_fwd(const T* __restrict x, const T* __restrict w, const T* __restrict b,
                T* __restrict y, int64_t B, int64_t I, int64_t O) {
  for (int64_t r = 0; r < B; ++r) {
    T* yr = y + r * O;
    if (b) {
      std::memcpy(yr, b, sizeof(T) * static_cast<size_t>(O));
    } else {
      for (int64_t j = 0; j < O; ++j) yr[j] = T(0);
    }
    const T* xr = x + r * I;
    for (int64_t k = 0; k < I; ++k) {
      const T a = xr[k];
      const T* wk = w + k * O;
      for (int64_t j = 0; j < O; ++j) yr[j] += a * wk[j];
    }
  }
}

template <class T>
void matmul_bwd(const Node* xn, const Node* wn, Node* xg, Node* wg, Node* bg, const Node* on,
                int64_t B, int64_t I, int64_t O) {
  const T* dy = buffer_ptr<T>(*on->grad);
  if (xg) {
    // dx = dy @ w^T via axpy over a transposed copy: contiguous streams keep
    // the loop throughput-bound instead of chained on one accumulator.
    T* __restrict dx = buffer_ptr<T>(xg->ensure_grad());
    const T* w = buffer_ptr<T>(wn->values);
    std::vector<T> wt(static_cast<size_t>(I) * O);
    for (int64_t k = 0; k < I; ++k)
      for (int64_t j = 0; j < O; ++j) wt[static_cast<size_t>(j) * I + k] = w[k * O + j];
    for (int64_t r = 0; r < B; ++r) {
      const T* __restrict dyr = dy + r * O;
      T* __restrict dxr = dx + r * I;
      for (int64_t j = 0; j < O; ++j) {
        const T g = dyr[j];
        const T* __restrict wtj = wt.data() + j * I;
        for (int64_t k = 0; k < I; ++k) dxr[k] += g * wtj[k];
      }
    }
  }
  if (wg) {
    T* dw = buffer_ptr<T>(wg->ensure_grad());
    const T* x = buffer_ptr<T>(xn->values);
    for (int64_t r = 0; r < B; ++r) {
      const T* xr = x + r * I;
      const T* dyr = dy + r * O;
      for (int64_t k = 0; k < I; ++k) {
        const T a = xr[k];
        if (a == T(0)) continue;
        T* dwk = dw + k * O;
        for (int64_t j = 0; j < O; ++j) dwk[j] += a * dyr[j];
      }
    }
  }
  if (bg) {
    T* db = buffer_ptr<T>(bg->ensure_grad());
    for (int64_t r = 0; r < B; ++r) {
      const T* dyr = dy + r * O;
      for (int64_t j = 0; j < O; ++j) db[j] += dyr[j];
    }
  }
}

Tensor matmul_impl(const Tensor& x, const Tensor& w, const Tensor* bias, const char* name) {
  SRAY_CHECK(x.shape().size() == 2 && w.shape().size() == 2, "matmul operands must be rank-2");
  SRAY_CHECK(x.dim(1) == w.dim(0), "inner dimensions disagree");
  check_same_dtype(x, w, name);
  const int64_t B = x.dim(0), I = x.dim(1), O = w.dim(1);
  if (bias) {
    SRAY_CHECK(bias->shape().size() == 1 && bias->dim(0) == O, "bias must be [O]");
    check_same_dtype(x, *bias, name);
  }
  Tensor out = Tensor::uninit({B, O});
  if (x.dtype() == Dtype::F32)
    matmul_fwd<float>(x.node()->values.f32(), w.node()->values.f32(),
                      bias ? bias->node()->values.f32() : nullptr, out.node()->values.f32(), B, I,
                      O);
  else
    matmul_fwd<double>(x.node()->values.f64(), w.node()->values.f64(),
                       bias ? bias->node()->values.f64() : nullptr, out.node()->values.f64(), B, I,
                       O);
  check_finite(out, name);
  bool rec = bias ? recording({&x, &w, bias}) : recording({&x, &w});
  if (rec) {
    auto xn = x.node_ptr();
    auto wn = w.node_ptr();
    auto bn = bias ? bias->node_ptr() : nullptr;
    auto on = out.node_ptr();
    const bool need_x = x.needs_grad(), need_w = w.needs_grad(),
               need_b = bias && bias->needs_grad();
    mark_and_record(out, [xn, wn, bn, on, B, I, O, need_x, need_w, need_b] {
      if (!on->grad) return;
      Node* xg = need_x ? xn.get() : nullptr;
      Node* wg = need_w ? wn.get() : nullptr;
      Node* bg = need_b ? bn.get() : nullptr;
      if (xn->values.dtype() == Dtype::F32)
        matmul_bwd<float>(xn.get(), wn.get(), xg, wg, bg, on.get(), B, I, O);
      else
        matmul_bwd<double>(xn.get(), wn.get(), xg, wg, bg, on.get(), B, I, O);
    });
  }
  return out;
}

}  // namespace

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  return matmul_impl(x, w, &b, "linear");
}

Tensor matmul(const Tensor& x, const Tensor& w) { return matmul_impl(x, w, nullptr, "matmul"); }

// ---------------------------------------------------------------------------
// elementwise binary

namespace {

enum class BinKind { Add, Sub, Mul };

template <class T>
void bin_fwd(BinKind k, const T* a, const T* b, T* y, size_t n) {
  switch (k) {
    case BinKind::Add:
      for (size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
      break;
    case BinKind::Sub:
      for (size_t i = 0; i < n; ++i) y[i] = a[i] - b[i];
      break;
    case BinKind::Mul:
      for (size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
      break;
  }
}

template <class T>
void bin_bwd(BinKind k, Node* an, Node* bn, const Node* on, bool need_a, bool need_b) {
  const T* dy = buffer_ptr<T>(*on->grad);
  const size_t n = on->values.size();
  if (need_a) {
    T* da = buffer_ptr<T>(an->ensure_grad());
    if (k == BinKind::Mul) {
      const T* b = buffer_ptr<T>(bn->values);
      for (size_t i = 0; i < n; ++i) da[i] += dy[i] * b[i];
    } else {
      for (size_t i = 0; i < n; ++i) da[i] += dy[i];
    }
  }
  if (need_b) {
    T* db = buffer_ptr<T>(bn->ensure_grad());
    switch (k) {
      case BinKind::Add:
        for (size_t i = 0; i < n; ++i) db[i] += dy[i];
        break;
      case BinKind::Sub:
        for (size_t i = 0; i < n; ++i) db[i] -= dy[i];
        break;
      case BinKind::Mul: {
        const T* a = buffer_ptr<T>(an->values);
        for (size_t i = 0; i < n; ++i) db[i] += dy[i] * a[i];
        break;
      }
    }
  }
}

Tensor binary_impl(BinKind k, const Tensor& a, const Tensor& b, const char* name) {
  SRAY_CHECK(a.shape() == b.shape(), std::string("shape mismatch in ") + name);
  check_same_dtype(a, b, name);
  Tensor out = Tensor::uninit(a.shape());
  const size_t n = static_cast<size_t>(a.size());
  if (a.dtype() == Dtype::F32)
    bin_fwd<float>(k, a.node()->values.f32(), b.node()->values.f32(), out.node()->values.f32(), n);
  else
    bin_fwd<double>(k, a.node()->values.f64(), b.node()->values.f64(), out.node()->values.f64(),
                    n);
  check_finite(out, name);
  if (recording({&a, &b})) {
    auto an = a.node_ptr();
    auto bn = b.node_ptr();
    auto on = out.node_ptr();
    const bool need_a = a.needs_grad(), need_b = b.needs_grad();
    mark_and_record(out, [k, an, bn, on, need_a, need_b] {
      if (!on->grad) return;
      if (an->values.dtype() == Dtype::F32)
        bin_bwd<float>(k, an.get(), bn.get(), on.get(), need_a, need_b);
      else
        bin_bwd<double>(k, an.get(), bn.get(), on.get(), need_a, need_b);
    });
  }
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return binary_impl(BinKind::Add, a, b, "add"); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary_impl(BinKind::Sub, a, b, "sub"); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary_impl(BinKind::Mul, a, b, "mul"); }

Tensor affine(const Tensor& a, double k, double c) {
  return make_unary(
      a, "affine",
      [k, c](auto x) { using T = decltype(x); return T(k) * x + T(c); },
      [k](auto x, auto) {
        using T = decltype(x);
        return T(k);
      });
}

// ---------------------------------------------------------------------------
// elementwise nonlinearities

Tensor elu(const Tensor& a) {
  // min/max arithmetic keeps the hot loops branch-free on random signs;
  // exp(x) - 1 instead of expm1 avoids libm in 32-bit mode (the cancellation
  // error for x <= 0 is far below training noise). The derivative min(y+1, 1)
  // equals exp(x) below zero and 1 at and above it.
  return make_unary(
      a, "elu",
      [](auto x) {
        using T = decltype(x);
        const T half_abs = T(0.5) * std::fabs(x);
        const T pos = T(0.5) * x + half_abs;  // max(x, 0)
        const T neg = T(0.5) * x - half_abs;  // min(x, 0)
        return pos + fastmath::exp(neg) - T(1);
      },
      [](auto, auto y) {
        using T = decltype(y);
        // min(y + 1, 1): exp(x) below zero, 1 at and above it
        return T(1) + T(0.5) * (y - std::fabs(y));
      });
}

namespace {
// Saturation to exactly 0 or 1 would break the (0,1) range contract, so the
// stored value is clamped to the nearest representable interior points.
template <class T>
void sigmoid_fwd(const T* __restrict x, T* __restrict y, size_t n) {
  const T lo = std::numeric_limits<T>::min();
  const T hi = T(1) - std::numeric_limits<T>::epsilon() / 2;
  for (size_t i = 0; i < n; ++i) {
    const T v = T(1) / (T(1) + fastmath::exp(-x[i]));
    y[i] = v < lo ? lo : (v > hi ? hi : v);
  }
}
}  // namespace

Tensor sigmoid(const Tensor& a) {
  Tensor out = Tensor::uninit(a.shape());
  const size_t n = static_cast<size_t>(a.size());
  if (a.dtype() == Dtype::F32)
    sigmoid_fwd<float>(a.node()->values.f32(), out.node()->values.f32(), n);
  else
    sigmoid_fwd<double>(a.node()->values.f64(), out.node()->values.f64(), n);
  check_finite(out, "sigmoid");
  if (recording({&a}))
    record_unary(a, out, [](auto, auto y) {
      using T = decltype(y);
      return y * (T(1) - y);
    });
  return out;
}

Tensor tanh_op(const Tensor& a) {
  return make_unary(
      a, "tanh", [](auto x) { return std::tanh(x); },
      [](auto, auto y) {
        using T = decltype(y);
        return T(1) - y * y;
      });
}

Tensor softplus(const Tensor& a) {
  return make_unary(
      a, "softplus",
      [](auto x) { using T = decltype(x); return x > T(30) ? x : std::log(T(1) + fastmath::exp(x)); },
      [](auto x, auto) {
        using T = decltype(x);
        return T(1) / (T(1) + fastmath::exp(-x));
      });
}

Tensor relu(const Tensor& a) {
  return make_unary(
      a, "relu", [](auto x) { using T = decltype(x); return std::max(x, T(0)); },
      [](auto x, auto) {
        using T = decltype(x);
        return static_cast<T>(x > T(0));
      });
}

Tensor exp_op(const Tensor& a) {
  return make_unary(
      a, "exp", [](auto x) { return fastmath::exp(x); }, [](auto, auto y) { return y; });
}

Tensor sin_op(const Tensor& a) {
  return make_unary(
      a, "sin", [](auto x) { return fastmath::sin(x); },
      [](auto x, auto) { return fastmath::cos(x); });
}

Tensor cos_op(const Tensor& a) {
  return make_unary(
      a, "cos", [](auto x) { return fastmath::cos(x); },
      [](auto x, auto) { return -fastmath::sin(x); });
}

// ---------------------------------------------------------------------------
// softmax / cumsum (last axis)

namespace {

template <class T>
void softmax_fwd(const T* x, T* y, int64_t rows, int64_t k) {
  for (int64_t r = 0; r < rows; ++r) {
    const T* xr = x + r * k;
    T* yr = y + r * k;
    T m = xr[0];
    for (int64_t i = 1; i < k; ++i) m = std::max(m, xr[i]);
    T s = T(0);
    for (int64_t i = 0; i < k; ++i) {
      yr[i] = std::exp(xr[i] - m);
      s += yr[i];
    }
    const T inv = T(1) / s;
    for (int64_t i = 0; i < k; ++i) yr[i] *= inv;
  }
}

template <class T>
void softmax_bwd(Node* an, const Node* on, int64_t rows, int64_t k) {
  T* dx = buffer_ptr<T>(an->ensure_grad());
  const T* y = buffer_ptr<T>(on->values);
  const T* dy = buffer_ptr<T>(*on->grad);
  for (int64_t r = 0; r < rows; ++r) {
    const T* yr = y + r * k;
    const T* dyr = dy + r * k;
    T* dxr = dx + r * k;
    T dot = T(0);
    for (int64_t i = 0; i < k; ++i) dot += dyr[i] * yr[i];
    for (int64_t i = 0; i < k; ++i) dxr[i] += yr[i] * (dyr[i] - dot);
  }
}

}  // namespace

Tensor softmax(const Tensor& a) {
  SRAY_CHECK(!a.shape().empty() && last_dim(a) >= 1, "softmax needs a last axis");
  Tensor out = Tensor::uninit(a.shape());
  const int64_t rows = row_count(a), k = last_dim(a);
  if (a.dtype() == Dtype::F32)
    softmax_fwd<float>(a.node()->values.f32(), out.node()->values.f32(), rows, k);
  else
    softmax_fwd<double>(a.node()->values.f64(), out.node()->values.f64(), rows, k);
  check_finite(out, "softmax");
  if (recording({&a})) {
    auto an = a.node_ptr();
    auto on = out.node_ptr();
    mark_and_record(out, [an, on, rows, k] {
      if (!on->grad) return;
      if (an->values.dtype() == Dtype::F32)
        softmax_bwd<float>(an.get(), on.get(), rows, k);
      else
        softmax_bwd<double>(an.get(), on.get(), rows, k);
    });
  }
  return out;
}

Tensor cumsum(const Tensor& a) {
  SRAY_CHECK(!a.shape().empty(), "cumsum needs a last axis");
  Tensor out = Tensor::uninit(a.shape());
  const int64_t rows = row_count(a), k = last_dim(a);
  auto fwd = [rows, k](const auto* x, auto* y) {
    using T = std::remove_cvref_t<decltype(*y)>;
    for (int64_t r = 0; r < rows; ++r) {
      T acc = T(0);
      for (int64_t i = 0; i < k; ++i) {
        acc += x[r * k + i];
        y[r * k + i] = acc;
      }
    }
  };
  if (a.dtype() == Dtype::F32)
    fwd(a.node()->values.f32(), out.node()->values.f32());
  else
    fwd(a.node()->values.f64(), out.node()->values.f64());
  check_finite(out, "cumsum");
  if (recording({&a})) {
    auto an = a.node_ptr();
    auto on = out.node_ptr();
    mark_and_record(out, [an, on, rows, k] {
      if (!on->grad) return;
      auto bwd = [rows, k](auto* dx, const auto* dy) {
        using T = std::remove_cvref_t<decltype(*dx)>;
        for (int64_t r = 0; r < rows; ++r) {
          T acc = T(0);
          for (int64_t i = k - 1; i >= 0; --i) {
            acc += dy[r * k + i];
            dx[r * k + i] += acc;
          }
        }
      };
      if (an->values.dtype() == Dtype::F32)
        bwd(an->ensure_grad().f32(), on->grad->f32());
      else
        bwd(an->ensure_grad().f64(), on->grad->f64());
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// reductions

Tensor sum(const Tensor& a) {
  Tensor out = Tensor::zeros({1});
  double acc = 0.0;
  if (a.dtype() == Dtype::F32) {
    const float* x = a.node()->values.f32();
    float facc = 0.0f;
    for (int64_t i = 0; i < a.size(); ++i) facc += x[i];
    acc = facc;
  } else {
    const double* x = a.node()->values.f64();
    for (int64_t i = 0; i < a.size(); ++i) acc += x[i];
  }
  out.node()->values.set(0, acc);
  check_finite(out, "sum");
  if (recording({&a})) {
    auto an = a.node_ptr();
    auto on = out.node_ptr();
    mark_and_record(out, [an, on] {
      if (!on->grad) return;
      const double g = on->grad->get(0);
      Buffer& ag = an->ensure_grad();
      if (ag.dtype() == Dtype::F32) {
        float* da = ag.f32();
        const float gf = static_cast<float>(g);
        for (size_t i = 0; i < ag.size(); ++i) da[i] += gf;
      } else {
        double* da = ag.f64();
        for (size_t i = 0; i < ag.size(); ++i) da[i] += g;
      }
    });
  }
  return out;
}

Tensor mean(const Tensor& a) { return mul_scalar(sum(a), 1.0 / static_cast<double>(a.size())); }

Tensor sum_axis(const Tensor& a, size_t axis) {
  SRAY_CHECK(axis < a.shape().size(), "axis out of range");
  const Shape& s = a.shape();
  int64_t outer = 1, inner = 1;
  for (size_t i = 0; i < axis; ++i) outer *= s[i];
  for (size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const int64_t n = s[axis];
  Shape out_shape;
  for (size_t i = 0; i < s.size(); ++i)
    if (i != axis) out_shape.push_back(s[i]);
  if (out_shape.empty()) out_shape.push_back(1);
  Tensor out = Tensor::zeros(out_shape);
  auto fwd = [outer, inner, n](const auto* x, auto* y) {
    for (int64_t o = 0; o < outer; ++o)
      for (int64_t j = 0; j < n; ++j) {
        const auto* xr = x + (o * n + j) * inner;
        auto* yr = y + o * inner;
        for (int64_t i = 0; i < inner; ++i) yr[i] += xr[i];
      }
  };
  if (a.dtype() == Dtype::F32)
    fwd(a.node()->values.f32(), out.node()->values.f32());
  else
    fwd(a.node()->values.f64(), out.node()->values.f64());
  check_finite(out, "sum_axis");
  if (recording({&a})) {
    auto an = a.node_ptr();
    auto on = out.node_ptr();
    mark_and_record(out, [an, on, outer, inner, n] {
      if (!on->grad) return;
      auto bwd = [outer, inner, n](auto* dx, const auto* dy) {
        for (int64_t o = 0; o < outer; ++o)
          for (int64_t j = 0; j < n; ++j) {
            auto* dxr = dx + (o * n + j) * inner;
            const auto* dyr = dy + o * inner;
            for (int64_t i = 0; i < inner; ++i) dxr[i] += dyr[i];
          }
      };
      if (an->values.dtype() == Dtype::F32)
        bwd(an->ensure_grad().f32(), on->grad->f32());
      else
        bwd(an->ensure_grad().f64(), on->grad->f64());
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// slicing / concatenation / reshape

Tensor slice_last(const Tensor& a, int64_t start, int64_t len) {
  const int64_t k = last_dim(a);
  SRAY_CHECK(start >= 0 && len >= 1 && start + len <= k, "slice_last out of range");
  Shape out_shape = a.shape();
  out_shape.back() = len;
  Tensor out = Tensor::uninit(out_shape);
  const int64_t rows = row_count(a);
  auto fwd = [rows, k, start, len](const auto* x, auto* y) {
    for (int64_t r = 0; r < rows; ++r)
      for (int64_t i = 0; i < len; ++i) y[r * len + i] = x[r * k + start + i];
  };
  if (a.dtype() == Dtype::F32)
    fwd(a.node()->values.f32(), out.node()->values.f32());
  else
    fwd(a.node()->values.f64(), out.node()->values.f64());
  if (recording({&a})) {
    auto an = a.node_ptr();
    auto on = out.node_ptr();
    mark_and_record(out, [an, on, rows, k, start, len] {
      if (!on->grad) return;
      auto bwd = [rows, k, start, len](auto* dx, const auto* dy) {
        for (int64_t r = 0; r < rows; ++r)
          for (int64_t i = 0; i < len; ++i) dx[r * k + start + i] += dy[r * len + i];
      };
      if (an->values.dtype() == Dtype::F32)
        bwd(an->ensure_grad().f32(), on->grad->f32());
      else
        bwd(an->ensure_grad().f64(), on->grad->f64());
    });
  }
  return out;
}

Tensor concat_last(const std::vector<Tensor>& parts) {
  SRAY_CHECK(!parts.empty(), "concat_last needs at least one part");
  Shape lead = parts[0].shape();
  lead.pop_back();
  int64_t total = 0;
  for (const Tensor& p : parts) {
    Shape pl = p.shape();
    SRAY_CHECK(!pl.empty(), "concat_last parts need a last axis");
    int64_t d = pl.back();
    pl.pop_back();
    SRAY_CHECK(pl == lead, "concat_last leading shapes disagree");
    total += d;
  }
  Shape out_shape = lead;
  out_shape.push_back(total);
  Tensor out = Tensor::uninit(out_shape);
  const int64_t rows = row_count(out);
  int64_t off = 0;
  for (const Tensor& p : parts) {
    const int64_t d = last_dim(p);
    auto fwd = [rows, total, off, d](const auto* x, auto* y) {
      for (int64_t r = 0; r < rows; ++r)
        for (int64_t i = 0; i < d; ++i) y[r * total + off + i] = x[r * d + i];
    };
    if (p.dtype() == Dtype::F32)
      fwd(p.node()->values.f32(), out.node()->values.f32());
    else
      fwd(p.node()->values.f64(), out.node()->values.f64());
    off += d;
  }
  bool rec = false;
  for (const Tensor& p : parts) rec = rec || recording({&p});
  if (rec) {
    std::vector<std::shared_ptr<Node>> pns;
    std::vector<int64_t> dims;
    std::vector<bool> needs;
    for (const Tensor& p : parts) {
      pns.push_back(p.node_ptr());
      dims.push_back(last_dim(p));
      needs.push_back(p.needs_grad());
    }
    auto on = out.node_ptr();
    mark_and_record(out, [pns, dims, needs, on, rows, total] {
      if (!on->grad) return;
      int64_t off2 = 0;
      for (size_t pi = 0; pi < pns.size(); ++pi) {
        const int64_t d = dims[pi];
        if (needs[pi]) {
          auto bwd = [rows, total, off2, d](auto* dx, const auto* dy) {
            for (int64_t r = 0; r < rows; ++r)
              for (int64_t i = 0; i < d; ++i) dx[r * d + i] += dy[r * total + off2 + i];
          };
          if (pns[pi]->values.dtype() == Dtype::F32)
            bwd(pns[pi]->ensure_grad().f32(), on->grad->f32());
          else
            bwd(pns[pi]->ensure_grad().f64(), on->grad->f64());
        }
        off2 += d;
      }
    });
  }
  return out;
}

Tensor reshape(const Tensor& a, const Shape& shape) {
  SRAY_CHECK(numel(shape) == a.size(), "reshape must preserve element count");
  Tensor out = Tensor::uninit(shape);
  if (a.dtype() == Dtype::F32)
    std::memcpy(out.node()->values.f32(), a.node()->values.f32(), sizeof(float) * a.size());
  else
    std::memcpy(out.node()->values.f64(), a.node()->values.f64(), sizeof(double) * a.size());
  if (recording({&a})) {
    auto an = a.node_ptr();
    auto on = out.node_ptr();
    mark_and_record(out, [an, on] {
      if (!on->grad) return;
      Buffer& ag = an->ensure_grad();
      if (ag.dtype() == Dtype::F32) {
        float* dx = ag.f32();
        const float* dy = on->grad->f32();
        for (size_t i = 0; i < ag.size(); ++i) dx[i] += dy[i];
      } else {
        double* dx = ag.f64();
        const double* dy = on->grad->f64();
        for (size_t i = 0; i < ag.size(); ++i) dx[i] += dy[i];
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// scale_rows

Tensor scale_rows(const Tensor& a, const Tensor& b) {
  SRAY_CHECK(b.shape().size() >= 2, "scale_rows: b needs at least two axes");
  Shape blead = b.shape();
  const int64_t c = blead.back();
  blead.pop_back();
  SRAY_CHECK(a.shape() == blead, "scale_rows: a must match b without its last axis");
  check_same_dtype(a, b, "scale_rows");
  Tensor out = Tensor::uninit(b.shape());
  const int64_t rows = a.size();
  auto fwd = [rows, c](const auto* av, const auto* bv, auto* y) {
    for (int64_t r = 0; r < rows; ++r) {
      const auto s = av[r];
      for (int64_t i = 0; i < c; ++i) y[r * c + i] = s * bv[r * c + i];
    }
  };
  if (a.dtype() == Dtype::F32)
    fwd(a.node()->values.f32(), b.node()->values.f32(), out.node()->values.f32());
  else
    fwd(a.node()->values.f64(), b.node()->values.f64(), out.node()->values.f64());
  check_finite(out, "scale_rows");
  if (recording({&a, &b})) {
    auto an = a.node_ptr();
    auto bn = b.node_ptr();
    auto on = out.node_ptr();
    const bool need_a = a.needs_grad(), need_b = b.needs_grad();
    mark_and_record(out, [an, bn, on, rows, c, need_a, need_b] {
      if (!on->grad) return;
      auto bwd = [rows, c, need_a, need_b](auto* da, auto* db, const auto* av, const auto* bv,
                                           const auto* dy) {
        for (int64_t r = 0; r < rows; ++r) {
          if (need_a) {
            auto acc = decltype(av[0])(0);
            for (int64_t i = 0; i < c; ++i) acc += dy[r * c + i] * bv[r * c + i];
            da[r] += acc;
          }
          if (need_b) {
            const auto s = av[r];
            for (int64_t i = 0; i < c; ++i) db[r * c + i] += s * dy[r * c + i];
          }
        }
      };
      if (an->values.dtype() == Dtype::F32)
        bwd(need_a ? an->ensure_grad().f32() : nullptr, need_b ? bn->ensure_grad().f32() : nullptr,
            an->values.f32(), bn->values.f32(), on->grad->f32());
      else
        bwd(need_a ? an->ensure_grad().f64() : nullptr, need_b ? bn->ensure_grad().f64() : nullptr,
            an->values.f64(), bn->values.f64(), on->grad->f64());
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// alpha_partition

namespace {

template <class T>
void partition_fwd(const T* a, T* y, int64_t rows, int64_t n) {
  for (int64_t r = 0; r < rows; ++r) {
    const T* ar = a + r * n;
    T* yr = y + r * (n + 1);
    T trans = T(1);
    for (int64_t i = 0; i < n; ++i) {
      yr[i] = ar[i] * trans;
      trans *= T(1) - ar[i];
    }
    yr[n] = trans;
  }
}

// d(loss)/d(alpha_k) = T_k * (g_k - R_k) where T_k is the transmittance in
// front of sample k and R_k folds the occlusion of everything behind it.
// The recurrence avoids dividing by (1 - alpha), so alpha = 1 is safe.
template <class T>
void partition_bwd(Node* an, const Node* on, int64_t rows, int64_t n) {
  T* dx = buffer_ptr<T>(an->ensure_grad());
  const T* a = buffer_ptr<T>(an->values);
  const T* dy = buffer_ptr<T>(*on->grad);
  std::vector<T> trans(static_cast<size_t>(n));
  for (int64_t r = 0; r < rows; ++r) {
    const T* ar = a + r * n;
    const T* gr = dy + r * (n + 1);
    T* dxr = dx + r * n;
    T t = T(1);
    for (int64_t i = 0; i < n; ++i) {
      trans[static_cast<size_t>(i)] = t;
      t *= T(1) - ar[i];
    }
    T rsum = gr[n];
    for (int64_t k = n - 1; k >= 0; --k) {
      dxr[k] += trans[static_cast<size_t>(k)] * (gr[k] - rsum);
      rsum = gr[k] * ar[k] + (T(1) - ar[k]) * rsum;
    }
  }
}

}  // namespace

Tensor alpha_partition(const Tensor& alphas) {
  SRAY_CHECK(!alphas.shape().empty(), "alpha_partition needs a last axis");
  const int64_t n = last_dim(alphas);
  const int64_t rows = row_count(alphas);
  Shape out_shape = alphas.shape();
  out_shape.back() = n + 1;
  Tensor out = Tensor::uninit(out_shape);
  if (alphas.dtype() == Dtype::F32)
    partition_fwd<float>(alphas.node()->values.f32(), out.node()->values.f32(), rows, n);
  else
    partition_fwd<double>(alphas.node()->values.f64(), out.node()->values.f64(), rows, n);
  check_finite(out, "alpha_partition");
  if (recording({&alphas})) {
    auto an = alphas.node_ptr();
    auto on = out.node_ptr();
    mark_and_record(out, [an, on, rows, n] {
      if (!on->grad) return;
      if (an->values.dtype() == Dtype::F32)
        partition_bwd<float>(an.get(), on.get(), rows, n);
      else
        partition_bwd<double>(an.get(), on.get(), rows, n);
    });
  }
  return out;
}

Tensor detach(const Tensor& a) {
  Tensor out = Tensor::uninit(a.shape());
  if (a.dtype() == Dtype::F32)
    std::memcpy(out.node()->values.f32(), a.node()->values.f32(), sizeof(float) * a.size());
  else
    std::memcpy(out.node()->values.f64(), a.node()->values.f64(), sizeof(double) * a.size());
  return out;
}

}  // namespace sray::diff
