// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "sray/diff/adam.hpp"
#include "sray/diff/checkpoint.hpp"
#include "sray/diff/ops.hpp"
#include "sray/diff/paramstore.hpp"
#include "sray/nn/mlp.hpp"

using namespace sray;
using diff::Tensor;

namespace {

Tensor random_param(const std::string& name, const diff::Shape& shape, Rng& rng,
                    double scale = 1.0) {
  std::vector<double> v(static_cast<size_t>(diff::numel(shape)));
  for (double& x : v) x = rng.uniform(-scale, scale);
  return Tensor::param(name, shape, v);
}

Tensor random_const(const diff::Shape& shape, Rng& rng, double lo = -1, double hi = 1) {
  std::vector<double> v(static_cast<size_t>(diff::numel(shape)));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Tensor::from(shape, v);
}

// FD check of d(sum(f(x) * c))/dx over every coordinate, 64-bit mode.
template <class F>
void check_grad(F f, const diff::Shape& xshape, Rng& rng, double scale = 1.0,
                double tol = 1e-6) {
  diff::DtypeScope mode(diff::Dtype::F64);
  Tensor x = random_param("x", xshape, rng, scale);
  Tensor c = random_const(f(x).shape(), rng);

  diff::Tape tape;
  {
    diff::Tape::Scope scope(tape);
    tape.backward(diff::sum(diff::mul(f(x), c)));
  }
  const std::vector<double> g = x.grad_doubles();
  const std::vector<double> x0 = x.to_doubles();
  const double eps = 1e-6;
  for (size_t i = 0; i < x0.size(); ++i) {
    std::vector<double> xp = x0, xm = x0;
    xp[i] += eps;
    xm[i] -= eps;
    x.set_values(xp);
    const double lp = diff::sum(diff::mul(f(x), c)).item();
    x.set_values(xm);
    const double lm = diff::sum(diff::mul(f(x), c)).item();
    x.set_values(x0);
    const double fd = (lp - lm) / (2 * eps);
    CHECK(std::abs(fd - g[i]) < tol * std::max({1.0, std::abs(fd), std::abs(g[i])}));
  }
}

}  // namespace

TEST_CASE("linear forward examples") {
  CHECK(Tensor::zeros({2, 3}).size() == 6);
  // identity weights
  Tensor x = Tensor::from({1, 2}, {1, 2});
  Tensor w = Tensor::from({2, 2}, {1, 0, 0, 1});
  Tensor b = Tensor::from({2}, {0, 0});
  Tensor y = diff::linear(x, w, b);
  CHECK(y.value(0) == doctest::Approx(1.0));
  CHECK(y.value(1) == doctest::Approx(2.0));
  // hand evaluation of xw + b
  y = diff::linear(Tensor::from({1, 2}, {1, 1}), Tensor::from({2, 1}, {2, 3}),
                   Tensor::from({1}, {1}));
  CHECK(y.value(0) == doctest::Approx(6.0));
  // annihilator
  Rng rng(7);
  Tensor xz = Tensor::zeros({2, 3});
  Tensor wr = random_const({3, 4}, rng);
  y = diff::linear(xz, wr, Tensor::zeros({4}));
  for (int64_t i = 0; i < y.size(); ++i) CHECK(y.value(i) == 0.0);
  // shape mismatch is a contract violation
  CHECK_THROWS_AS(diff::linear(Tensor::zeros({1, 3}), Tensor::zeros({2, 2}), Tensor::zeros({2})),
                  ContractViolation);
}

TEST_CASE("elu examples") {
  diff::DtypeScope mode(diff::Dtype::F64);
  Tensor x = Tensor::from({3}, {0.0, 1.0, -1.0});
  Tensor y = diff::elu(x);
  CHECK(y.value(0) == doctest::Approx(0.0));
  CHECK(y.value(1) == doctest::Approx(1.0));
  CHECK(y.value(2) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-9));
}

TEST_CASE("softmax examples and invariants") {
  diff::DtypeScope mode(diff::Dtype::F64);
  Tensor y = diff::softmax(Tensor::from({3}, {0, 0, 0}));
  for (int i = 0; i < 3; ++i) CHECK(y.value(i) == doctest::Approx(1.0 / 3));

  y = diff::softmax(Tensor::from({2}, {std::log(2.0), 0.0}));
  CHECK(y.value(0) == doctest::Approx(2.0 / 3).epsilon(1e-9));
  CHECK(y.value(1) == doctest::Approx(1.0 / 3).epsilon(1e-9));

  // stability: no overflow with huge logits
  y = diff::softmax(Tensor::from({2}, {1000.0, 0.0}));
  CHECK(y.value(0) == doctest::Approx(1.0));
  CHECK(y.value(1) == doctest::Approx(0.0));

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor r = diff::softmax(random_const({4, 5}, rng, -100, 100));
    for (int row = 0; row < 4; ++row) {
      double s = 0;
      for (int i = 0; i < 5; ++i) {
        const double v = r.value(row * 5 + i);
        CHECK(v >= 0.0);
        s += v;
      }
      CHECK(std::abs(s - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("sigmoid examples") {
  diff::DtypeScope mode(diff::Dtype::F64);
  Tensor y = diff::sigmoid(Tensor::from({3}, {0.0, 50.0, std::log(3.0)}));
  CHECK(y.value(0) == doctest::Approx(0.5));
  CHECK(y.value(1) == doctest::Approx(1.0));
  CHECK(y.value(2) == doctest::Approx(0.75).epsilon(1e-9));
  Rng rng(5);
  Tensor r = diff::sigmoid(random_const({64}, rng, -30, 30));
  for (int64_t i = 0; i < r.size(); ++i) {
    CHECK(r.value(i) > 0.0);
    CHECK(r.value(i) < 1.0);
  }
}

TEST_CASE("backward analytic examples") {
  diff::DtypeScope mode(diff::Dtype::F64);
  // loss = p^2 at p = 3 -> grad 6
  {
    Tensor p = Tensor::param("p", {1}, {3.0});
    diff::Tape tape;
    diff::Tape::Scope scope(tape);
    Tensor loss = diff::sum(diff::mul(p, p));
    tape.backward(loss);
    CHECK(p.grad_value(0) == doctest::Approx(6.0));
    CHECK(tape.size() == 0);  // cleared
  }
  // loss = sum(sigmoid(p)) at p = 0 -> grad 0.25 per element
  {
    Tensor p = Tensor::param("p", {4}, {0, 0, 0, 0});
    diff::Tape tape;
    diff::Tape::Scope scope(tape);
    tape.backward(diff::sum(diff::sigmoid(p)));
    for (int i = 0; i < 4; ++i) CHECK(p.grad_value(i) == doctest::Approx(0.25));
  }
  // non-scalar loss is rejected
  {
    Tensor p = Tensor::param("p", {2}, {1, 2});
    diff::Tape tape;
    diff::Tape::Scope scope(tape);
    Tensor y = diff::mul(p, p);
    CHECK_THROWS_AS(tape.backward(y), ContractViolation);
  }
}

TEST_CASE("per-op finite-difference checks") {
  Rng rng(11);
  check_grad([](const Tensor& x) { return diff::elu(x); }, {3, 4}, rng);
  check_grad([](const Tensor& x) { return diff::sigmoid(x); }, {2, 5}, rng);
  check_grad([](const Tensor& x) { return diff::tanh_op(x); }, {6}, rng);
  check_grad([](const Tensor& x) { return diff::softplus(x); }, {6}, rng);
  check_grad([](const Tensor& x) { return diff::exp_op(x); }, {5}, rng);
  check_grad([](const Tensor& x) { return diff::sin_op(x); }, {5}, rng);
  check_grad([](const Tensor& x) { return diff::cos_op(x); }, {5}, rng);
  check_grad([](const Tensor& x) { return diff::softmax(x); }, {3, 4}, rng);
  check_grad([](const Tensor& x) { return diff::cumsum(x); }, {3, 5}, rng);
  check_grad([](const Tensor& x) { return diff::affine(x, -2.5, 0.75); }, {7}, rng);
  check_grad([](const Tensor& x) { return diff::slice_last(x, 1, 2); }, {3, 4}, rng);
  check_grad([](const Tensor& x) { return diff::reshape(x, {2, 6}); }, {3, 4}, rng);
  check_grad([](const Tensor& x) { return diff::sum_axis(x, 1); }, {2, 3, 4}, rng);
  check_grad([](const Tensor& x) { return diff::mean(x); }, {9}, rng);
  check_grad(
      [](const Tensor& x) {
        return diff::concat_last({diff::slice_last(x, 0, 1), diff::elu(x)});
      },
      {2, 3}, rng);
  check_grad(
      [&](const Tensor& x) {
        Rng r2(99);
        Tensor other = random_const({4, 3}, r2);
        return diff::mul(diff::add(x, other), diff::sub(x, other));
      },
      {4, 3}, rng);
  check_grad(
      [](const Tensor& x) {
        Rng r2(100);
        Tensor b = random_const({2, 3, 4}, r2);
        return diff::scale_rows(diff::reshape(x, {2, 3}), b);
      },
      {6}, rng);
  check_grad(
      [](const Tensor& x) {
        Rng r2(101);
        Tensor w = random_const({3, 4}, r2);
        Tensor b = random_const({4}, r2);
        return diff::linear(x, w, b);
      },
      {5, 3}, rng);
  // matmul gradient w.r.t. weights and bias too
  check_grad(
      [](const Tensor& x) {
        Rng r2(102);
        Tensor a = random_const({4, 3}, r2);
        return diff::matmul(a, diff::reshape(x, {3, 2}));
      },
      {6}, rng);
  // alpha_partition at interior alphas
  check_grad(
      [](const Tensor& x) { return diff::alpha_partition(diff::sigmoid(x)); }, {3, 5}, rng);
}

TEST_CASE("alpha_partition handles opaque samples without dividing") {
  Tensor a = Tensor::from({1, 3}, {0.25, 1.0, 0.5});
  Tensor part = diff::alpha_partition(a);
  CHECK(part.value(0) == doctest::Approx(0.25));
  CHECK(part.value(1) == doctest::Approx(0.75));
  CHECK(part.value(2) == doctest::Approx(0.0));
  CHECK(part.value(3) == doctest::Approx(0.0));
  // gradient stays finite at alpha = 1
  diff::DtypeScope mode(diff::Dtype::F64);
  Tensor p = Tensor::param("p", {3}, {0.25, 1.0, 0.5});
  diff::Tape tape;
  diff::Tape::Scope scope(tape);
  tape.backward(diff::sum(diff::mul(diff::alpha_partition(diff::reshape(p, {1, 3})),
                                    Tensor::from({1, 4}, {0.1, 0.2, 0.3, 0.4}))));
  for (int i = 0; i < 3; ++i) CHECK(std::isfinite(p.grad_value(i)));
}

TEST_CASE("non-finite values are an error state") {
  Tensor big = Tensor::from({1}, {1e308});
  CHECK_THROWS_AS(diff::exp_op(big), NumericError);
}

TEST_CASE("tape replay determinism") {
  auto run_once = [](uint64_t seed) {
    diff::ParamStore store;
    Rng rng(seed);
    nn::Mlp mlp(store, "net", 4, 8, 3, -1, rng);
    nn::Linear out = nn::Linear::create(store, "net.out", 8, 2, rng);
    Tensor x = random_const({5, 4}, rng);
    diff::Tape tape;
    std::vector<double> values, grads;
    {
      diff::Tape::Scope scope(tape);
      Tensor y = out(mlp.forward(x));
      Tensor loss = diff::mean(diff::mul(y, y));
      values = y.to_doubles();
      tape.backward(loss);
    }
    for (const auto& name : store.names()) {
      const auto g = store.get(name).grad_doubles();
      grads.insert(grads.end(), g.begin(), g.end());
    }
    return std::make_pair(values, grads);
  };
  const auto a = run_once(42);
  const auto b = run_once(42);
  CHECK(a.first == b.first);    // bit-identical forward
  CHECK(a.second == b.second);  // bit-identical gradients
}

TEST_CASE("adam first step and zero-grad behavior") {
  diff::DtypeScope mode(diff::Dtype::F64);
  // g = 1 everywhere: bias correction makes the first delta ~ -lr
  {
    Tensor p = Tensor::param("p", {3}, {1.0, 2.0, 3.0});
    diff::Adam opt({p});
    p.node()->ensure_grad().fill(1.0);
    opt.step(0.01);
    for (int i = 0; i < 3; ++i)
      CHECK(p.value(i) == doctest::Approx(static_cast<double>(i + 1) - 0.01).epsilon(1e-6));
    CHECK(p.grad_value(0) == 0.0);  // gradients zeroed
  }
  // g = 0: parameters unchanged
  {
    Tensor p = Tensor::param("p", {2}, {0.5, -0.5});
    diff::Adam opt({p});
    p.node()->ensure_grad().fill(0.0);
    opt.step(0.01);
    CHECK(p.value(0) == 0.5);
    CHECK(p.value(1) == -0.5);
  }
  // missing gradient is a contract violation
  {
    Tensor p = Tensor::param("p", {2}, {0.5, -0.5});
    diff::Adam opt({p});
    CHECK_THROWS_AS(opt.step(0.01), ContractViolation);
  }
}

TEST_CASE("adam against an independent scalar trace") {
  diff::DtypeScope mode(diff::Dtype::F64);
  const double lr = 0.003, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const std::vector<double> grads = {0.3, -0.2};

  // scripted oracle
  double p_ref = 0.5, m = 0, v = 0;
  for (size_t t = 1; t <= grads.size(); ++t) {
    const double g = grads[t - 1];
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mhat = m / (1 - std::pow(b1, static_cast<double>(t)));
    const double vhat = v / (1 - std::pow(b2, static_cast<double>(t)));
    p_ref -= lr * mhat / (std::sqrt(vhat) + eps);
  }

  Tensor p = Tensor::param("p", {1}, {0.5});
  diff::Adam opt({p});
  for (double g : grads) {
    p.node()->ensure_grad().fill(g);
    opt.step(lr);
  }
  CHECK(p.value(0) == doctest::Approx(p_ref).epsilon(1e-14));
  CHECK(opt.step_count() == 2);
}

TEST_CASE("checkpoint container round-trip") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "sray_ckpt_test.srckpt").string();

  std::vector<diff::CheckpointEntry> entries;
  entries.push_back(diff::CheckpointEntry::from_doubles("a", {2, 2}, {1.5, -2.25, 0.0, 4.0},
                                                        diff::CheckpointEntry::F32));
  entries.push_back(diff::CheckpointEntry::from_doubles("b/long.name", {3}, {1e-17, 2.0, -3.5},
                                                        diff::CheckpointEntry::F64));
  entries.push_back(diff::CheckpointEntry::from_u64("state", {0xDEADBEEFCAFEBABEULL, 7}));
  entries.push_back(diff::CheckpointEntry::from_string("config", "{\"k\":1}"));
  diff::write_checkpoint(path, entries);

  const auto back = diff::read_checkpoint(path);
  REQUIRE(back.size() == 4);
  CHECK(back[0].name == "a");
  CHECK(back[0].shape == diff::Shape({2, 2}));
  CHECK(back[0].to_doubles() == std::vector<double>({1.5, -2.25, 0.0, 4.0}));
  CHECK(back[1].to_doubles() == std::vector<double>({1e-17, 2.0, -3.5}));
  CHECK(back[2].to_u64() == std::vector<uint64_t>({0xDEADBEEFCAFEBABEULL, 7}));
  CHECK(back[3].to_string() == "{\"k\":1}");
  CHECK(diff::has_entry(back, "b/long.name"));
  CHECK_THROWS_AS(diff::find_entry(back, "nope"), ValidationError);
  fs::remove(path);
}

TEST_CASE("paramstore rejects duplicates, keeps order") {
  diff::ParamStore store;
  Rng rng(1);
  store.create_glorot("a.w", 4, 4, rng);
  store.create_zeros("a.b", {4});
  store.create_glorot("b.w", 4, 4, rng);
  CHECK_THROWS_AS(store.create_zeros("a.w", {1}), ContractViolation);
  CHECK(store.names() == std::vector<std::string>({"a.w", "a.b", "b.w"}));
  CHECK(store.with_prefix("a.").size() == 2);
  CHECK(store.total_size() == 4 * 4 + 4 + 16);
}
