// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "sray/diff/tensor.hpp"

namespace sray::diff {

// Reverse-mode tape. Ops executed while a tape is active append one backward
// closure each; backward() replays them in exact reverse recording order.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* current();

  // Activates a tape for the current scope.
  class Scope {
   public:
    explicit Scope(Tape& t);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* prev_;
  };

  void record(std::function<void()> backward_fn) { records_.push_back(std::move(backward_fn)); }
  size_t size() const { return records_.size(); }

  // Seeds d(loss)/d(loss) = 1, replays the tape backward, then clears it.
  // The loss must be a scalar recorded on this tape.
  void backward(const Tensor& loss);

  void clear() { records_.clear(); }

 private:
  std::vector<std::function<void()>> records_;
};

// Suppresses recording within a scope (values still computed).
class NoGradScope {
 public:
  NoGradScope();
  ~NoGradScope();
  NoGradScope(const NoGradScope&) = delete;
  NoGradScope& operator=(const NoGradScope&) = delete;

 private:
  Tape* prev_;
};

}  // namespace sray::diff
