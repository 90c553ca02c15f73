// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/diff/tape.hpp"

namespace sray::diff {

namespace {
thread_local Tape* g_current_tape = nullptr;
}

Tape* Tape::current() { return g_current_tape; }

Tape::Scope::Scope(Tape& t) : prev_(g_current_tape) { g_current_tape = &t; }
Tape::Scope::~Scope() { g_current_tape = prev_; }

NoGradScope::NoGradScope() : prev_(g_current_tape) { g_current_tape = nullptr; }
NoGradScope::~NoGradScope() { g_current_tape = prev_; }

void Tape::backward(const Tensor& loss) {
  SRAY_CHECK(loss.size() == 1, "backward requires a scalar loss");
  loss.node()->ensure_grad().fill(1.0);
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) (*it)();
  clear();
}

}  // namespace sray::diff
