// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace sray::cli {

// Entry point behind the `sray` binary. Exit codes: 0 success, 1 usage,
// 2 validation, 3 runtime failure.
int run(int argc, const char* const* argv);

}  // namespace sray::cli
