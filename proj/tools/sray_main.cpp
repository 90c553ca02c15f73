// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/cli/cli.hpp"

int main(int argc, char** argv) { return sray::cli::run(argc, argv); }
