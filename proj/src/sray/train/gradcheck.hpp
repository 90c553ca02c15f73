// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace sray::train {

struct GradCheckOptions {
  int n_configs = 100;
  uint64_t seed = 0;
  double eps = 1e-5;
  double tol = 1e-4;
  // Test hook: scales one analytic gradient by 1.01; the harness must fail.
  bool corrupt = false;
};

struct GradCheckReport {
  struct Entry {
    std::string head;       // coarse | fine | shader
    std::string loss_path;  // main | main+aux
    double max_rel_err = 0;
  };
  std::vector<Entry> entries;
  double max_rel_err = 0;
  bool passed = false;
  int n_configs = 0;
  double seconds = 0;
};

// Central finite differences against the tape gradients on reduced-width
// heads, 64-bit mode, over randomized configurations of the full pipeline
// (plucker encoding -> heads -> guided compositing -> loss, with and without
// the auxiliary light-field terms). Projected colors are held fixed per
// configuration, matching how gradients treat them in training.
GradCheckReport run_gradcheck(const GradCheckOptions& opts);

std::string format_report(const GradCheckReport& report);

}  // namespace sray::train
