// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "sray/sampler/sampler.hpp"
#include "sray/shader/shader.hpp"
#include "sray/train/train_config.hpp"

namespace sray::config {

// Merged configuration: defaults < config file < flag overrides. Every field
// is addressable from the CLI via its dotted path.
struct RunConfig {
  sampler::SamplerConfig sampler;
  shader::ShaderConfig shader;
  train::TrainConfig train;

  void validate() const {
    sampler.validate();
    shader.validate();
    train.validate(sampler.n_samples);
  }
};

std::string to_json_string(const RunConfig& cfg);
// Strict parse: unknown keys are rejected.
RunConfig from_json_string(const std::string& text);
// Applies a (possibly partial) JSON document on top of base.
RunConfig apply_json(const RunConfig& base, const std::string& text);

}  // namespace sray::config
