// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "sray/config/run_config.hpp"
#include "sray/diff/checkpoint.hpp"
#include "sray/diff/paramstore.hpp"

namespace sray::train {

// Sampler + shader heads over one parameter store.
struct Model {
  config::RunConfig cfg;
  diff::ParamStore store;
  std::unique_ptr<sampler::SamplerNet> sampler;
  std::unique_ptr<shader::ShaderNet> shader;
};

std::unique_ptr<Model> build_model(const config::RunConfig& cfg);

// Parameter + config entries for a checkpoint.
void append_model_entries(const Model& model, std::vector<diff::CheckpointEntry>& entries);

// Rebuilds the model from the config embedded in a checkpoint and loads the
// parameter values. Throws ValidationError on structural mismatch.
std::unique_ptr<Model> load_model(const std::string& checkpoint_path);
void load_model_params(Model& model, const std::vector<diff::CheckpointEntry>& entries);

}  // namespace sray::train
