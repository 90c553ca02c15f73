// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/train/model.hpp"

namespace sray::train {

std::unique_ptr<Model> build_model(const config::RunConfig& cfg) {
  cfg.validate();
  auto model = std::make_unique<Model>();
  model->cfg = cfg;
  // Weight init draws from a stream derived from the training seed so that a
  // given seed pins the whole run.
  Rng init_rng(cfg.train.seed, /*stream=*/1);
  model->sampler =
      std::make_unique<sampler::SamplerNet>(cfg.sampler, model->store, init_rng, "sampler");
  model->shader =
      std::make_unique<shader::ShaderNet>(cfg.shader, model->store, init_rng, "shader");
  return model;
}

void append_model_entries(const Model& model, std::vector<diff::CheckpointEntry>& entries) {
  entries.push_back(
      diff::CheckpointEntry::from_string("config", config::to_json_string(model.cfg)));
  for (const std::string& name : model.store.names()) {
    const diff::Tensor t = model.store.get(name);
    const auto kind = t.dtype() == diff::Dtype::F32 ? diff::CheckpointEntry::F32
                                                    : diff::CheckpointEntry::F64;
    entries.push_back(
        diff::CheckpointEntry::from_doubles("param/" + name, t.shape(), t.to_doubles(), kind));
  }
}

void load_model_params(Model& model, const std::vector<diff::CheckpointEntry>& entries) {
  for (const std::string& name : model.store.names()) {
    const diff::CheckpointEntry& e = diff::find_entry(entries, "param/" + name);
    diff::Tensor t = model.store.get(name);
    if (e.shape != t.shape())
      throw ValidationError("incompatible checkpoint: shape mismatch for " + name);
    t.set_values(e.to_doubles());
  }
}

std::unique_ptr<Model> load_model(const std::string& checkpoint_path) {
  const auto entries = diff::read_checkpoint(checkpoint_path);
  const config::RunConfig cfg =
      config::from_json_string(diff::find_entry(entries, "config").to_string());
  auto model = build_model(cfg);
  load_model_params(*model, entries);
  return model;
}

}  // namespace sray::train
