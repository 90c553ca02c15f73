// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/config/run_config.hpp"

#include <json.hpp>

namespace sray::config {

using nlohmann::json;

namespace {

template <class T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& section) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) throw ValidationError("unknown config key: " + section + "." + it.key());
  }
}

}  // namespace

std::string to_json_string(const RunConfig& cfg) {
  json j;
  j["sampler"] = {{"n_samples", cfg.sampler.n_samples},
                  {"n_neighbors", cfg.sampler.n_neighbors},
                  {"n_plucker", cfg.sampler.n_plucker},
                  {"hidden_width", cfg.sampler.hidden_width},
                  {"layers_per_head", cfg.sampler.layers_per_head},
                  {"offsets_enabled", cfg.sampler.offsets_enabled},
                  {"offset_bound", cfg.sampler.offset_bound}};
  j["shader"] = {{"layers", cfg.shader.layers},
                 {"width", cfg.shader.width},
                 {"l_pos", cfg.shader.l_pos},
                 {"l_dir", cfg.shader.l_dir},
                 {"skip_at", cfg.shader.skip_at}};
  j["train"] = {{"total_iters", cfg.train.total_iters},
                {"explore_cutoff_frac", cfg.train.explore_cutoff_frac},
                {"aux_loss_frac", cfg.train.aux_loss_frac},
                {"batch_rays", cfg.train.batch_rays},
                {"max_explore_samples", cfg.train.max_explore_samples},
                {"lr0", cfg.train.lr0},
                {"lr_decay_ratio", cfg.train.lr_decay_ratio},
                {"noise_scale_frac", cfg.train.noise_scale_frac},
                {"seed", cfg.train.seed},
                {"checkpoint_interval", cfg.train.checkpoint_interval},
                {"eval_interval", cfg.train.eval_interval},
                {"n_reference_views", cfg.train.n_reference_views},
                {"ablation", cfg.train.ablation}};
  return j.dump(2);
}

RunConfig apply_json(const RunConfig& base, const std::string& text) {
  RunConfig cfg = base;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed config JSON: ") + e.what());
  }
  reject_unknown(j, {"sampler", "shader", "train"}, "<root>");

  if (j.contains("sampler")) {
    const json& s = j["sampler"];
    reject_unknown(s,
                   {"n_samples", "n_neighbors", "n_plucker", "hidden_width", "layers_per_head",
                    "offsets_enabled", "offset_bound"},
                   "sampler");
    take(s, "n_samples", cfg.sampler.n_samples);
    take(s, "n_neighbors", cfg.sampler.n_neighbors);
    take(s, "n_plucker", cfg.sampler.n_plucker);
    take(s, "hidden_width", cfg.sampler.hidden_width);
    take(s, "layers_per_head", cfg.sampler.layers_per_head);
    take(s, "offsets_enabled", cfg.sampler.offsets_enabled);
    take(s, "offset_bound", cfg.sampler.offset_bound);
  }
  if (j.contains("shader")) {
    const json& s = j["shader"];
    reject_unknown(s, {"layers", "width", "l_pos", "l_dir", "skip_at"}, "shader");
    take(s, "layers", cfg.shader.layers);
    take(s, "width", cfg.shader.width);
    take(s, "l_pos", cfg.shader.l_pos);
    take(s, "l_dir", cfg.shader.l_dir);
    take(s, "skip_at", cfg.shader.skip_at);
  }
  if (j.contains("train")) {
    const json& t = j["train"];
    reject_unknown(t,
                   {"total_iters", "explore_cutoff_frac", "aux_loss_frac", "batch_rays",
                    "max_explore_samples", "lr0", "lr_decay_ratio", "noise_scale_frac", "seed",
                    "checkpoint_interval", "eval_interval", "n_reference_views", "ablation"},
                   "train");
    take(t, "total_iters", cfg.train.total_iters);
    take(t, "explore_cutoff_frac", cfg.train.explore_cutoff_frac);
    take(t, "aux_loss_frac", cfg.train.aux_loss_frac);
    take(t, "batch_rays", cfg.train.batch_rays);
    take(t, "max_explore_samples", cfg.train.max_explore_samples);
    take(t, "lr0", cfg.train.lr0);
    take(t, "lr_decay_ratio", cfg.train.lr_decay_ratio);
    take(t, "noise_scale_frac", cfg.train.noise_scale_frac);
    take(t, "seed", cfg.train.seed);
    take(t, "checkpoint_interval", cfg.train.checkpoint_interval);
    take(t, "eval_interval", cfg.train.eval_interval);
    take(t, "n_reference_views", cfg.train.n_reference_views);
    take(t, "ablation", cfg.train.ablation);
  }
  return cfg;
}

RunConfig from_json_string(const std::string& text) { return apply_json(RunConfig{}, text); }

}  // namespace sray::config
