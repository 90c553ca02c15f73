// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "sray/config/run_config.hpp"
#include "sray/render/view.hpp"
#include "sray/scene/metrics.hpp"
#include "sray/scene/png_io.hpp"
#include "sray/scene/toy.hpp"
#include "sray/train/gradcheck.hpp"
#include "sray/train/trainer.hpp"

namespace sray::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Dotted flag -> config field. Values are collected as strings and converted
// by declared type, so precedence (defaults < config file < flags) reduces to
// two apply_json passes.
struct FieldBinding {
  const char* flag;
  const char* section;
  const char* key;
  enum Type { I, D, B, U, S } type;
  std::string value;
  CLI::Option* opt = nullptr;
};

std::vector<FieldBinding> make_bindings() {
  return {
      {"--sampler.n-samples", "sampler", "n_samples", FieldBinding::I, "", nullptr},
      {"--sampler.n-neighbors", "sampler", "n_neighbors", FieldBinding::I, "", nullptr},
      {"--sampler.n-plucker", "sampler", "n_plucker", FieldBinding::I, "", nullptr},
      {"--sampler.hidden-width", "sampler", "hidden_width", FieldBinding::I, "", nullptr},
      {"--sampler.layers-per-head", "sampler", "layers_per_head", FieldBinding::I, "", nullptr},
      {"--sampler.offsets-enabled", "sampler", "offsets_enabled", FieldBinding::B, "", nullptr},
      {"--sampler.offset-bound", "sampler", "offset_bound", FieldBinding::D, "", nullptr},
      {"--shader.layers", "shader", "layers", FieldBinding::I, "", nullptr},
      {"--shader.width", "shader", "width", FieldBinding::I, "", nullptr},
      {"--shader.l-pos", "shader", "l_pos", FieldBinding::I, "", nullptr},
      {"--shader.l-dir", "shader", "l_dir", FieldBinding::I, "", nullptr},
      {"--shader.skip-at", "shader", "skip_at", FieldBinding::I, "", nullptr},
      {"--train.total-iters", "train", "total_iters", FieldBinding::I, "", nullptr},
      {"--train.explore-cutoff-frac", "train", "explore_cutoff_frac", FieldBinding::D, "", nullptr},
      {"--train.aux-loss-frac", "train", "aux_loss_frac", FieldBinding::D, "", nullptr},
      {"--train.batch-rays", "train", "batch_rays", FieldBinding::I, "", nullptr},
      {"--train.max-explore-samples", "train", "max_explore_samples", FieldBinding::I, "", nullptr},
      {"--train.lr0", "train", "lr0", FieldBinding::D, "", nullptr},
      {"--train.lr-decay-ratio", "train", "lr_decay_ratio", FieldBinding::D, "", nullptr},
      {"--train.noise-scale-frac", "train", "noise_scale_frac", FieldBinding::D, "", nullptr},
      {"--train.seed", "train", "seed", FieldBinding::U, "", nullptr},
      {"--train.checkpoint-interval", "train", "checkpoint_interval", FieldBinding::I, "", nullptr},
      {"--train.eval-interval", "train", "eval_interval", FieldBinding::I, "", nullptr},
      {"--train.n-reference-views", "train", "n_reference_views", FieldBinding::I, "", nullptr},
      {"--train.ablation", "train", "ablation", FieldBinding::S, "", nullptr},
  };
}

json typed_value(const FieldBinding& b) {
  try {
    switch (b.type) {
      case FieldBinding::I:
        return static_cast<int64_t>(std::stoll(b.value));
      case FieldBinding::D:
        return std::stod(b.value);
      case FieldBinding::U:
        return static_cast<uint64_t>(std::stoull(b.value));
      case FieldBinding::B:
        if (b.value == "true" || b.value == "1") return true;
        if (b.value == "false" || b.value == "0") return false;
        throw ValidationError(std::string("expected bool for ") + b.flag);
      case FieldBinding::S:
        return b.value;
    }
  } catch (const std::invalid_argument&) {
    throw ValidationError(std::string("bad value for ") + b.flag + ": " + b.value);
  } catch (const std::out_of_range&) {
    throw ValidationError(std::string("value out of range for ") + b.flag + ": " + b.value);
  }
  return {};
}

config::RunConfig resolve_config(const std::string& config_file,
                                 const std::vector<FieldBinding>& bindings) {
  config::RunConfig cfg;
  if (!config_file.empty()) {
    std::ifstream f(config_file);
    if (!f) throw ValidationError("missing config file: " + config_file);
    std::stringstream ss;
    ss << f.rdbuf();
    cfg = config::apply_json(cfg, ss.str());
  }
  json overrides;
  for (const FieldBinding& b : bindings)
    if (b.opt && b.opt->count() > 0) overrides[b.section][b.key] = typed_value(b);
  if (!overrides.empty()) cfg = config::apply_json(cfg, overrides.dump());
  cfg.validate();
  return cfg;
}

geom::Camera camera_from_pose_file(const std::string& path, double t_n, double t_f) {
  std::ifstream f(path);
  if (!f) throw ValidationError("missing pose file: " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed pose JSON: ") + e.what());
  }
  geom::Camera cam;
  cam.fx = j.at("fx").get<double>();
  cam.fy = j.at("fy").get<double>();
  cam.cx = j.at("cx").get<double>();
  cam.cy = j.at("cy").get<double>();
  cam.width = j.at("width").get<int>();
  cam.height = j.at("height").get<int>();
  cam.t_near = t_n;
  cam.t_far = t_f;
  const auto m = j.at("cam2world").get<std::vector<double>>();
  if (m.size() != 16) throw ValidationError("pose file: cam2world must have 16 entries");
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) cam.cam2world(r, c) = m[static_cast<size_t>(r) * 4 + c];
  cam.validate();
  return cam;
}

int cmd_make_toy_scene(const std::string& kind, int views, int res, uint64_t seed,
                       const std::string& out) {
  scene::ToyOptions opts;
  if (kind == "quads")
    opts.kind = scene::ToyKind::quads;
  else if (kind == "sphere")
    opts.kind = scene::ToyKind::sphere;
  else
    throw ValidationError("unknown toy scene kind: " + kind);
  opts.n_views = views;
  opts.resolution = res;
  opts.seed = seed;
  scene::make_toy_scene(opts, out);
  std::cout << (fs::path(out) / "scene.json").string() << "\n";
  return 0;
}

int cmd_train(const std::string& scene_path, const std::string& out,
              const std::string& resume, config::RunConfig cfg) {
  const scene::Scene sc = scene::load_scene(scene_path);
  fs::create_directories(out);
  if (!resume.empty()) {
    // Resumed runs continue under the configuration stored in the checkpoint.
    const auto entries = diff::read_checkpoint(resume);
    cfg = config::from_json_string(diff::find_entry(entries, "config").to_string());
  }
  {
    std::ofstream f(fs::path(out) / "effective_config.json");
    f << config::to_json_string(cfg) << "\n";
  }
  train::Trainer trainer(sc, cfg, out);
  if (!resume.empty()) {
    const int64_t it = trainer.restore_checkpoint(resume);
    std::cout << "resuming at iteration " << it << "\n";
  }
  trainer.run();
  std::cout << "final checkpoint: " << (fs::path(out) / "checkpoint_final.srckpt").string()
            << "\n";
  return 0;
}

int cmd_render(const std::string& ckpt, const std::string& scene_path, int view_index,
               int heldout_index, const std::string& pose_file, const std::string& out_png,
               int dense, bool avr) {
  const scene::Scene sc = scene::load_scene(scene_path);
  auto model = train::load_model(ckpt);

  geom::Camera pose;
  if (!pose_file.empty()) {
    pose = camera_from_pose_file(pose_file, sc.t_near, sc.t_far);
  } else if (heldout_index >= 0) {
    const auto held = sc.heldout_indices();
    if (heldout_index >= static_cast<int>(held.size()))
      throw ValidationError("heldout index out of range");
    pose = sc.views[static_cast<size_t>(held[static_cast<size_t>(heldout_index)])].camera;
  } else {
    if (view_index < 0 || view_index >= static_cast<int>(sc.views.size()))
      throw ValidationError("view index out of range");
    pose = sc.views[static_cast<size_t>(view_index)].camera;
  }

  const scene::ReferencePool pool =
      scene::select_reference_pool(sc, model->cfg.train.n_reference_views);
  render::RenderStats stats;
  geom::Image im =
      render::render_pas(pose, sc, pool, *model->sampler, *model->shader, avr, &stats);
  scene::write_png(out_png, im);
  std::cout << "wrote " << out_png << "\n";
  std::cout << "shader queries: " << stats.shader_queries << " (" << stats.seconds << " s)\n";

  if (dense > 0) {
    render::RenderStats dstats;
    geom::Image dim =
        render::render_dense(pose, *model->shader, sc.t_near, sc.t_far, dense, &dstats);
    const fs::path dense_png = fs::path(out_png).replace_extension(".dense.png");
    scene::write_png(dense_png.string(), dim);
    std::cout << "dense render (" << dense << " samples): " << dstats.shader_queries
              << " queries (" << dstats.seconds << " s) -> " << dense_png.string() << "\n";
    std::cout << "query ratio dense/sparse: "
              << static_cast<double>(dstats.shader_queries) /
                     static_cast<double>(stats.shader_queries)
              << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& scene_path, const std::string& out_dir,
             bool avr) {
  const scene::Scene sc = scene::load_scene(scene_path);
  const auto heldout = sc.heldout_indices();
  if (heldout.empty()) throw ValidationError("empty heldout split");
  auto model = train::load_model(ckpt);
  const scene::ReferencePool pool =
      scene::select_reference_pool(sc, model->cfg.train.n_reference_views);

  fs::create_directories(out_dir);
  std::ofstream csv(fs::path(out_dir) / "eval.csv");
  csv << "view,psnr,ssim\n";
  char buf[128];
  double psnr_acc = 0, ssim_acc = 0;
  std::printf("%8s %12s %12s\n", "view", "psnr", "ssim");
  for (int i : heldout) {
    const scene::View& v = sc.views[static_cast<size_t>(i)];
    const geom::Image im =
        render::render_pas(v.camera, sc, pool, *model->sampler, *model->shader, avr);
    std::snprintf(buf, sizeof(buf), "render_%03d.png", i);
    const std::string png_path = (fs::path(out_dir) / buf).string();
    scene::write_png(png_path, im);
    // Metrics are computed on the 8-bit file content so a recomputation from
    // the dumped renders reproduces the table exactly.
    const geom::Image quantized = scene::read_png(png_path);
    const double p = scene::psnr(quantized, v.image);
    const double s = scene::ssim(quantized, v.image);
    psnr_acc += p;
    ssim_acc += s;
    csv << i << "," << std::setprecision(17) << p << "," << s << "\n";
    std::printf("%8d %12.4f %12.4f\n", i, p, s);
  }
  const double n = static_cast<double>(heldout.size());
  csv << "mean," << std::setprecision(17) << psnr_acc / n << "," << ssim_acc / n << "\n";
  std::printf("%8s %12.4f %12.4f\n", "mean", psnr_acc / n, ssim_acc / n);
  return 0;
}

int cmd_gradcheck(int seeds, uint64_t seed, bool corrupt) {
  train::GradCheckOptions opts;
  opts.n_configs = seeds;
  opts.seed = seed;
  opts.corrupt = corrupt;
  const train::GradCheckReport report = train::run_gradcheck(opts);
  std::cout << train::format_report(report);
  return report.passed ? 0 : 3;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"sparseray: sparse-sampling neural renderer"};
  app.require_subcommand(1);

  // make-toy-scene
  auto* mk = app.add_subcommand("make-toy-scene", "generate an analytic multi-view scene");
  std::string mk_kind = "quads", mk_out;
  int mk_views = 12, mk_res = 64;
  uint64_t mk_seed = 0;
  mk->add_option("--kind", mk_kind, "quads|sphere");
  mk->add_option("--views", mk_views, "number of views (>= 5)");
  mk->add_option("--res", mk_res, "image resolution");
  mk->add_option("--seed", mk_seed, "generator seed");
  mk->add_option("--out", mk_out, "output directory")->required();

  // train
  auto* tr = app.add_subcommand("train", "train on a scene");
  std::string tr_scene, tr_out, tr_config, tr_resume, tr_ablate;
  bool tr_deterministic = false;
  auto tr_bindings = make_bindings();
  tr->add_option("--scene", tr_scene, "scene manifest")->required();
  tr->add_option("--out", tr_out, "output directory")->required();
  tr->add_option("--config", tr_config, "JSON config file");
  tr->add_option("--resume", tr_resume, "checkpoint to resume from");
  tr->add_option("--ablate", tr_ablate,
                 "none|no-exploration|no-exploitation|uniform-baseline");
  tr->add_flag("--deterministic", tr_deterministic,
               "single-stream execution (always on; flag kept for scripts)");
  for (auto& b : tr_bindings) b.opt = tr->add_option(b.flag, b.value);

  // render
  auto* rd = app.add_subcommand("render", "render one view from a checkpoint");
  std::string rd_ckpt, rd_scene, rd_pose, rd_out;
  int rd_view = -1, rd_heldout = -1, rd_dense = 0;
  bool rd_avr = false;
  rd->add_option("--checkpoint", rd_ckpt)->required();
  rd->add_option("--scene", rd_scene)->required();
  rd->add_option("--view", rd_view, "view index into the manifest");
  rd->add_option("--heldout", rd_heldout, "index into the heldout split");
  rd->add_option("--pose-file", rd_pose, "JSON camera pose");
  rd->add_option("--out", rd_out, "output PNG")->required();
  rd->add_option("--dense", rd_dense, "also render an N-sample dense baseline");
  rd->add_flag("--avr", rd_avr, "write the light-field output instead");

  // eval
  auto* ev = app.add_subcommand("eval", "PSNR/SSIM over the heldout split");
  std::string ev_ckpt, ev_scene, ev_out;
  bool ev_avr = false;
  ev->add_option("--checkpoint", ev_ckpt)->required();
  ev->add_option("--scene", ev_scene)->required();
  ev->add_option("--out", ev_out, "output directory")->required();
  ev->add_flag("--avr", ev_avr, "evaluate the light-field output instead");

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient verification");
  int gc_seeds = 100;
  uint64_t gc_seed = 0;
  bool gc_corrupt = false;
  gc->add_option("--seeds", gc_seeds, "number of random configurations");
  gc->add_option("--seed", gc_seed, "base seed");
  gc->add_flag("--corrupt", gc_corrupt, "corrupt one gradient (harness self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*mk) return cmd_make_toy_scene(mk_kind, mk_views, mk_res, mk_seed, mk_out);
    if (*tr) {
      config::RunConfig cfg = resolve_config(tr_config, tr_bindings);
      if (!tr_ablate.empty()) cfg.train.ablation = tr_ablate;
      cfg.validate();
      return cmd_train(tr_scene, tr_out, tr_resume, cfg);
    }
    if (*rd)
      return cmd_render(rd_ckpt, rd_scene, rd_view, rd_heldout, rd_pose, rd_out, rd_dense,
                        rd_avr);
    if (*ev) return cmd_eval(ev_ckpt, ev_scene, ev_out, ev_avr);
    if (*gc) return cmd_gradcheck(gc_seeds, gc_seed, gc_corrupt);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace sray::cli
