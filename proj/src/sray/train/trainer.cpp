// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace sray::train {

namespace fs = std::filesystem;
using diff::Tensor;

Trainer::Trainer(const scene::Scene& scene, const config::RunConfig& cfg, std::string out_dir)
    : scene_(&scene),
      model_(build_model(cfg)),
      opt_s_(model_->store.with_prefix("shader")),
      opt_cfs_(model_->store.all()),
      pool_(scene::select_reference_pool(scene, cfg.train.n_reference_views)),
      rng_(cfg.train.seed, /*stream=*/2),
      out_dir_(std::move(out_dir)) {
  const int needed = cfg.sampler.n_neighbors + 1;
  if (static_cast<int>(scene.train_indices().size()) < needed)
    throw ValidationError("scene too small: need at least " + std::to_string(needed) +
                          " training views");
  explore_cutoff_it_ = static_cast<int64_t>(
      std::floor(cfg.train.explore_cutoff_frac * static_cast<double>(cfg.train.total_iters) +
                 1e-9));
  aux_cutoff_it_ = static_cast<int64_t>(std::floor(
      cfg.train.aux_loss_frac * static_cast<double>(cfg.train.total_iters) + 1e-9));
  fs::create_directories(out_dir_);
}

bool Trainer::is_explore_iter(int64_t it) const {
  const std::string& ab = model_->cfg.train.ablation;
  if (ab == "no-exploration" || ab == "uniform-baseline") return false;
  if (ab == "no-exploitation") return true;
  return (it % 2 == 0) && it < explore_cutoff_it_;
}

double Trainer::lr_at(int64_t it) const {
  const auto& t = model_->cfg.train;
  return t.lr0 * std::pow(t.lr_decay_ratio,
                          static_cast<double>(it) / static_cast<double>(t.total_iters));
}

double Trainer::aux_lambda(int64_t it) const { return it < aux_cutoff_it_ ? 1.0 : 0.0; }

std::vector<double> Trainer::subsample_explore(const std::vector<double>& t, int n_plus,
                                               double t_n) {
  const int ns = static_cast<int>(t.size());
  SRAY_CHECK(ns >= 1, "subsample needs at least one distance");
  SRAY_CHECK(n_plus >= ns && n_plus % ns == 0, "n_plus must be a multiple of N_s");
  const int per = n_plus / ns;
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n_plus));
  double prev = t_n;
  for (int i = 0; i < ns; ++i) {
    const double hi = t[static_cast<size_t>(i)];
    SRAY_CHECK(hi >= prev, "distances must be sorted");
    for (int j = 1; j < per; ++j)
      out.push_back(prev + (hi - prev) * static_cast<double>(j) / per);
    out.push_back(hi);  // right-anchored: the original distance is retained exactly
    prev = hi;
  }
  return out;
}

std::vector<double> Trainer::add_explore_noise(std::vector<double> t_plus, double t_n, double t_f,
                                               double scale_frac, Rng& rng) {
  double prev = t_n;
  for (double& v : t_plus) {
    const double width = v - prev;
    SRAY_CHECK(width >= 0, "exploration distances must be sorted");
    prev = v;
    v = std::clamp(v + rng.normal() * scale_frac * width, t_n, t_f);
  }
  std::sort(t_plus.begin(), t_plus.end());
  return t_plus;
}

Trainer::Batch Trainer::sample_batch() {
  const auto& cfg = model_->cfg;
  const std::vector<int> train = scene_->train_indices();
  const int vi = train[static_cast<size_t>(
      rng_.uniform_int(0, static_cast<int64_t>(train.size()) - 1))];
  const scene::View& view = scene_->views[static_cast<size_t>(vi)];

  const int b = cfg.train.batch_rays;
  std::vector<geom::Ray> rays;
  rays.reserve(static_cast<size_t>(b));
  std::vector<double> gt(static_cast<size_t>(b) * 3);
  for (int r = 0; r < b; ++r) {
    const int x = static_cast<int>(rng_.uniform_int(0, view.camera.width - 1));
    const int y = static_cast<int>(rng_.uniform_int(0, view.camera.height - 1));
    rays.push_back(geom::pixel_ray(view.camera, x + 0.5, y + 0.5));
    const Eigen::Vector3d c = view.image.at(x, y);
    for (int ch = 0; ch < 3; ++ch) gt[static_cast<size_t>(r) * 3 + ch] = c[ch];
  }

  // Neighbors: N_n random training views excluding the batch view, shared by
  // the whole batch, sorted near to far from the batch camera.
  std::vector<int> candidates;
  for (int i : train)
    if (i != vi) candidates.push_back(i);
  std::vector<int> chosen;
  for (int k = 0; k < cfg.sampler.n_neighbors; ++k) {
    const int64_t pick =
        rng_.uniform_int(0, static_cast<int64_t>(candidates.size()) - 1 - k);
    std::swap(candidates[static_cast<size_t>(pick)],
              candidates[candidates.size() - 1 - static_cast<size_t>(k)]);
    chosen.push_back(candidates[candidates.size() - 1 - static_cast<size_t>(k)]);
  }
  const Eigen::Vector3d center = view.camera.center();
  std::stable_sort(chosen.begin(), chosen.end(), [&](int a, int bb) {
    return (scene_->views[static_cast<size_t>(a)].camera.center() - center).norm() <
           (scene_->views[static_cast<size_t>(bb)].camera.center() - center).norm();
  });

  Batch batch{model_->sampler->make_batch(rays, scene_->t_near, scene_->t_far),
              Tensor::from({b, 3}, gt),
              {}};
  for (int i : chosen)
    batch.neighbors.push_back({&scene_->views[static_cast<size_t>(i)].camera,
                               &scene_->views[static_cast<size_t>(i)].image});
  return batch;
}

Tensor squared_l2_mean(const Tensor& pred, const Tensor& gt) {
  SRAY_CHECK(pred.shape() == gt.shape(), "loss operands must share a shape");
  Tensor d = diff::sub(pred, gt);
  return diff::mul_scalar(diff::sum(diff::mul(d, d)), 1.0 / static_cast<double>(pred.dim(0)));
}

namespace {

Tensor dirs_per_sample(const std::vector<geom::Ray>& rays, int n) {
  std::vector<double> d(rays.size() * static_cast<size_t>(n) * 3);
  size_t o = 0;
  for (const geom::Ray& r : rays)
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 3; ++c) d[o++] = r.dir[c];
  return Tensor::from({static_cast<int64_t>(rays.size()) * n, 3}, d);
}

Tensor points_for(const std::vector<geom::Ray>& rays, const std::vector<double>& distances,
                  int n) {
  std::vector<double> p(rays.size() * static_cast<size_t>(n) * 3);
  size_t o = 0;
  for (size_t r = 0; r < rays.size(); ++r)
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector3d q =
          rays[r].origin + distances[r * static_cast<size_t>(n) + i] * rays[r].dir;
      p[o++] = q.x();
      p[o++] = q.y();
      p[o++] = q.z();
    }
  return Tensor::from({static_cast<int64_t>(rays.size()) * n, 3}, p);
}

}  // namespace

StepStats Trainer::explore_step(int64_t it) {
  const auto& cfg = model_->cfg;
  const int ns = cfg.sampler.n_samples;
  Batch batch = sample_batch();
  const int b = batch.rays.count();

  // Sampler runs off-tape: its outputs are constants here (Opt_s only).
  std::vector<double> t_ref;
  {
    diff::NoGradScope no_grad;
    const auto fwd = model_->sampler->forward(batch.rays, batch.neighbors);
    t_ref = fwd.t_refined.to_doubles();
  }

  // N+ ~ uniform in [N_s, N], rounded up to a multiple of N_s.
  const int64_t raw = rng_.uniform_int(ns, cfg.train.max_explore_samples);
  const int n_plus = static_cast<int>((raw + ns - 1) / ns) * ns;

  std::vector<double> t_plus(static_cast<size_t>(b) * n_plus);
  std::vector<double> row(static_cast<size_t>(ns));
  for (int r = 0; r < b; ++r) {
    for (int i = 0; i < ns; ++i) row[static_cast<size_t>(i)] = t_ref[static_cast<size_t>(r) * ns + i];
    std::vector<double> sub = subsample_explore(row, n_plus, scene_->t_near);
    sub = add_explore_noise(std::move(sub), scene_->t_near, scene_->t_far,
                            cfg.train.noise_scale_frac, rng_);
    std::copy(sub.begin(), sub.end(), t_plus.begin() + static_cast<size_t>(r) * n_plus);
  }

  const Tensor distances = Tensor::from({b, n_plus}, t_plus);
  const Tensor points = points_for(batch.rays.rays, t_plus, n_plus);
  const Tensor dirs = dirs_per_sample(batch.rays.rays, n_plus);

  const int64_t q0 = shader::ShaderNet::query_count();
  diff::Tape tape;
  StepStats st;
  {
    diff::Tape::Scope scope(tape);
    const auto out = model_->shader->query(points, dirs);
    const Tensor alpha =
        render::alphas(diff::reshape(out.densities, {b, n_plus}), distances, scene_->t_far);
    const render::Composited comp = render::compose(diff::reshape(out.colors, {b, n_plus, 3}), alpha);
    const Tensor loss = squared_l2_mean(comp.color, batch.gt);
    st.loss = loss.item();
    tape.backward(loss);
  }
  opt_s_.step(lr_at(it));
  st.shader_queries = shader::ShaderNet::query_count() - q0;
  return st;
}

StepStats Trainer::exploit_step(int64_t it) {
  const auto& cfg = model_->cfg;
  const int ns = cfg.sampler.n_samples;
  Batch batch = sample_batch();
  const int b = batch.rays.count();
  const double lambda = aux_lambda(it);

  const int64_t q0 = shader::ShaderNet::query_count();
  diff::Tape tape;
  StepStats st;
  {
    diff::Tape::Scope scope(tape);
    const auto fwd = model_->sampler->forward(batch.rays, batch.neighbors);
    const Tensor points = (cfg.sampler.offsets_enabled && fwd.fine.o_t.defined())
                              ? model_->sampler->apply_offsets(batch.rays, fwd.t_refined,
                                                               fwd.fine.o_t)
                              : model_->sampler->ray_points(batch.rays, fwd.t_refined);
    const auto out = model_->shader->query(points, dirs_per_sample(batch.rays.rays, ns));
    const render::Composited comp = render::compose_pas(
        diff::reshape(out.colors, {b, ns, 3}), diff::reshape(out.densities, {b, ns}),
        fwd.t_refined, fwd.coarse.a_t, fwd.coarse.b_t, scene_->t_far);
    Tensor loss = squared_l2_mean(comp.color, batch.gt);
    st.loss = loss.item();
    if (lambda > 0) {
      const Tensor aux = diff::add(squared_l2_mean(fwd.coarse.c_c, batch.gt),
                                   squared_l2_mean(fwd.c_f, batch.gt));
      st.aux_loss = aux.item();
      loss = diff::add(loss, aux);
    }
    tape.backward(loss);
  }
  opt_cfs_.step(lr_at(it));
  st.shader_queries = shader::ShaderNet::query_count() - q0;
  return st;
}

StepStats Trainer::uniform_step(int64_t it) {
  const auto& cfg = model_->cfg;
  const int ns = cfg.sampler.n_samples;
  Batch batch = sample_batch();
  const int b = batch.rays.count();

  std::vector<double> t(static_cast<size_t>(b) * ns);
  const double step = (scene_->t_far - scene_->t_near) / ns;
  for (int r = 0; r < b; ++r)
    for (int i = 0; i < ns; ++i)
      t[static_cast<size_t>(r) * ns + i] = scene_->t_near + (i + 0.5) * step;

  const Tensor distances = Tensor::from({b, ns}, t);
  const Tensor points = points_for(batch.rays.rays, t, ns);
  const Tensor dirs = dirs_per_sample(batch.rays.rays, ns);

  const int64_t q0 = shader::ShaderNet::query_count();
  diff::Tape tape;
  StepStats st;
  {
    diff::Tape::Scope scope(tape);
    const auto out = model_->shader->query(points, dirs);
    const Tensor alpha =
        render::alphas(diff::reshape(out.densities, {b, ns}), distances, scene_->t_far);
    const render::Composited comp = render::compose(diff::reshape(out.colors, {b, ns, 3}), alpha);
    const Tensor loss = squared_l2_mean(comp.color, batch.gt);
    st.loss = loss.item();
    tape.backward(loss);
  }
  opt_s_.step(lr_at(it));
  st.shader_queries = shader::ShaderNet::query_count() - q0;
  return st;
}

StepStats Trainer::step(int64_t it) {
  if (model_->cfg.train.ablation == "uniform-baseline") return uniform_step(it);
  if (is_explore_iter(it)) return explore_step(it);
  return exploit_step(it);
}

double Trainer::eval_heldout_psnr(bool avr) const {
  const auto heldout = scene_->heldout_indices();
  SRAY_CHECK(!heldout.empty(), "no heldout views");
  double acc = 0;
  for (int i : heldout) {
    const scene::View& v = scene_->views[static_cast<size_t>(i)];
    geom::Image im;
    if (model_->cfg.train.ablation == "uniform-baseline")
      im = render::render_dense(v.camera, *model_->shader, scene_->t_near, scene_->t_far,
                        model_->cfg.sampler.n_samples);
    else
      im = render::render_pas(v.camera, *scene_, pool_, *model_->sampler, *model_->shader, avr);
    acc += scene::psnr(im, v.image);
  }
  return acc / static_cast<double>(heldout.size());
}

void Trainer::run() {
  const auto& cfg = model_->cfg;
  const std::string metrics_path = out_dir_ + "/metrics.csv";
  std::ofstream metrics(metrics_path, std::ios::trunc);
  if (!metrics) throw ValidationError("cannot write metrics: " + metrics_path);
  metrics << "# ablation=" << cfg.train.ablation << "\n";
  metrics << "iteration,mode,loss,aux_loss,lr,heldout_psnr\n";

  char buf[256];
  for (int64_t it = start_it_; it < cfg.train.total_iters; ++it) {
    const bool explore = cfg.train.ablation != "uniform-baseline" && is_explore_iter(it);
    const StepStats st = step(it);
    const char* mode = cfg.train.ablation == "uniform-baseline" ? "uniform"
                       : explore                                ? "explore"
                                                                : "exploit";
    const bool do_eval = ((it + 1) % cfg.train.eval_interval == 0) ||
                         it + 1 == cfg.train.total_iters;
    std::snprintf(buf, sizeof(buf), "%lld,%s,%.17g,%.17g,%.17g,", static_cast<long long>(it),
                  mode, st.loss, st.aux_loss, lr_at(it));
    metrics << buf;
    if (do_eval) {
      std::snprintf(buf, sizeof(buf), "%.17g", eval_heldout_psnr());
      metrics << buf;
    }
    metrics << "\n";
    metrics.flush();

    if ((it + 1) % cfg.train.checkpoint_interval == 0 && it + 1 != cfg.train.total_iters)
      save_checkpoint(out_dir_ + "/checkpoint_" + std::to_string(it + 1) + ".srckpt", it + 1);
  }
  save_checkpoint(out_dir_ + "/checkpoint_final.srckpt", cfg.train.total_iters);
}

void Trainer::save_checkpoint(const std::string& path, int64_t next_it) const {
  std::vector<diff::CheckpointEntry> entries;
  append_model_entries(*model_, entries);
  entries.push_back(diff::CheckpointEntry::from_u64("it", {static_cast<uint64_t>(next_it)}));
  entries.push_back(diff::CheckpointEntry::from_u64("rng", {rng_.state(), rng_.stream()}));

  const auto dump_opt = [&entries](const diff::Adam& opt, const std::string& prefix) {
    entries.push_back(diff::CheckpointEntry::from_u64(
        prefix + "/t", {static_cast<uint64_t>(opt.step_count())}));
    for (size_t i = 0; i < opt.params().size(); ++i) {
      const std::string& name = opt.params()[i].name();
      entries.push_back(diff::CheckpointEntry::from_doubles(
          prefix + "/m/" + name, {static_cast<int64_t>(opt.m()[i].size())}, opt.m()[i],
          diff::CheckpointEntry::F64));
      entries.push_back(diff::CheckpointEntry::from_doubles(
          prefix + "/v/" + name, {static_cast<int64_t>(opt.v()[i].size())}, opt.v()[i],
          diff::CheckpointEntry::F64));
    }
  };
  dump_opt(opt_s_, "opt_s");
  dump_opt(opt_cfs_, "opt_cfs");
  diff::write_checkpoint(path, entries);
}

int64_t Trainer::restore_checkpoint(const std::string& path) {
  const auto entries = diff::read_checkpoint(path);
  const std::string ck_cfg = diff::find_entry(entries, "config").to_string();
  if (config::to_json_string(config::from_json_string(ck_cfg)) !=
      config::to_json_string(model_->cfg))
    throw ValidationError("incompatible checkpoint: configuration differs");
  load_model_params(*model_, entries);

  const auto restore_opt = [&entries](diff::Adam& opt, const std::string& prefix) {
    std::vector<std::vector<double>> m, v;
    for (const diff::Tensor& p : opt.params()) {
      m.push_back(diff::find_entry(entries, prefix + "/m/" + p.name()).to_doubles());
      v.push_back(diff::find_entry(entries, prefix + "/v/" + p.name()).to_doubles());
    }
    opt.restore(static_cast<int64_t>(diff::find_entry(entries, prefix + "/t").to_u64()[0]), m, v);
  };
  restore_opt(opt_s_, "opt_s");
  restore_opt(opt_cfs_, "opt_cfs");

  const auto rng_state = diff::find_entry(entries, "rng").to_u64();
  rng_ = Rng::restore(rng_state[0], rng_state[1]);
  start_it_ = static_cast<int64_t>(diff::find_entry(entries, "it").to_u64()[0]);
  return start_it_;
}

}  // namespace sray::train
