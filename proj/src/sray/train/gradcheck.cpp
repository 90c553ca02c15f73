// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/train/gradcheck.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "sray/render/composite.hpp"
#include "sray/sampler/sampler.hpp"
#include "sray/shader/shader.hpp"
#include "sray/train/trainer.hpp"

namespace sray::train {

namespace {

using diff::Tensor;

struct Fixture {
  sampler::SamplerConfig scfg;
  shader::ShaderConfig hcfg;
  diff::ParamStore store;
  std::unique_ptr<sampler::SamplerNet> smp;
  std::unique_ptr<shader::ShaderNet> shd;
  sampler::SamplerNet::RayBatch batch;
  Tensor gt;
  Tensor colors0, validity0;  // projections, fixed per configuration
  double t_n = 1.0, t_f = 3.0;
};

std::unique_ptr<Fixture> make_fixture(Rng rng, bool offsets) {
  auto fx = std::make_unique<Fixture>();
  fx->scfg.n_samples = 3;
  fx->scfg.n_neighbors = 2;
  fx->scfg.n_plucker = 4;
  fx->scfg.hidden_width = 8;
  fx->scfg.layers_per_head = 3;
  fx->scfg.offsets_enabled = offsets;
  fx->hcfg.layers = 4;
  fx->hcfg.width = 8;
  fx->hcfg.l_pos = 2;
  fx->hcfg.l_dir = 1;
  fx->hcfg.skip_at = 2;

  fx->smp = std::make_unique<sampler::SamplerNet>(fx->scfg, fx->store, rng, "sampler");
  fx->shd = std::make_unique<shader::ShaderNet>(fx->hcfg, fx->store, rng, "shader");

  const int b = 2;
  std::vector<geom::Ray> rays;
  for (int r = 0; r < b; ++r) {
    geom::Ray ray;
    ray.origin = Eigen::Vector3d(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                                 rng.uniform(-0.2, 0.2));
    ray.dir = Eigen::Vector3d(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), 1.0).normalized();
    rays.push_back(ray);
  }
  fx->batch = fx->smp->make_batch(rays, fx->t_n, fx->t_f);

  std::vector<double> gt(static_cast<size_t>(b) * 3);
  for (double& v : gt) v = rng.uniform();
  fx->gt = Tensor::from({b, 3}, gt);

  // Neighbor views with random content; projections are computed once at the
  // initial coarse distances and then held fixed.
  std::vector<geom::Camera> cams(2);
  std::vector<geom::Image> images;
  for (int k = 0; k < 2; ++k) {
    geom::Camera& cam = cams[static_cast<size_t>(k)];
    cam.width = cam.height = 8;
    cam.fx = cam.fy = 8.0;
    cam.cx = cam.cy = 4.0;
    cam.t_near = fx->t_n;
    cam.t_far = fx->t_f;
    cam.cam2world = geom::look_at(
        Eigen::Vector3d(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.3, 0.0)),
        Eigen::Vector3d(0, 0, 2.0));
    geom::Image im;
    im.width = im.height = 8;
    im.rgb.resize(8 * 8 * 3);
    for (float& v : im.rgb) v = static_cast<float>(rng.uniform());
    images.push_back(std::move(im));
  }

  Tensor t_coarse;
  {
    diff::NoGradScope no_grad;
    t_coarse = fx->smp->coarse_forward(fx->batch).t_coarse;
  }
  const int ns = fx->scfg.n_samples, nn = fx->scfg.n_neighbors;
  std::vector<geom::NeighborView> neighbors{{&cams[0], &images[0]}, {&cams[1], &images[1]}};
  std::vector<double> colors(static_cast<size_t>(b) * ns * nn * 3);
  std::vector<double> valid(static_cast<size_t>(b) * ns * nn);
  std::vector<double> dist(static_cast<size_t>(ns));
  for (int r = 0; r < b; ++r) {
    for (int i = 0; i < ns; ++i) dist[static_cast<size_t>(i)] = t_coarse.value(r * ns + i);
    const geom::ProjectionBundle bundle = geom::color_to_ray(fx->batch.rays[static_cast<size_t>(r)], dist, neighbors);
    for (size_t i = 0; i < bundle.colors.size(); ++i)
      colors[static_cast<size_t>(r) * ns * nn * 3 + i] = bundle.colors[i];
    for (size_t i = 0; i < bundle.validity.size(); ++i)
      valid[static_cast<size_t>(r) * ns * nn + i] = bundle.validity[i];
  }
  fx->colors0 = Tensor::from({b, static_cast<int64_t>(ns) * nn * 3}, colors);
  fx->validity0 = Tensor::from({b, static_cast<int64_t>(ns) * nn}, valid);
  return fx;
}

// Full pipeline with the projections held fixed.
Tensor pipeline_loss(Fixture& fx, bool with_aux) {
  const int b = fx.batch.count();
  const int ns = fx.scfg.n_samples;
  const auto coarse = fx.smp->coarse_forward(fx.batch);
  const Tensor fine_input =
      fx.smp->build_fine_input(fx.batch, coarse.t_coarse, fx.colors0, fx.validity0);
  const auto fine = fx.smp->fine_forward(fine_input);
  const Tensor t_ref =
      sampler::SamplerNet::refine_distances(coarse.t_coarse, fine.delta_t, fx.t_n, fx.t_f);
  const Tensor points = fx.scfg.offsets_enabled
                            ? fx.smp->apply_offsets(fx.batch, t_ref, fine.o_t)
                            : fx.smp->ray_points(fx.batch, t_ref);
  std::vector<double> dirs(static_cast<size_t>(b) * ns * 3);
  size_t o = 0;
  for (const geom::Ray& r : fx.batch.rays)
    for (int i = 0; i < ns; ++i)
      for (int c = 0; c < 3; ++c) dirs[o++] = r.dir[c];
  const auto out = fx.shd->query(points, Tensor::from({static_cast<int64_t>(b) * ns, 3}, dirs));
  const auto comp = render::compose_pas(diff::reshape(out.colors, {b, ns, 3}),
                                        diff::reshape(out.densities, {b, ns}), t_ref, coarse.a_t,
                                        coarse.b_t, fx.t_f);
  Tensor loss = squared_l2_mean(comp.color, fx.gt);
  if (with_aux) {
    const auto avr = sampler::SamplerNet::avr(fine.w, fine.m, fx.colors0, fx.scfg.n_neighbors);
    loss = diff::add(loss, diff::add(squared_l2_mean(coarse.c_c, fx.gt),
                                     squared_l2_mean(avr.c_f, fx.gt)));
  }
  return loss;
}

std::string head_of(const std::string& name) {
  if (name.rfind("sampler.coarse", 0) == 0) return "coarse";
  if (name.rfind("sampler.fine", 0) == 0) return "fine";
  return "shader";
}

}  // namespace

GradCheckReport run_gradcheck(const GradCheckOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  diff::DtypeScope f64(diff::Dtype::F64);

  GradCheckReport report;
  report.n_configs = opts.n_configs;
  for (const char* head : {"coarse", "fine", "shader"})
    for (const char* path : {"main", "main+aux"})
      report.entries.push_back({head, path, 0.0});
  auto entry = [&report](const std::string& head, const std::string& path) -> double& {
    for (auto& e : report.entries)
      if (e.head == head && e.loss_path == path) return e.max_rel_err;
    throw ContractViolation("unknown gradcheck entry");
  };

  Rng root(opts.seed, /*stream=*/5);
  for (int cfg_i = 0; cfg_i < opts.n_configs; ++cfg_i) {
    auto fx = make_fixture(root.fork(static_cast<uint64_t>(cfg_i)), /*offsets=*/(cfg_i % 2) == 1);
    Rng dir_rng = root.fork(1000003 + static_cast<uint64_t>(cfg_i));

    for (const bool with_aux : {false, true}) {
      const char* path = with_aux ? "main+aux" : "main";

      diff::Tape tape;
      std::vector<std::vector<double>> grads;
      {
        diff::Tape::Scope scope(tape);
        const Tensor loss = pipeline_loss(*fx, with_aux);
        tape.backward(loss);
      }
      for (const std::string& name : fx->store.names()) {
        grads.push_back(fx->store.get(name).grad_doubles());
        fx->store.get(name).zero_grad();
      }
      if (opts.corrupt)
        for (double& g : grads[0]) g *= 1.01;

      for (size_t pi = 0; pi < fx->store.names().size(); ++pi) {
        const std::string& name = fx->store.names()[pi];
        Tensor p = fx->store.get(name);
        const std::vector<double> saved = p.to_doubles();
        std::vector<double> d(saved.size());
        for (double& v : d) v = dir_rng.uniform() < 0.5 ? -1.0 : 1.0;

        double analytic = 0;
        for (size_t i = 0; i < d.size(); ++i) analytic += grads[pi][i] * d[i];

        std::vector<double> bumped = saved;
        for (size_t i = 0; i < d.size(); ++i) bumped[i] = saved[i] + opts.eps * d[i];
        p.set_values(bumped);
        const double lp = pipeline_loss(*fx, with_aux).item();
        for (size_t i = 0; i < d.size(); ++i) bumped[i] = saved[i] - opts.eps * d[i];
        p.set_values(bumped);
        const double lm = pipeline_loss(*fx, with_aux).item();
        p.set_values(saved);

        const double fd = (lp - lm) / (2 * opts.eps);
        const double rel =
            std::abs(fd - analytic) / std::max({std::abs(fd), std::abs(analytic), 1e-6});
        double& slot = entry(head_of(name), path);
        slot = std::max(slot, rel);
      }
    }
  }

  for (const auto& e : report.entries) report.max_rel_err = std::max(report.max_rel_err, e.max_rel_err);
  report.passed = report.max_rel_err < opts.tol;
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string format_report(const GradCheckReport& report) {
  std::ostringstream os;
  os << "finite-difference gradient check over " << report.n_configs << " configurations\n";
  for (const auto& e : report.entries) {
    char line[128];
    std::snprintf(line, sizeof(line), "  %-7s loss=%-9s max rel err %.3e\n", e.head.c_str(),
                  e.loss_path.c_str(), e.max_rel_err);
    os << line;
  }
  char tail[128];
  std::snprintf(tail, sizeof(tail), "overall max rel err %.3e -> %s (%.1fs)\n",
                report.max_rel_err, report.passed ? "PASS" : "FAIL", report.seconds);
  os << tail;
  return os.str();
}

}  // namespace sray::train
