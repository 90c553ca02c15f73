// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "sray/scene/depth_io.hpp"
#include "sray/scene/metrics.hpp"
#include "sray/scene/png_io.hpp"
#include "sray/scene/refpool.hpp"
#include "sray/scene/scene.hpp"
#include "sray/scene/toy.hpp"

using namespace sray;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("sray_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// A synthetic in-memory scene with cameras at the given centers.
scene::Scene rail_scene(const std::vector<Eigen::Vector3d>& centers) {
  scene::Scene sc;
  sc.t_near = 1;
  sc.t_far = 5;
  for (const auto& c : centers) {
    scene::View v;
    v.camera.fx = v.camera.fy = 16;
    v.camera.cx = v.camera.cy = 8;
    v.camera.width = v.camera.height = 16;
    v.camera.t_near = 1;
    v.camera.t_far = 5;
    v.camera.cam2world = geom::look_at(c, c + Eigen::Vector3d(0, 0, 1));
    v.image = geom::Image::filled(16, 16, 0.5f, 0.5f, 0.5f);
    sc.views.push_back(std::move(v));
  }
  return sc;
}

}  // namespace

TEST_CASE("png round-trips 8-bit content") {
  const fs::path dir = temp_dir("png");
  geom::Image im;
  im.width = 7;
  im.height = 5;
  im.rgb.resize(7 * 5 * 3);
  Rng rng(4);
  for (float& v : im.rgb)
    v = static_cast<float>(rng.uniform_int(0, 255)) / 255.0f;  // exactly representable
  scene::write_png((dir / "x.png").string(), im);
  const geom::Image back = scene::read_png((dir / "x.png").string());
  REQUIRE(back.width == 7);
  REQUIRE(back.height == 5);
  for (size_t i = 0; i < im.rgb.size(); ++i) CHECK(back.rgb[i] == im.rgb[i]);
  CHECK_THROWS_AS(scene::read_png((dir / "missing.png").string()), ValidationError);
}

TEST_CASE("depth maps round-trip") {
  const fs::path dir = temp_dir("depth");
  scene::DepthMap d;
  d.width = 3;
  d.height = 2;
  d.depth = {0.0f, 1.5f, 2.25f, 0.0f, 7.75f, 4.5f};
  scene::write_depth((dir / "d.depth").string(), d);
  const scene::DepthMap back = scene::read_depth((dir / "d.depth").string());
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.depth == d.depth);
}

TEST_CASE("toy scene generation, determinism, and manifest round-trip") {
  const fs::path dir1 = temp_dir("toy1");
  const fs::path dir2 = temp_dir("toy2");
  scene::ToyOptions opts;
  opts.kind = scene::ToyKind::quads;
  opts.n_views = 9;
  opts.resolution = 32;
  opts.seed = 7;
  const scene::Scene s1 = scene::make_toy_scene(opts, dir1.string());
  const scene::Scene s2 = scene::make_toy_scene(opts, dir2.string());
  REQUIRE(s1.views.size() == 9);
  CHECK(s1.heldout_indices() == std::vector<int>({0, 8}));
  CHECK(s1.train_indices().size() == 7);

  // bit-identical regeneration
  CHECK(slurp(dir1 / "view_000.png") == slurp(dir2 / "view_000.png"));
  CHECK(slurp(dir1 / "view_004.png") == slurp(dir2 / "view_004.png"));
  CHECK(slurp(dir1 / "scene.json") == slurp(dir2 / "scene.json"));

  // manifest save/load reproduces every field bit-exactly
  scene::save_manifest(s1, (dir1 / "copy.json").string());
  const scene::Scene s3 = scene::load_scene((dir1 / "copy.json").string());
  REQUIRE(s3.views.size() == s1.views.size());
  CHECK(s3.t_near == s1.t_near);
  CHECK(s3.t_far == s1.t_far);
  for (size_t i = 0; i < s1.views.size(); ++i) {
    CHECK(s3.views[i].camera.fx == s1.views[i].camera.fx);
    CHECK(s3.views[i].camera.cam2world == s1.views[i].camera.cam2world);
    CHECK(s3.views[i].image.rgb == s1.views[i].image.rgb);
  }

  // a different seed produces different content
  opts.seed = 8;
  const fs::path dir3 = temp_dir("toy3");
  scene::make_toy_scene(opts, dir3.string());
  CHECK(slurp(dir1 / "view_000.png") != slurp(dir3 / "view_000.png"));
}

TEST_CASE("toy ground truth matches the analytic tracer") {
  const fs::path dir = temp_dir("toygt");
  scene::ToyOptions opts;
  opts.kind = scene::ToyKind::quads;
  opts.n_views = 6;
  opts.resolution = 48;
  opts.seed = 3;
  const scene::Scene sc = scene::make_toy_scene(opts, dir.string());
  const scene::ToyModel model = scene::make_toy_model(opts.kind, opts.seed);

  const scene::View& v = sc.views[2];
  int hits = 0, misses = 0;
  for (int y = 0; y < 48; y += 3)
    for (int x = 0; x < 48; x += 3) {
      (void)0;
      const geom::Ray ray = geom::pixel_ray(v.camera, x + 0.5, y + 0.5);
      const auto hit = model.trace(ray);
      const Eigen::Vector3d got = v.image.at(x, y);
      const Eigen::Vector3d want = hit.hit ? hit.color : Eigen::Vector3d::Zero();
      for (int c = 0; c < 3; ++c)
        CHECK(std::abs(got[c] - std::clamp(want[c], 0.0, 1.0)) <= 0.5 / 255 + 1e-6);
      (hit.hit ? hits : misses)++;
    }
  CHECK(hits > 0);
  // background visible somewhere in the extreme-arc view
  const scene::View& edge = sc.views[0];
  int edge_misses = 0;
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x)
      if (!model.trace(geom::pixel_ray(edge.camera, x + 0.5, y + 0.5)).hit) ++edge_misses;
  CHECK(edge_misses > 0);

  // depth map agrees with hit distances
  const scene::DepthMap depth = scene::read_depth((dir / "view_002.depth").string());
  const geom::Ray ray = geom::pixel_ray(v.camera, 24.5, 24.5);
  const auto hit = model.trace(ray);
  CHECK(depth.depth[24 * 48 + 24] == doctest::Approx(hit.hit ? hit.t : 0.0).epsilon(1e-6));

  // the sphere variant also builds
  scene::ToyOptions sopts;
  sopts.kind = scene::ToyKind::sphere;
  sopts.n_views = 5;
  sopts.resolution = 16;
  const fs::path sdir = temp_dir("toysphere");
  const scene::Scene ss = scene::make_toy_scene(sopts, sdir.string());
  CHECK(ss.views.size() == 5);

  CHECK_THROWS_AS(scene::make_toy_scene({scene::ToyKind::quads, 3, 16, 0}, dir.string()),
                  ContractViolation);
}

TEST_CASE("scene validation errors are distinct") {
  const fs::path dir = temp_dir("badscene");
  scene::ToyOptions opts;
  opts.n_views = 5;
  opts.resolution = 16;
  scene::make_toy_scene(opts, dir.string());
  const std::string manifest = slurp(dir / "scene.json");

  // missing image file
  {
    std::string broken = manifest;
    const auto pos = broken.find("view_000.png");
    broken.replace(pos, 12, "missing0.png");
    std::ofstream(dir / "broken1.json") << broken;
    CHECK_THROWS_WITH_AS(scene::load_scene((dir / "broken1.json").string()),
                         doctest::Contains("missing image file"), ValidationError);
  }
  // non-orthonormal rotation
  {
    nlohmann::json j = nlohmann::json::parse(manifest);
    j["views"][0]["cam2world"][0] = 3.0;
    std::ofstream(dir / "broken2.json") << j.dump();
    CHECK_THROWS_WITH_AS(scene::load_scene((dir / "broken2.json").string()),
                         doctest::Contains("orthonormal"), ValidationError);
  }
  // resolution mismatch
  {
    nlohmann::json j = nlohmann::json::parse(manifest);
    j["views"][0]["width"] = 8;
    j["views"][0]["cx"] = 4.0;
    std::ofstream(dir / "broken3.json") << j.dump();
    CHECK_THROWS_WITH_AS(scene::load_scene((dir / "broken3.json").string()),
                         doctest::Contains("resolution mismatch"), ValidationError);
  }
}

TEST_CASE("reference pool selection") {
  // n_t = all training views -> the whole split
  {
    std::vector<Eigen::Vector3d> cs;
    for (int i = 0; i < 9; ++i) cs.emplace_back(0.3 * i, 0.01 * i * i, 0);
    const scene::Scene sc = rail_scene(cs);
    const auto pool = scene::select_reference_pool(sc, 7);
    CHECK(pool.indices == sc.train_indices());
  }
  // linear rail, n_t = 2 -> the two endpoint-most cameras (brute-force
  // max-min oracle over all pairs)
  {
    std::vector<Eigen::Vector3d> cs;
    for (int i = 0; i < 9; ++i) cs.emplace_back(static_cast<double>(i), 0, 0);
    const scene::Scene sc = rail_scene(cs);
    const auto train = sc.train_indices();
    double best = -1;
    std::pair<int, int> want{-1, -1};
    for (size_t a = 0; a < train.size(); ++a)
      for (size_t b = a + 1; b < train.size(); ++b) {
        const double d = (sc.views[static_cast<size_t>(train[a])].camera.center() -
                          sc.views[static_cast<size_t>(train[b])].camera.center())
                             .norm();
        if (d > best) {
          best = d;
          want = {train[a], train[b]};
        }
      }
    const auto pool = scene::select_reference_pool(sc, 2);
    CHECK(pool.indices == std::vector<int>({want.first, want.second}));
  }
  // independent of training-view ordering (as camera positions)
  {
    std::vector<Eigen::Vector3d> cs;
    Rng rng(13);
    for (int i = 0; i < 9; ++i)
      cs.emplace_back(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 1));
    const scene::Scene sc = rail_scene(cs);
    auto cs2 = cs;  // permute the training indices 1..7, keep heldout 0 and 8
    std::swap(cs2[1], cs2[5]);
    std::swap(cs2[2], cs2[7]);
    std::swap(cs2[3], cs2[6]);
    const scene::Scene sc2 = rail_scene(cs2);
    auto centers_of = [](const scene::Scene& s, const scene::ReferencePool& p) {
      std::vector<std::array<double, 3>> out;
      for (int i : p.indices) {
        const Eigen::Vector3d c = s.views[static_cast<size_t>(i)].camera.center();
        out.push_back({c.x(), c.y(), c.z()});
      }
      std::sort(out.begin(), out.end());
      return out;
    };
    CHECK(centers_of(sc, scene::select_reference_pool(sc, 3)) ==
          centers_of(sc2, scene::select_reference_pool(sc2, 3)));
  }
  // nearest_pool_views sorts near to far
  {
    std::vector<Eigen::Vector3d> cs;
    for (int i = 0; i < 9; ++i) cs.emplace_back(static_cast<double>(i), 0, 0);
    const scene::Scene sc = rail_scene(cs);
    const scene::ReferencePool pool{{1, 4, 7}};
    const auto near = scene::nearest_pool_views(sc, pool, Eigen::Vector3d(6.6, 0, 0), 2);
    CHECK(near == std::vector<int>({7, 4}));
  }
}

TEST_CASE("psnr examples") {
  geom::Image a = geom::Image::filled(8, 8, 0.5f, 0.5f, 0.5f);
  CHECK(std::isinf(scene::psnr(a, a)));

  geom::Image zero = geom::Image::filled(8, 8, 0, 0, 0);
  geom::Image half = geom::Image::filled(8, 8, 0.5f, 0.5f, 0.5f);
  CHECK(scene::psnr(zero, half) == doctest::Approx(6.0205999).epsilon(1e-6));  // MSE 0.25
  CHECK(scene::psnr(zero, half) == scene::psnr(half, zero));

  geom::Image wrong = geom::Image::filled(4, 4, 0, 0, 0);
  CHECK_THROWS_AS(scene::psnr(zero, wrong), ContractViolation);
}

namespace {
// Independent SSIM oracle: direct 2D windowed evaluation, no separability.
double ssim_oracle(const geom::Image& a, const geom::Image& b) {
  const int win = 11;
  const double sigma = 1.5, c1 = 1e-4, c2 = 9e-4;
  std::vector<double> k(win);
  double ks = 0;
  for (int i = 0; i < win; ++i) {
    const double x = i - 5.0;
    k[static_cast<size_t>(i)] = std::exp(-x * x / (2 * sigma * sigma));
    ks += k[static_cast<size_t>(i)];
  }
  for (double& v : k) v /= ks;
  double total = 0;
  for (int ch = 0; ch < 3; ++ch) {
    double acc = 0;
    int count = 0;
    for (int y = 0; y + win <= a.height; ++y)
      for (int x = 0; x + win <= a.width; ++x) {
        double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
        for (int dy = 0; dy < win; ++dy)
          for (int dx = 0; dx < win; ++dx) {
            const double wgt = k[static_cast<size_t>(dy)] * k[static_cast<size_t>(dx)];
            const double va = a.rgb[((static_cast<size_t>(y + dy)) * a.width + (x + dx)) * 3 +
                                    static_cast<size_t>(ch)];
            const double vb = b.rgb[((static_cast<size_t>(y + dy)) * b.width + (x + dx)) * 3 +
                                    static_cast<size_t>(ch)];
            ma += wgt * va;
            mb += wgt * vb;
            saa += wgt * va * va;
            sbb += wgt * vb * vb;
            sab += wgt * va * vb;
          }
        const double va = saa - ma * ma, vb = sbb - mb * mb, vab = sab - ma * mb;
        acc += ((2 * ma * mb + c1) * (2 * vab + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    total += acc / count;
  }
  return total / 3;
}
}  // namespace

TEST_CASE("ssim examples and oracle agreement") {
  Rng rng(21);
  geom::Image a;
  a.width = a.height = 24;
  a.rgb.resize(24 * 24 * 3);
  for (size_t i = 0; i < a.rgb.size(); ++i)
    a.rgb[i] = static_cast<float>(0.5 + 0.4 * std::sin(0.3 * static_cast<double>(i)) +
                                  0.05 * rng.uniform(-1, 1));

  CHECK(scene::ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));

  // negative against structured content
  geom::Image neg = a;
  for (float& v : neg.rgb) v = 1.0f - v;
  CHECK(scene::ssim(a, neg) < 0.0);

  // production (separable) vs independent direct oracle
  geom::Image b = a;
  Rng rng2(22);
  for (float& v : b.rgb) v = std::clamp(v + static_cast<float>(rng2.uniform(-0.1, 0.1)), 0.0f, 1.0f);
  CHECK(scene::ssim(a, b) == doctest::Approx(ssim_oracle(a, b)).epsilon(1e-6));

  // constant offset: matches the oracle to 1e-6 (luminance term only)
  geom::Image off = a;
  for (float& v : off.rgb) v = std::min(1.0f, v * 0.5f + 0.25f + 0.1f);
  geom::Image base = a;
  for (float& v : base.rgb) v = v * 0.5f + 0.25f;
  CHECK(scene::ssim(base, off) == doctest::Approx(ssim_oracle(base, off)).epsilon(1e-6));
}
