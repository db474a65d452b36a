#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "textworld/procedural.hpp"
#include "textworld/renderer.hpp"

using namespace textworld;

namespace {

CameraIntrinsics small(int w = 160, int h = 120) {
  CameraIntrinsics k;
  k.width = w;
  k.height = h;
  k.vertical_fov = radians(60);
  return k;
}

// Looking at the single wall from its anchor grid, straight along +y.
Camera wall_camera(const Scene& s, int w = 160, int h = 120) {
  return Camera({{0, 0, 1.7}, 0, kPi / 2, 0}, small(w, h), s.gravity());
}

}  // namespace

TEST_CASE("unlit white scene renders flat white") {
  SceneData d = make_test_room();
  for (auto& m : d.materials) {
    m.color = {1, 1, 1};
    m.unlit = true;
  }
  d.fog.density = 0;
  Scene s(std::move(d));
  auto env = base_environment(s);
  env.fog.density = 0;
  Camera cam({s.anchors()[0], 0.2, 0.9, 0}, small(), s.gravity());
  auto fb = render(s, env, cam, {});
  int covered = 0;
  for (int y = 0; y < fb.rgb.height; y++)
    for (int x = 0; x < fb.rgb.width; x++) {
      if (!std::isfinite(fb.depth.at(x, y))) continue;
      covered++;
      const auto* p = fb.rgb.at(x, y);
      REQUIRE(p[0] == 255);
      REQUIRE(p[1] == 255);
      REQUIRE(p[2] == 255);
    }
  CHECK(covered > 0);
}

TEST_CASE("text behind a wall is fully occluded") {
  Scene s(make_single_wall());
  Camera cam = wall_camera(s);
  // Back face of the wall, facing away from the camera.
  auto p = fixture::plane_proposal(1, {0, 8.3, 2}, {0, 1, 0}, {-1, 0, 0}, 3, 1.5);
  auto mesh = fixture::text_on(p, 3);
  REQUIRE(mesh);
  std::vector<TextMesh> text{*mesh};
  auto fb = render(s, base_environment(s), cam, text);
  for (auto v : fb.instance.data) REQUIRE(v == -1);
  CHECK(fb.instance_coverage[0].visible == 0);
  CHECK(fb.instance_coverage[0].unoccluded > 0);
}

TEST_CASE("visible text fills the masks") {
  Scene s(make_single_wall());
  Camera cam = wall_camera(s);
  auto p = fixture::plane_proposal(1, {0, 8, 2}, {0, -1, 0}, {1, 0, 0}, 3, 1.5);
  auto mesh = fixture::text_on(p, 3);
  REQUIRE(mesh);
  std::vector<TextMesh> text{*mesh};
  auto fb = render(s, base_environment(s), cam, text);
  std::size_t inst = 0, chars = 0;
  for (int i = 0; i < int(fb.instance.data.size()); i++) {
    inst += fb.instance.data[i] == 0;
    if (fb.character.data[i] >= 0) {
      chars++;
      CHECK(fb.instance.data[i] == 0);
      CHECK(fb.word.data[i] >= 0);
    }
  }
  CHECK(inst > 0);
  CHECK(chars == inst);
  CHECK(fb.instance_coverage[0].fraction() == doctest::Approx(1.0));
}

TEST_CASE("depth buffer round trips through the camera") {
  Scene s(make_test_room());
  Camera cam({s.anchors()[1], -0.1, 2.0, 0}, small(320, 240), s.gravity());
  auto fb = render(s, base_environment(s), cam, {});
  Rng rng(5);
  int checked = 0;
  while (checked < 1000) {
    int x = int(rng.index(320)), y = int(rng.index(240));
    double z = fb.depth.at(x, y);
    if (!std::isfinite(z)) continue;
    checked++;
    Vec2 px{x + 0.5, y + 0.5};
    auto p = cam.project(cam.unproject(px, z));
    REQUIRE(p);
    CHECK(std::abs(p->pixel.x - px.x) <= 0.5);
    CHECK(std::abs(p->pixel.y - px.y) <= 0.5);
  }
}

TEST_CASE("depth and normals agree with ray casting") {
  Scene s(make_test_room());
  Camera cam({s.anchors()[2], 0.15, 4.0, 0}, small(240, 180), s.gravity());
  auto fb = render(s, base_environment(s), cam, {});
  int total = 0, depth_ok = 0, normal_ok = 0;
  for (int y = 0; y < 180; y++)
    for (int x = 0; x < 240; x++) {
      Vec2 px{x + 0.5, y + 0.5};
      Vec3 dir = cam.ray_direction(px);
      auto hit = cast_ray(s, {cam.position(), dir, kInf});
      double z = fb.depth.at(x, y);
      if (!hit) {
        CHECK_FALSE(std::isfinite(z));
        continue;
      }
      if (!std::isfinite(z)) continue;
      total++;
      double expect = hit->distance * dot(dir, cam.forward());
      depth_ok += std::abs(z - expect) <= 0.01 * expect;
      Vec3 n = hit->normal;
      if (dot(n, dir) > 0) n = -n;
      Vec3 nc = cam.direction_to_camera(n);
      auto got = fb.normals.at(x, y);
      double c = nc.x * got[0] + nc.y * got[1] + nc.z * got[2];
      normal_ok += c >= std::cos(radians(2));
      double len = std::sqrt(double(got[0]) * got[0] + double(got[1]) * got[1] + double(got[2]) * got[2]);
      CHECK(std::abs(len - 1) < 1e-5);
    }
  REQUIRE(total > 1000);
  CHECK(double(depth_ok) / total >= 0.99);
  CHECK(double(normal_ok) / total >= 0.99);
}

TEST_CASE("sky pixels carry no normal and infinite depth") {
  Scene s(make_flat_floor());
  Camera cam({{0, 0, 2}, radians(30), 0, 0}, small(), s.gravity());
  auto fb = render(s, base_environment(s), cam, {});
  REQUIRE_FALSE(std::isfinite(fb.depth.at(80, 0)));
  auto n = fb.normals.at(80, 0);
  CHECK(n[0] == 0);
  CHECK(n[1] == 0);
  CHECK(n[2] == 0);
}

TEST_CASE("fully transparent text leaves the image untouched") {
  Scene s(make_single_wall());
  Camera cam = wall_camera(s);
  auto p = fixture::plane_proposal(1, {0, 8, 2}, {0, -1, 0}, {1, 0, 0}, 3, 1.5);
  auto mesh = fixture::text_on(p, 11);
  REQUIRE(mesh);
  auto asset = std::make_shared<TextAsset>(*mesh->asset);
  for (std::size_t i = 3; i < asset->rgba.pixels.size(); i += 4) asset->rgba.pixels[i] = 0;
  asset->rebuild_alpha_levels();
  mesh->asset = asset;
  std::vector<TextMesh> text{*mesh};
  auto env = base_environment(s);
  for (bool ss : {false, true}) {
    RenderOptions opt{ss};
    auto with = render(s, env, cam, text, opt);
    auto without = render(s, env, cam, {}, opt);
    CHECK(with.rgb.pixels == without.rgb.pixels);
  }
}

TEST_CASE("supersampling keeps the output size and masks") {
  Scene s(make_single_wall());
  Camera cam = wall_camera(s);
  auto p = fixture::plane_proposal(1, {0, 8, 2}, {0, -1, 0}, {1, 0, 0}, 3, 1.5);
  auto mesh = fixture::text_on(p, 2);
  REQUIRE(mesh);
  std::vector<TextMesh> text{*mesh};
  auto a = render(s, base_environment(s), cam, text, {false});
  auto b = render(s, base_environment(s), cam, text, {true});
  CHECK(b.rgb.width == 160);
  CHECK(b.rgb.height == 120);
  CHECK(a.instance.data == b.instance.data);
  CHECK(a.character.data == b.character.data);
}

TEST_CASE("channel encoding clamps and is monotonic") {
  CHECK(encode_channel(0) == 0);
  CHECK(encode_channel(1) == 255);
  CHECK(encode_channel(-1) == 0);
  CHECK(encode_channel(7) == 255);
  int prev = 0;
  for (int i = 0; i <= 1000; i++) {
    int v = encode_channel(i / 1000.0);
    CHECK(v >= prev);
    prev = v;
  }
}
