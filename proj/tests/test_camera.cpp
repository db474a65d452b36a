#include "doctest.h"
#include "textworld/camera.hpp"
#include "textworld/error.hpp"
#include "textworld/rng.hpp"

using namespace textworld;

namespace {

const Vec3 kGravity{0, 0, -1};

CameraIntrinsics intrinsics(int w, int h, double fov_degrees) {
  CameraIntrinsics k;
  k.width = w;
  k.height = h;
  k.vertical_fov = radians(fov_degrees);
  return k;
}

}  // namespace

TEST_CASE("camera basis is orthonormal and right-handed") {
  Rng rng(3);
  for (int i = 0; i < 200; i++) {
    CameraPose pose{{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, 3)}, rng.uniform(-1.2, 1.2),
        rng.uniform(0, 2 * kPi), 0};
    Camera cam(pose, {}, kGravity);
    CHECK(length(cam.right()) == doctest::Approx(1));
    CHECK(length(cam.up()) == doctest::Approx(1));
    CHECK(std::abs(dot(cam.right(), cam.up())) < 1e-12);
    CHECK(std::abs(dot(cam.right(), cam.forward())) < 1e-12);
    CHECK(std::abs(dot(cam.right(), kGravity)) < 1e-12);
    CHECK(dot(cross(cam.right(), cam.up()), cam.forward()) == doctest::Approx(-1));
    CHECK(dot(cam.up(), -kGravity) >= 0);
  }
}

TEST_CASE("optical axis projects to the image center") {
  Camera cam({{1, 2, 3}, 0.3, 1.1, 0}, intrinsics(640, 480, 60), kGravity);
  auto p = cam.project(cam.position() + cam.forward());
  REQUIRE(p);
  CHECK(p->pixel.x == doctest::Approx(320));
  CHECK(p->pixel.y == doctest::Approx(240));
  CHECK(p->depth == doctest::Approx(1));
}

TEST_CASE("45 degree half-angle frustum edge lands on the border column") {
  // A 90 degree vertical fov on a square image puts x/z = 1 on the right edge.
  Camera cam({{0, 0, 0}, 0, 0, 0}, intrinsics(200, 200, 90), kGravity);
  Vec3 world = cam.position() + cam.right() * 1.0 + cam.forward() * 1.0;
  auto p = cam.project(world);
  REQUIRE(p);
  CHECK(std::abs(p->pixel.x - 200) <= 1.0);
  CHECK(p->pixel.y == doctest::Approx(100));
}

TEST_CASE("pixel rows grow downward") {
  Camera cam({{0, 0, 0}, 0, 0, 0}, intrinsics(100, 100, 60), kGravity);
  auto above = cam.project(cam.forward() * 2 + cam.up() * 0.5);
  REQUIRE(above);
  CHECK(above->pixel.y < 50);
}

TEST_CASE("project and unproject round trip") {
  Rng rng(11);
  for (int i = 0; i < 10000; i++) {
    CameraPose pose{{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, 3)}, rng.uniform(-1.2, 1.2),
        rng.uniform(0, 2 * kPi), 0};
    Camera cam(pose, intrinsics(1080, 720, rng.uniform(30, 100)), kGravity);
    Vec2 px{rng.uniform(0, 1080), rng.uniform(0, 720)};
    double depth = rng.uniform(0.05, 50);
    Vec3 world = cam.unproject(px, depth);
    auto p = cam.project(world);
    REQUIRE(p);
    CHECK(distance(cam.unproject(p->pixel, p->depth), world) <= 1e-4);
    CHECK(std::abs(p->pixel.x - px.x) < 1e-6);
    CHECK(std::abs(p->pixel.y - px.y) < 1e-6);
    CHECK(dot(cam.ray_direction(px), normalize(world - cam.position())) == doctest::Approx(1));
  }
}

TEST_CASE("points behind the camera do not project") {
  Camera cam({{0, 0, 0}, 0, 0, 0}, {}, kGravity);
  CHECK_FALSE(cam.project(-cam.forward()).has_value());
  CHECK_FALSE(cam.project(cam.position()).has_value());
}

TEST_CASE("degenerate camera input is rejected") {
  CHECK_THROWS_AS(Camera({{0, 0, std::nan("")}, 0, 0, 0}, {}, kGravity), Error);
  CHECK_THROWS_AS(Camera({{0, 0, 0}, kInf, 0, 0}, {}, kGravity), Error);
  CHECK_THROWS_AS(Camera({{0, 0, 0}, 0, 0, 0}, intrinsics(0, 10, 60), kGravity), Error);
  CHECK_THROWS_AS(Camera({{0, 0, 0}, 0, 0, 0}, intrinsics(10, 10, 180), kGravity), Error);
}

TEST_CASE("straight down view keeps a valid basis") {
  Camera cam({{0, 0, 5}, -kPi / 2, 0, 0}, {}, kGravity);
  CHECK(length(cam.right()) == doctest::Approx(1));
  CHECK(dot(cam.forward(), kGravity) == doctest::Approx(1));
}
