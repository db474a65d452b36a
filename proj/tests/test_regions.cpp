#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "textworld/procedural.hpp"
#include "textworld/regions.hpp"

using namespace textworld;

namespace {

CameraIntrinsics vga() {
  CameraIntrinsics k;
  k.width = 640;
  k.height = 480;
  k.vertical_fov = radians(60);
  return k;
}

InitialProposal centered(const Camera& cam, int window) {
  const auto& k = cam.intrinsics();
  return {{k.width / 2 - window / 2, k.height / 2 - window / 2, window, window}, 1.0};
}

void check_frame(const RefinedProposal& p, const Vec3& gravity) {
  CHECK(length(p.normal) == doctest::Approx(1));
  CHECK(length(p.right_axis) == doctest::Approx(1));
  CHECK(length(p.up_axis) == doctest::Approx(1));
  CHECK(std::abs(dot(p.normal, p.right_axis)) < 1e-9);
  CHECK(std::abs(dot(p.normal, p.up_axis)) < 1e-9);
  CHECK(std::abs(dot(p.right_axis, p.up_axis)) < 1e-9);
  CHECK(std::abs(dot(p.right_axis, normalize(gravity))) < 1e-9);
}

void check_corners(const RefinedProposal& p, const Scene& s, const RegionConfig& cfg) {
  for (const auto& c : p.corners())
    CHECK(oracle::brute_distance(s, c, p.mesh) <= p.distance_threshold(cfg) + 1e-12);
}

}  // namespace

TEST_CASE("constant normals give the full proposal count") {
  NormalMap nm(640, 480, {0.f, 0.f, -1.f});
  RegionConfig cfg;
  for (std::uint64_t seed = 0; seed < 20; seed++) {
    Rng rng(seed);
    auto props = propose_initial(nm, cfg, rng);
    REQUIRE(props.size() == std::size_t(cfg.max_proposals));
    for (std::size_t i = 0; i < props.size(); i++) {
      CHECK(props[i].min_cosine == 1.0);
      CHECK(props[i].rect.x % cfg.stride == 0);
      CHECK(props[i].rect.y % cfg.stride == 0);
      for (std::size_t j = i + 1; j < props.size(); j++) CHECK_FALSE(props[i].rect.overlaps(props[j].rect));
    }
  }
}

TEST_CASE("no window straddles a perpendicular seam") {
  NormalMap nm(320, 240);
  for (int y = 0; y < 240; y++)
    for (int x = 0; x < 320; x++) nm.at(x, y) = x < 160 ? std::array<float, 3>{0, 0, -1} : std::array<float, 3>{-1, 0, 0};
  RegionConfig cfg;
  cfg.max_proposals = 100;
  Rng rng(1);
  auto props = propose_initial(nm, cfg, rng);
  CHECK_FALSE(props.empty());
  for (const auto& p : props) CHECK_FALSE((p.rect.x < 160 && p.rect.x + p.rect.width > 160));
}

TEST_CASE("fast smoothness test equals the all-pairs check") {
  Rng rng(99);
  int accepted = 0, total = 0;
  for (int m = 0; m < 40; m++) {
    NormalMap nm = oracle::synthetic_normal_map(96, 96, rng);
    for (int i = 0; i < 10; i++) {
      int w = 8 + int(rng.index(57));
      PixelRect r{int(rng.index(96 - w + 1)), int(rng.index(96 - w + 1)), w, w};
      double t = rng.uniform() < 0.5 ? 0.95 : rng.uniform(0.9, 0.9999);
      bool fast = window_is_smooth(nm, r, t);
      REQUIRE(fast == oracle::brute_smooth(nm, r, t));
      accepted += fast;
      total++;
    }
  }
  CHECK(accepted > 0);
  CHECK(accepted < total);
}

TEST_CASE("minimum cosine matches brute force") {
  Rng rng(5);
  for (int m = 0; m < 20; m++) {
    NormalMap nm = oracle::synthetic_normal_map(24, 24, rng);
    PixelRect r{0, 0, 24, 24};
    double best = kInf;
    for (int a = 0; a < 576; a++)
      for (int b = a + 1; b < 576; b++) {
        auto p = nm.data[a], q = nm.data[b];
        best = std::min(best, double(p[0]) * q[0] + double(p[1]) * q[1] + double(p[2]) * q[2]);
      }
    CHECK(window_min_cosine(nm, r) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("oblique floor gives a gravity-aligned square") {
  Scene s(make_flat_floor());
  RegionConfig cfg;
  Rng rng(3);
  for (int i = 0; i < 20; i++) {
    Camera cam({{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(1, 3)}, -rng.uniform(0.3, 1.2),
                   rng.uniform(0, 2 * kPi), 0},
        vga(), s.gravity());
    auto p = rectify_in_3d(centered(cam, 64), s, cam, cfg);
    REQUIRE(p);
    check_frame(*p, s.gravity());
    CHECK(p->normal.z == doctest::Approx(1));
    CHECK(p->width() == doctest::Approx(p->height()));
    check_corners(*p, s, cfg);
  }
}

TEST_CASE("fronto-parallel wall side matches the pinhole extent") {
  Scene s(make_single_wall());
  Camera cam({{0, 0, 1.7}, 0, kPi / 2, 0}, vga(), s.gravity());
  RegionConfig cfg;
  auto p = rectify_in_3d(centered(cam, 64), s, cam, cfg);
  REQUIRE(p);
  double expect = 64.0 * 8.0 / cam.focal();
  CHECK(std::abs(p->initial_side - expect) <= 0.01 * expect);
  CHECK(p->right_axis.x == doctest::Approx(1));
  CHECK(p->up_axis.z == doctest::Approx(1));
  check_corners(*p, s, cfg);
}

TEST_CASE("window over the sky is rejected") {
  Scene s(make_flat_floor());
  Camera cam({{0, 0, 2}, radians(40), 0, 0}, vga(), s.gravity());
  CHECK_FALSE(rectify_in_3d(centered(cam, 64), s, cam, {}).has_value());
}

TEST_CASE("open floor expands to the cap on both axes") {
  Scene s(make_flat_floor());
  RegionConfig cfg;
  Camera cam({{0, 0, 2}, radians(-50), 0.4, 0}, vga(), s.gravity());
  auto p = rectify_in_3d(centered(cam, 64), s, cam, cfg);
  REQUIRE(p);
  auto e = expand(*p, s, cam, cfg);
  double cap = cfg.max_expansion_ratio * p->initial_side;
  CHECK(e.width() == doctest::Approx(cap).epsilon(1e-12));
  CHECK(e.height() == doctest::Approx(cap).epsilon(1e-12));
  check_frame(e, s.gravity());
  check_corners(e, s, cfg);
}

TEST_CASE("expansion stops short of the pillar") {
  Scene s(make_pillar_wall());
  RegionConfig cfg;
  // Close enough to the pillar that the width cap cannot stop growth first.
  Camera cam({{0.6, 0, 2}, 0, kPi / 2, 0}, vga(), s.gravity());
  auto p = rectify_in_3d(centered(cam, 64), s, cam, cfg);
  REQUIRE(p);
  REQUIRE(p->mesh == 1);
  auto e = expand(*p, s, cam, cfg);
  double step = cfg.expansion_step_fraction * p->initial_side;
  double right_edge = e.anchor.x + e.right;
  CHECK(right_edge <= kPillarMinX + 1e-9);
  CHECK(right_edge >= kPillarMinX - step - 1e-9);
  Vec3 lift = e.normal * (cfg.probe_lift_fraction * e.initial_side);
  auto c = e.corners();
  for (int i = 0; i < 4; i++)
    CHECK_FALSE(oracle::linear_segment_blocked(s, c[i] + lift, c[(i + 1) % 4] + lift));
  CHECK_FALSE(oracle::linear_segment_blocked(s, e.anchor + lift, c[1] + lift));
  check_corners(e, s, cfg);
}

TEST_CASE("a square crossing the pillar is rejected") {
  Scene s(make_pillar_wall());
  RegionConfig cfg;
  // Center on the wall left of the pillar; the square reaches past its front face.
  Camera cam({{1.5, 0, 2}, 0, kPi / 2, 0}, vga(), s.gravity());
  CHECK_FALSE(rectify_in_3d(centered(cam, 160), s, cam, cfg).has_value());
  Camera clear({{-3, 0, 2}, 0, kPi / 2, 0}, vga(), s.gravity());
  CHECK(rectify_in_3d(centered(clear, 160), s, clear, cfg).has_value());
}

TEST_CASE("curved surface limits growth across the curvature") {
  Scene s(make_cylinder_scene());
  RegionConfig cfg;
  // Aim at the middle of a facet so the tangent plane is the facet plane.
  double mid = kCylinderRadius * std::sin(kPi / kCylinderSegments);
  Camera cam({{mid, -3, 2}, 0, kPi / 2, 0}, vga(), s.gravity());
  auto p = rectify_in_3d(centered(cam, 16), s, cam, cfg);
  REQUIRE(p);
  REQUIRE(p->mesh == 1);
  auto e = expand(*p, s, cam, cfg);
  double cap = cfg.max_expansion_ratio * p->initial_side;
  CHECK(e.width() < cap);
  CHECK(e.height() == doctest::Approx(cap).epsilon(1e-12));
  check_corners(e, s, cfg);
  // Analytic check against the ideal cylinder, allowing the facet sagitta.
  double facet = kCylinderRadius * (1 - std::cos(kPi / kCylinderSegments));
  for (const auto& corner : e.corners()) {
    double r = std::hypot(corner.x, corner.y);
    CHECK(std::abs(r - kCylinderRadius) <= e.distance_threshold(cfg) + facet);
  }
}

TEST_CASE("pruning a single proposal keeps it") {
  Scene s(make_single_wall());
  Camera cam({{0, 0, 1.7}, 0, kPi / 2, 0}, vga(), s.gravity());
  auto p = fixture::plane_proposal(1, {0, 8, 2}, {0, -1, 0}, {1, 0, 0}, 2, 1);
  Rng rng(1);
  std::vector<RefinedProposal> one{p};
  auto kept = prune_occlusions(one, cam, rng);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].anchor.x == p.anchor.x);
  std::vector<RefinedProposal> two{p, p};
  CHECK(prune_occlusions(two, cam, rng).size() == 1);
}

TEST_CASE("pruned proposals are pairwise disjoint and every removal is justified") {
  Scene s(make_single_wall());
  Camera cam({{0, 0, 1.7}, 0, kPi / 2, 0}, vga(), s.gravity());
  Rng rng(17);
  for (int trial = 0; trial < 50; trial++) {
    std::vector<RefinedProposal> props;
    for (int i = 0; i < 20; i++) {
      Vec3 a{rng.uniform(-4, 4), 8 - rng.uniform(0, 3), rng.uniform(0, 4)};
      double angle = rng.uniform(-0.5, 0.5);
      Vec3 n = normalize(Vec3{std::sin(angle), -std::cos(angle), 0});
      props.push_back(fixture::plane_proposal(1, a, n, normalize(cross(n, s.gravity())),
          rng.uniform(0.2, 2), rng.uniform(0.2, 1.5)));
    }
    auto kept = prune_occlusions(props, cam, rng);
    std::vector<Polygon> kp;
    for (const auto& k : kept) kp.push_back(screen_polygon(k, cam));
    for (std::size_t i = 0; i < kp.size(); i++) {
      CHECK(area(kp[i]) > 0);
      for (std::size_t j = i + 1; j < kp.size(); j++) {
        CHECK(oracle::intersection_area_by_vertices(kp[i], kp[j]) <= 1e-6);
        CHECK_FALSE(oracle::sat_overlap(kp[i], kp[j], 1e-6));
      }
    }
    // Kept proposals preserve the input order.
    std::size_t cursor = 0;
    for (const auto& k : kept) {
      while (cursor < props.size() && props[cursor].anchor.x != k.anchor.x) cursor++;
      REQUIRE(cursor < props.size());
      cursor++;
    }
    // Each dropped proposal overlapped some other input.
    for (const auto& p : props) {
      bool was_kept = false;
      for (const auto& k : kept) was_kept |= k.anchor.x == p.anchor.x;
      if (was_kept) continue;
      auto pp = screen_polygon(p, cam);
      if (pp.size() < 3 || area(pp) <= 1e-6) continue;
      bool overlapped = false;
      for (const auto& q : props)
        if (q.anchor.x != p.anchor.x)
          overlapped |= oracle::intersection_area_by_vertices(pp, screen_polygon(q, cam)) > 1e-6;
      CHECK(overlapped);
    }
  }
}

TEST_CASE("region config validation") {
  RegionConfig cfg;
  cfg.cosine_threshold = 1.5;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.max_expansion_ratio = 0.5;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.window = 0;
  CHECK_THROWS(cfg.validate());
}
