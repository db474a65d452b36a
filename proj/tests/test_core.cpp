#include <map>
#include <set>

#include "doctest.h"
#include "textworld/geometry2d.hpp"
#include "textworld/math.hpp"
#include "textworld/rng.hpp"
#include "textworld/textgen.hpp"
#include "oracles.hpp"

using namespace textworld;

TEST_CASE("rng streams are reproducible and keyed") {
  Rng a = Rng::derive(7, {1, 2}), b = Rng::derive(7, {1, 2}), c = Rng::derive(7, {2, 1});
  bool differs = false;
  for (int i = 0; i < 16; i++) {
    auto x = a.next();
    CHECK(x == b.next());
    differs |= x != c.next();
  }
  CHECK(differs);
}

TEST_CASE("uniform draws stay in range") {
  Rng r(3);
  for (int i = 0; i < 100000; i++) {
    double u = r.uniform();
    REQUIRE(u >= 0);
    REQUIRE(u < 1);
    double v = r.uniform(-2, 5);
    REQUIRE(v >= -2);
    REQUIRE(v < 5);
  }
}

TEST_CASE("index draws pass a chi-square test over ten bins") {
  // alpha = 0.01 with 9 degrees of freedom.
  const double critical = 21.666;
  Rng r(11);
  const int n = 100000;
  std::vector<int> bins(10, 0);
  for (int i = 0; i < n; i++) bins[r.index(10)]++;
  double chi2 = 0;
  for (int b : bins) chi2 += (b - n / 10.0) * (b - n / 10.0) / (n / 10.0);
  CHECK(chi2 < critical);
}

TEST_CASE("shuffle is a permutation") {
  Rng r(5);
  std::vector<int> v(50);
  for (int i = 0; i < 50; i++) v[i] = i;
  r.shuffle(std::span(v));
  std::set<int> s(v.begin(), v.end());
  CHECK(s.size() == 50);
  CHECK(*s.begin() == 0);
  CHECK(*s.rbegin() == 49);
}

TEST_CASE("fnv1a matches reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("utf8 round trip and rejection") {
  std::string s = "abc Жёлтый Ελληνικά €";
  CHECK(utf8_encode(utf8_decode(s)) == s);
  CHECK(utf8_decode("\xd0\x96") == std::u32string(1, 0x416));
  CHECK_THROWS(utf8_decode("\xff"));
  CHECK_THROWS(utf8_decode("\xd0"));
  CHECK_THROWS(utf8_decode("\xc0\x80"));
}

TEST_CASE("vector basics") {
  Vec3 a{1, 0, 0}, b{0, 1, 0};
  CHECK(cross(a, b) == Vec3{0, 0, 1});
  CHECK(length(normalize(Vec3{3, 4, 0})) == doctest::Approx(1.0));
  Vec3 r = rotate(a, {0, 0, 1}, kPi / 2);
  CHECK(r.x == doctest::Approx(0).epsilon(1e-12));
  CHECK(r.y == doctest::Approx(1));
  Vec3 o = any_orthogonal(Vec3{0.3, -0.2, 0.9});
  CHECK(std::abs(dot(o, Vec3{0.3, -0.2, 0.9})) < 1e-12);
}

TEST_CASE("aabb containment with margin") {
  Aabb box;
  box.expand(Vec3{0, 0, 0});
  box.expand(Vec3{2, 2, 2});
  CHECK(box.contains({1, 1, 1}, 0.5));
  CHECK_FALSE(box.contains({0.2, 1, 1}, 0.5));
  CHECK(box.diagonal() == doctest::Approx(std::sqrt(12.0)));
}

TEST_CASE("polygon clipping agrees with the vertex-set oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 2000; trial++) {
    auto random_convex = [&](Vec2 c, double r) {
      int n = 3 + static_cast<int>(rng.index(4));
      std::vector<double> angles;
      for (int i = 0; i < n; i++) angles.push_back(rng.uniform(0, 2 * kPi));
      std::sort(angles.begin(), angles.end());
      Polygon p;
      for (double a : angles) p.push_back(c + Vec2{std::cos(a), std::sin(a)} * r);
      if (rng.uniform() < 0.5) std::reverse(p.begin(), p.end());
      return p;
    };
    Polygon a = random_convex({rng.uniform(0, 10), rng.uniform(0, 10)}, rng.uniform(1, 4));
    Polygon b = random_convex({rng.uniform(0, 10), rng.uniform(0, 10)}, rng.uniform(1, 4));
    double fast = intersection_area(a, b);
    double slow = oracle::intersection_area_by_vertices(a, b);
    REQUIRE(fast == doctest::Approx(slow).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("polygon area and convexity") {
  Polygon sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(area(sq) == doctest::Approx(4));
  CHECK(signed_area(sq) > 0);
  CHECK(is_convex(sq));
  Polygon dart{{0, 0}, {2, 0}, {1, 0.5}, {1, 2}};
  CHECK_FALSE(is_convex(dart));
  CHECK(area(clip_to_rect(sq, 1, 1, 5, 5)) == doctest::Approx(1));
  CHECK(contains_convex(sq, {1, 1}));
  CHECK_FALSE(contains_convex(sq, {3, 1}));
}
