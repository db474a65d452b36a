#pragma once
// Slow reference implementations used to check the fast paths.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "textworld/geometry2d.hpp"
#include "textworld/regions.hpp"
#include "textworld/rng.hpp"
#include "textworld/scene.hpp"

namespace oracle {

using namespace textworld;

struct LinearHit {
  double t;
  std::uint32_t mesh, triangle;
};

// Every triangle, no acceleration; same tie rule as the scene query.
inline std::optional<LinearHit> linear_cast(const Scene& scene, const Vec3& o, const Vec3& d,
    double tmax = kInf) {
  std::optional<LinearHit> best;
  const auto& meshes = scene.meshes();
  for (std::uint32_t m = 0; m < meshes.size(); m++) {
    const auto& mesh = meshes[m];
    for (std::uint32_t i = 0; i < mesh.triangles.size(); i++) {
      const auto& t = mesh.triangles[i];
      Vec3 v0 = mesh.positions[t[0]];
      double u, v;
      auto hit = intersect_triangle(o, d, v0, mesh.positions[t[1]] - v0, mesh.positions[t[2]] - v0,
          kRayEpsilon, tmax, u, v);
      if (hit && (!best || *hit < best->t)) best = LinearHit{*hit, m, i};
    }
  }
  return best;
}

inline bool linear_segment_blocked(const Scene& scene, const Vec3& a, const Vec3& b) {
  double len = distance(a, b);
  if (len <= kRayEpsilon) return false;
  auto hit = linear_cast(scene, a, (b - a) / len, len);
  return hit.has_value();
}

// Generalized winding number of a closed mesh around p (solid angle / 4pi).
inline double winding_number(const TriangleMesh& mesh, const Vec3& p) {
  double total = 0;
  for (const auto& t : mesh.triangles) {
    Vec3 a = mesh.positions[t[0]] - p, b = mesh.positions[t[1]] - p, c = mesh.positions[t[2]] - p;
    double la = length(a), lb = length(b), lc = length(c);
    double num = dot(a, cross(b, c));
    double den = la * lb * lc + dot(a, b) * lc + dot(b, c) * la + dot(c, a) * lb;
    total += 2 * std::atan2(num, den);
  }
  return total / (4 * kPi);
}

inline bool inside_any_closed(const Scene& scene, const Vec3& p) {
  for (std::uint32_t m = 0; m < scene.meshes().size(); m++)
    if (scene.is_closed(m) && std::abs(winding_number(scene.meshes()[m], p)) > 0.5) return true;
  return false;
}

inline double brute_distance(const Scene& scene, const Vec3& p, std::uint32_t mesh_id) {
  const auto& mesh = scene.meshes()[mesh_id];
  double best = kInf;
  for (const auto& t : mesh.triangles)
    best = std::min(best, distance(p, closest_point_on_triangle(p, mesh.positions[t[0]],
                                      mesh.positions[t[1]], mesh.positions[t[2]])));
  return best;
}

// Exact all-pairs smoothness check over every pixel pair.
inline bool brute_smooth(const NormalMap& nm, const PixelRect& r, double t) {
  std::vector<std::array<float, 3>> px;
  for (int y = r.y; y < r.y + r.height; y++)
    for (int x = r.x; x < r.x + r.width; x++) px.push_back(nm.at(x, y));
  for (std::size_t i = 0; i < px.size(); i++) {
    const auto& a = px[i];
    if (a[0] == 0 && a[1] == 0 && a[2] == 0) return false;
    for (std::size_t j = i + 1; j < px.size(); j++) {
      const auto& b = px[j];
      double c = double(a[0]) * b[0] + double(a[1]) * b[1] + double(a[2]) * b[2];
      if (c < t) return false;
    }
  }
  return true;
}

// Separating-axis test for convex polygons: true when interiors overlap with
// a penetration depth above eps along every axis.
inline bool sat_overlap(const Polygon& a, const Polygon& b, double eps = 1e-9) {
  auto axes_of = [](const Polygon& p, std::vector<Vec2>& axes) {
    for (std::size_t i = 0; i < p.size(); i++) {
      Vec2 e = p[(i + 1) % p.size()] - p[i];
      if (length(e) > 0) axes.push_back(Vec2{-e.y, e.x} * (1.0 / length(e)));
    }
  };
  std::vector<Vec2> axes;
  axes_of(a, axes);
  axes_of(b, axes);
  for (const auto& ax : axes) {
    double amin = kInf, amax = -kInf, bmin = kInf, bmax = -kInf;
    for (const auto& p : a) {
      amin = std::min(amin, dot(p, ax));
      amax = std::max(amax, dot(p, ax));
    }
    for (const auto& p : b) {
      bmin = std::min(bmin, dot(p, ax));
      bmax = std::max(bmax, dot(p, ax));
    }
    if (std::min(amax, bmax) - std::max(amin, bmin) <= eps) return false;
  }
  return true;
}

// Convex intersection area from the vertex set: corners inside both plus all
// edge crossings, ordered by angle around their centroid.
inline double intersection_area_by_vertices(const Polygon& a, const Polygon& b) {
  if (a.size() < 3 || b.size() < 3) return 0;
  auto inside = [](const Polygon& poly, Vec2 p) {
    double s = signed_area(poly) >= 0 ? 1 : -1;
    for (std::size_t i = 0; i < poly.size(); i++)
      if (s * cross(poly[(i + 1) % poly.size()] - poly[i], p - poly[i]) < -1e-12) return false;
    return true;
  };
  std::vector<Vec2> pts;
  for (const auto& p : a)
    if (inside(b, p)) pts.push_back(p);
  for (const auto& p : b)
    if (inside(a, p)) pts.push_back(p);
  for (std::size_t i = 0; i < a.size(); i++)
    for (std::size_t j = 0; j < b.size(); j++) {
      Vec2 p = a[i], r = a[(i + 1) % a.size()] - p;
      Vec2 q = b[j], s = b[(j + 1) % b.size()] - q;
      double den = cross(r, s);
      if (den == 0) continue;
      double t = cross(q - p, s) / den, u = cross(q - p, r) / den;
      if (t >= 0 && t <= 1 && u >= 0 && u <= 1) pts.push_back(p + r * t);
    }
  if (pts.size() < 3) return 0;
  Vec2 c{0, 0};
  for (const auto& p : pts) c = c + p;
  c = c * (1.0 / pts.size());
  std::sort(pts.begin(), pts.end(), [&](Vec2 p, Vec2 q) {
    return std::atan2(p.y - c.y, p.x - c.x) < std::atan2(q.y - c.y, q.x - c.x);
  });
  return area(pts);
}

// Synthetic normal maps: flat patches, smooth bumps near the threshold, and
// random holes.
inline NormalMap synthetic_normal_map(int w, int h, Rng& rng) {
  NormalMap nm(w, h);
  int kind = static_cast<int>(rng.index(4));
  Vec3 base = normalize(Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.2, 1)});
  double curvature = rng.uniform(0.0, 0.012);
  Vec3 t1 = normalize(any_orthogonal(base)), t2 = cross(base, t1);
  double cx = rng.uniform(0, w), cy = rng.uniform(0, h);
  for (int y = 0; y < h; y++)
    for (int x = 0; x < w; x++) {
      Vec3 n = base;
      if (kind >= 1) n = normalize(base + t1 * ((x - cx) * curvature) + t2 * ((y - cy) * curvature));
      if (kind == 2 && x > w / 2) n = normalize(base + t1 * 0.4);
      if (kind == 3 && rng.uniform() < 0.002) n = Vec3{};
      if (kind == 1 && rng.uniform() < 0.01) n = normalize(n + t1 * rng.uniform(-0.3, 0.3));
      nm.at(x, y) = {float(n.x), float(n.y), float(n.z)};
    }
  return nm;
}

}  // namespace oracle
