#include "textworld/scene.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <tuple>

#include "textworld/error.hpp"
#include "textworld/log.hpp"
#include "textworld/rng.hpp"

namespace textworld {

namespace {

Aabb triangle_box(const Vec3& a, const Vec3& b, const Vec3& c) {
  Aabb box;
  box.expand(a);
  box.expand(b);
  box.expand(c);
  // Pad flat boxes so slab tests never reject a ray the triangle test accepts.
  for (int i = 0; i < 3; i++) {
    double pad = 1e-9 * std::max({1.0, std::abs(box.lo[i]), std::abs(box.hi[i])});
    box.lo[i] -= pad;
    box.hi[i] += pad;
  }
  return box;
}

Vec3 face_normal(const TriangleMesh& m, const std::array<std::uint32_t, 3>& t) {
  return cross(m.positions[t[1]] - m.positions[t[0]], m.positions[t[2]] - m.positions[t[0]]);
}

using PositionKey = std::tuple<double, double, double>;

// A mesh is closed when, after welding coincident positions, every edge is
// shared by exactly two triangles. Edges with more trigger a warning.
bool check_closed(const TriangleMesh& mesh) {
  std::map<PositionKey, std::uint32_t> weld;
  std::vector<std::uint32_t> remap(mesh.positions.size());
  for (std::size_t i = 0; i < mesh.positions.size(); i++) {
    const auto& p = mesh.positions[i];
    auto [it, inserted] =
        weld.emplace(PositionKey{p.x, p.y, p.z}, static_cast<std::uint32_t>(weld.size()));
    remap[i] = it->second;
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; k++) {
      auto a = remap[t[k]], b = remap[t[(k + 1) % 3]];
      edges[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  bool closed = !edges.empty();
  bool non_manifold = false;
  for (const auto& [edge, count] : edges) {
    if (count != 2) closed = false;
    if (count > 2) non_manifold = true;
  }
  if (non_manifold) log_warning("mesh '", mesh.name, "' has non-manifold edges");
  return closed;
}

}  // namespace

Scene::Scene(SceneData data) : data_(std::move(data)) {
  if (data_.materials.empty()) data_.materials.push_back(Material{});
  if (!(length(data_.gravity) > 0) || !is_finite(data_.gravity))
    throw Error("scene '" + data_.name + "': gravity must be a nonzero finite vector");
  data_.gravity = normalize(data_.gravity);

  for (auto& mesh : data_.meshes) {
    if (mesh.material >= data_.materials.size())
      throw Error("mesh '" + mesh.name + "' references unknown material " +
                  std::to_string(mesh.material));
    if (mesh.normals.size() != mesh.positions.size()) mesh.normals.assign(mesh.positions.size(), {});
    std::vector<std::array<std::uint32_t, 3>> kept;
    kept.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
      for (auto idx : t)
        if (idx >= mesh.positions.size())
          throw Error("mesh '" + mesh.name + "': triangle index out of range");
      if (0.5 * length(face_normal(mesh, t)) <= kDegenerateArea) {
        dropped_++;
        continue;
      }
      kept.push_back(t);
    }
    mesh.triangles = std::move(kept);
    // Missing or zero normals fall back to the face normal of a using triangle.
    for (const auto& t : mesh.triangles) {
      Vec3 fn = normalize(face_normal(mesh, t));
      for (auto idx : t)
        if (!(length(mesh.normals[idx]) > 0)) mesh.normals[idx] = fn;
    }
    for (auto& n : mesh.normals)
      n = length(n) > 0 ? normalize(n) : Vec3{0, 0, 1};
  }
  if (dropped_ > 0) log_warning("scene '", data_.name, "': dropped ", dropped_, " degenerate triangles");

  Aabb vertex_bounds;
  for (const auto& mesh : data_.meshes)
    for (const auto& t : mesh.triangles)
      for (auto idx : t) vertex_bounds.expand(mesh.positions[idx]);
  if (data_.bounds) {
    bounds_ = *data_.bounds;
    bool any = vertex_bounds.lo.x <= vertex_bounds.hi.x;
    if (any && (!bounds_.contains(vertex_bounds.lo) || !bounds_.contains(vertex_bounds.hi)))
      throw Error("scene '" + data_.name + "': declared bounds do not contain all vertices");
  } else {
    bounds_ = vertex_bounds;
  }

  std::vector<Aabb> boxes;
  std::vector<Prim> unordered;
  closed_.resize(data_.meshes.size());
  mesh_bvhs_.resize(data_.meshes.size());
  for (std::uint32_t m = 0; m < data_.meshes.size(); m++) {
    const auto& mesh = data_.meshes[m];
    closed_[m] = check_closed(mesh);
    std::vector<Aabb> mesh_boxes;
    mesh_boxes.reserve(mesh.triangles.size());
    for (std::uint32_t i = 0; i < mesh.triangles.size(); i++) {
      const auto& t = mesh.triangles[i];
      const Vec3 &a = mesh.positions[t[0]], &b = mesh.positions[t[1]], &c = mesh.positions[t[2]];
      boxes.push_back(triangle_box(a, b, c));
      mesh_boxes.push_back(boxes.back());
      unordered.push_back({m, i, a, b - a, c - a});
    }
    mesh_bvhs_[m] = Bvh::build(mesh_boxes);
  }
  bvh_ = Bvh::build(boxes);
  prims_.reserve(unordered.size());
  for (auto id : bvh_.order) prims_.push_back(unordered[id]);
  // Leaves now index prims_ directly.
  for (std::uint32_t i = 0; i < bvh_.order.size(); i++) bvh_.order[i] = i;
}

const Material& Scene::material_of(std::uint32_t mesh) const {
  return data_.materials[data_.meshes[mesh].material];
}

std::size_t Scene::vertex_count() const {
  std::size_t n = 0;
  for (const auto& m : data_.meshes) n += m.positions.size();
  return n;
}

std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& direction,
    const Vec3& v0, const Vec3& e1, const Vec3& e2, double tmin, double tmax, double& u,
    double& v) {
  Vec3 p = cross(direction, e2);
  double det = dot(e1, p);
  if (det == 0) return std::nullopt;
  double inv = 1.0 / det;
  Vec3 s = origin - v0;
  u = dot(s, p) * inv;
  if (u < 0 || u > 1) return std::nullopt;
  Vec3 q = cross(s, e1);
  v = dot(direction, q) * inv;
  if (v < 0 || u + v > 1) return std::nullopt;
  double t = dot(e2, q) * inv;
  if (!(t > tmin) || t > tmax) return std::nullopt;
  return t;
}

namespace {

Vec3 reciprocal(const Vec3& d) { return {1.0 / d.x, 1.0 / d.y, 1.0 / d.z}; }

// Visits leaves whose boxes the ray enters, nearest first. `visit` returns the
// current tmax (shrinking it prunes farther nodes).
template <typename Visit>
void traverse(const Bvh& bvh, const Vec3& origin, const Vec3& direction, double tmin,
    double tmax, Visit&& visit) {
  if (bvh.empty()) return;
  Vec3 inv = reciprocal(direction);
  std::uint32_t stack[128];
  int top = 0;
  if (intersect_box(bvh.nodes[0].bounds, origin, inv, tmin, tmax) == kInf) return;
  stack[top++] = 0;
  while (top > 0) {
    const auto& node = bvh.nodes[stack[--top]];
    if (node.is_leaf()) {
      tmax = visit(node.first, node.count, tmax);
      continue;
    }
    std::uint32_t l = node.first, r = node.first + 1;
    double tl = intersect_box(bvh.nodes[l].bounds, origin, inv, tmin, tmax);
    double tr = intersect_box(bvh.nodes[r].bounds, origin, inv, tmin, tmax);
    if (tl > tr) {
      std::swap(tl, tr);
      std::swap(l, r);
    }
    if (tr != kInf) stack[top++] = r;
    if (tl != kInf) stack[top++] = l;
  }
}

Hit make_hit(const Scene& scene, const Scene::Prim& prim, double t, double u, double v) {
  const auto& mesh = scene.meshes()[prim.mesh];
  const auto& tri = mesh.triangles[prim.triangle];
  Hit hit;
  hit.distance = t;
  hit.mesh = prim.mesh;
  hit.triangle = prim.triangle;
  hit.barycentric = {1 - u - v, u, v};
  hit.normal = normalize(mesh.normals[tri[0]] * (1 - u - v) + mesh.normals[tri[1]] * u +
                         mesh.normals[tri[2]] * v);
  hit.geometric_normal = normalize(cross(prim.e1, prim.e2));
  return hit;
}

}  // namespace

std::optional<Hit> cast_ray(const Scene& scene, const Ray& ray) {
  const auto prims = scene.prims();
  double best_t = kInf, best_u = 0, best_v = 0;
  const Scene::Prim* best = nullptr;
  traverse(scene.bvh(), ray.origin, ray.direction, kRayEpsilon, ray.max_length,
      [&](std::uint32_t first, std::uint32_t count, double tmax) {
        for (auto i = first; i < first + count; i++) {
          const auto& p = prims[i];
          double u, v;
          auto t = intersect_triangle(ray.origin, ray.direction, p.v0, p.e1, p.e2, kRayEpsilon,
              tmax, u, v);
          if (!t) continue;
          bool better = *t < best_t ||
                        (*t == best_t && std::tie(p.mesh, p.triangle) <
                                             std::tie(best->mesh, best->triangle));
          if (better) {
            best_t = *t;
            best_u = u;
            best_v = v;
            best = &p;
            tmax = *t;
          }
        }
        return tmax;
      });
  if (!best) return std::nullopt;
  return make_hit(scene, *best, best_t, best_u, best_v);
}

bool segment_blocked(const Scene& scene, const Vec3& a, const Vec3& b) {
  Vec3 d = b - a;
  double len = length(d);
  if (!(len > kRayEpsilon)) return false;
  Vec3 dir = d / len;
  const auto prims = scene.prims();
  bool blocked = false;
  traverse(scene.bvh(), a, dir, kRayEpsilon, len,
      [&](std::uint32_t first, std::uint32_t count, double tmax) {
        for (auto i = first; i < first + count && !blocked; i++) {
          double u, v;
          const auto& p = prims[i];
          if (intersect_triangle(a, dir, p.v0, p.e1, p.e2, kRayEpsilon, tmax, u, v))
            blocked = true;
        }
        return blocked ? -kInf : tmax;
      });
  return blocked;
}

int count_crossings(const Scene& scene, std::uint32_t mesh, const Vec3& origin,
    const Vec3& direction) {
  const auto& bvh = scene.mesh_bvh(mesh);
  const auto& m = scene.meshes()[mesh];
  int crossings = 0;
  traverse(bvh, origin, direction, 0.0, kInf,
      [&](std::uint32_t first, std::uint32_t count, double tmax) {
        for (auto i = first; i < first + count; i++) {
          const auto& t = m.triangles[bvh.order[i]];
          const Vec3& v0 = m.positions[t[0]];
          double u, v;
          if (intersect_triangle(origin, direction, v0, m.positions[t[1]] - v0,
                  m.positions[t[2]] - v0, 0.0, kInf, u, v))
            crossings++;
        }
        return tmax;
      });
  return crossings;
}

bool is_inside_mesh(const Scene& scene, const Vec3& point) {
  static const Vec3 kDirections[3] = {
      normalize(Vec3{0.5377, 0.8414, 0.0519}),
      normalize(Vec3{-0.6232, 0.2113, 0.7529}),
      normalize(Vec3{0.1337, -0.7071, -0.6944}),
  };
  for (std::uint32_t m = 0; m < scene.meshes().size(); m++) {
    if (!scene.is_closed(m)) continue;
    if (scene.mesh_bvh(m).empty() ||
        scene.mesh_bvh(m).nodes[0].bounds.distance_squared(point) > 0)
      continue;
    int votes = 0;
    for (const auto& d : kDirections)
      if (count_crossings(scene, m, point, d) % 2 == 1) votes++;
    if (votes >= 2) return true;
  }
  return false;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Voronoi-region walk (Ericson, Real-Time Collision Detection 5.1.5).
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return a;
  Vec3 bp = p - b;
  double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return b;
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
  Vec3 cp = p - c;
  double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return c;
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double distance_to_surface(const Scene& scene, const Vec3& point, std::uint32_t mesh) {
  if (mesh >= scene.meshes().size())
    throw Error("distance_to_surface: invalid mesh id " + std::to_string(mesh));
  const auto& bvh = scene.mesh_bvh(mesh);
  const auto& m = scene.meshes()[mesh];
  if (bvh.empty()) return kInf;
  double best = kInf;
  std::uint32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const auto& node = bvh.nodes[stack[--top]];
    if (node.bounds.distance_squared(point) >= best) continue;
    if (node.is_leaf()) {
      for (auto i = node.first; i < node.first + node.count; i++) {
        const auto& t = m.triangles[bvh.order[i]];
        Vec3 q = closest_point_on_triangle(point, m.positions[t[0]], m.positions[t[1]],
            m.positions[t[2]]);
        best = std::min(best, length_squared(point - q));
      }
      continue;
    }
    std::uint32_t l = node.first, r = node.first + 1;
    double dl = bvh.nodes[l].bounds.distance_squared(point);
    double dr = bvh.nodes[r].bounds.distance_squared(point);
    if (dl > dr) std::swap(l, r);
    stack[top++] = r;
    stack[top++] = l;
  }
  return std::sqrt(best);
}

double boundary_margin(const Scene& scene, double fraction) {
  return fraction * scene.bounds().diagonal();
}

std::uint64_t geometry_hash(const Scene& scene) {
  std::uint64_t h = fnv1a("geometry");
  auto feed = [&](const void* data, std::size_t n) {
    h = fnv1a(std::string_view(static_cast<const char*>(data), n), h);
  };
  for (const auto& m : scene.meshes()) {
    feed(m.positions.data(), m.positions.size() * sizeof(Vec3));
    feed(m.normals.data(), m.normals.size() * sizeof(Vec3));
    feed(m.triangles.data(), m.triangles.size() * sizeof(m.triangles[0]));
    feed(&m.material, sizeof(m.material));
  }
  return h;
}

}  // namespace textworld
