#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "textworld/math.hpp"

namespace textworld {

// Bounding volume hierarchy over abstract primitives given by their boxes.
// Built with binned SAH; leaves hold at most `max_leaf` primitives.
struct Bvh {
  struct Node {
    Aabb bounds;
    std::uint32_t first = 0;  // leaf: first index into `order`; inner: left child
    std::uint32_t count = 0;  // leaf primitive count, 0 for inner nodes
    bool is_leaf() const { return count > 0; }
  };

  std::vector<Node> nodes;
  std::vector<std::uint32_t> order;  // primitive ids in leaf order

  static Bvh build(std::span<const Aabb> boxes, int max_leaf = 4, int bins = 16);

  bool empty() const { return nodes.empty(); }
};

// Slab test against a box given the reciprocal direction; returns the entry
// distance or +inf when the ray misses [tmin, tmax].
inline double intersect_box(const Aabb& box, const Vec3& origin, const Vec3& inv_dir,
    double tmin, double tmax) {
  for (int a = 0; a < 3; a++) {
    double t0 = (box.lo[a] - origin[a]) * inv_dir[a];
    double t1 = (box.hi[a] - origin[a]) * inv_dir[a];
    if (t0 > t1) std::swap(t0, t1);
    // NaN (origin on a slab of a parallel ray) must not reject the box.
    tmin = t0 > tmin ? t0 : tmin;
    tmax = t1 < tmax ? t1 : tmax;
    if (tmin > tmax) return kInf;
  }
  return tmin;
}

}  // namespace textworld
