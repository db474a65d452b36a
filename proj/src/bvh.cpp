#include "textworld/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace textworld {

namespace {

struct Builder {
  std::span<const Aabb> boxes;
  std::vector<Vec3> centroids;
  std::vector<std::uint32_t>& order;
  std::vector<Bvh::Node>& nodes;
  int max_leaf;
  int bins;

  void build(std::uint32_t node_index, std::uint32_t begin, std::uint32_t end) {
    Aabb bounds, centroid_bounds;
    for (auto i = begin; i < end; i++) {
      bounds.expand(boxes[order[i]]);
      centroid_bounds.expand(centroids[order[i]]);
    }
    nodes[node_index].bounds = bounds;
    std::uint32_t count = end - begin;
    if (count <= static_cast<std::uint32_t>(max_leaf)) {
      nodes[node_index].first = begin;
      nodes[node_index].count = count;
      return;
    }

    std::uint32_t mid = split_sah(begin, end, centroid_bounds);
    if (mid == begin || mid == end) mid = begin + count / 2;

    auto left = static_cast<std::uint32_t>(nodes.size());
    nodes.emplace_back();
    nodes.emplace_back();
    nodes[node_index].first = left;
    nodes[node_index].count = 0;
    build(left, begin, mid);
    build(left + 1, mid, end);
  }

  // Partitions [begin, end) along the cheapest binned split and returns the
  // split point. Degenerate centroid spreads fall back to a median split.
  std::uint32_t split_sah(std::uint32_t begin, std::uint32_t end, const Aabb& cbounds) {
    struct Bin {
      Aabb bounds;
      std::uint32_t count = 0;
    };
    double best_cost = kInf;
    int best_axis = -1, best_bin = -1;
    Vec3 extent = cbounds.extent();
    for (int axis = 0; axis < 3; axis++) {
      if (!(extent[axis] > 0)) continue;
      std::vector<Bin> b(bins);
      double scale = bins / extent[axis];
      for (auto i = begin; i < end; i++) {
        int k = std::min(bins - 1,
            static_cast<int>((centroids[order[i]][axis] - cbounds.lo[axis]) * scale));
        b[k].bounds.expand(boxes[order[i]]);
        b[k].count++;
      }
      std::vector<double> right_cost(bins, 0.0);
      Aabb acc;
      std::uint32_t acc_count = 0;
      for (int k = bins - 1; k > 0; k--) {
        acc.expand(b[k].bounds);
        acc_count += b[k].count;
        right_cost[k] = acc_count ? acc.surface_area() * acc_count : 0.0;
      }
      acc = Aabb{};
      acc_count = 0;
      for (int k = 0; k < bins - 1; k++) {
        acc.expand(b[k].bounds);
        acc_count += b[k].count;
        double cost = (acc_count ? acc.surface_area() * acc_count : 0.0) + right_cost[k + 1];
        if (acc_count > 0 && acc_count < end - begin && cost < best_cost) {
          best_cost = cost;
          best_axis = axis;
          best_bin = k;
        }
      }
    }
    if (best_axis < 0) {
      int axis = extent.x >= extent.y && extent.x >= extent.z ? 0 : (extent.y >= extent.z ? 1 : 2);
      std::uint32_t mid = begin + (end - begin) / 2;
      std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
          [&](std::uint32_t a, std::uint32_t b) {
            if (centroids[a][axis] != centroids[b][axis])
              return centroids[a][axis] < centroids[b][axis];
            return a < b;
          });
      return mid;
    }
    double scale = bins / extent[best_axis];
    auto it = std::stable_partition(order.begin() + begin, order.begin() + end,
        [&](std::uint32_t p) {
          int k = std::min(bins - 1,
              static_cast<int>((centroids[p][best_axis] - cbounds.lo[best_axis]) * scale));
          return k <= best_bin;
        });
    return static_cast<std::uint32_t>(it - order.begin());
  }
};

}  // namespace

Bvh Bvh::build(std::span<const Aabb> boxes, int max_leaf, int bins) {
  Bvh bvh;
  if (boxes.empty()) return bvh;
  bvh.order.resize(boxes.size());
  std::iota(bvh.order.begin(), bvh.order.end(), 0u);
  bvh.nodes.reserve(2 * boxes.size());
  bvh.nodes.emplace_back();
  Builder builder{boxes, {}, bvh.order, bvh.nodes, std::max(1, max_leaf), std::max(2, bins)};
  builder.centroids.reserve(boxes.size());
  for (const auto& b : boxes) builder.centroids.push_back(b.center());
  builder.build(0, 0, static_cast<std::uint32_t>(boxes.size()));
  return bvh;
}

}  // namespace textworld
