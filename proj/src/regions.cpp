#include "textworld/regions.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <unordered_map>

#include "textworld/error.hpp"

namespace textworld {

namespace {

using Normal = std::array<float, 3>;

// Cosine between two stored normals; the exact arithmetic shared with the
// all-pairs definition (float products are exact in double).
inline double pair_cosine(const Normal& a, const Normal& b) {
  return double(a[0]) * b[0] + double(a[1]) * b[1] + double(a[2]) * b[2];
}

inline bool is_zero(const Normal& n) { return n[0] == 0 && n[1] == 0 && n[2] == 0; }

struct NormalHash {
  std::size_t operator()(const Normal& n) const {
    std::uint32_t b[3];
    std::memcpy(b, n.data(), sizeof(b));
    return (std::size_t(b[0]) * 0x9e3779b1u) ^ (std::size_t(b[1]) * 0x85ebca77u) ^
           (std::size_t(b[2]) * 0xc2b2ae3du);
  }
};
struct NormalEq {
  bool operator()(const Normal& a, const Normal& b) const {
    return std::memcmp(a.data(), b.data(), sizeof(Normal)) == 0;
  }
};

// Distinct normals of a window; `repeated` marks those stored at two or more
// pixels, whose self-pair then counts as a pixel pair.
std::vector<Normal> distinct_normals(const NormalMap& normals, const PixelRect& rect,
    std::vector<char>& repeated) {
  std::unordered_map<Normal, std::size_t, NormalHash, NormalEq> index;
  std::vector<Normal> out;
  repeated.clear();
  for (int y = rect.y; y < rect.y + rect.height; y++)
    for (int x = rect.x; x < rect.x + rect.width; x++) {
      auto [it, inserted] = index.emplace(normals.at(x, y), out.size());
      if (inserted) {
        out.push_back(normals.at(x, y));
        repeated.push_back(0);
      } else {
        repeated[it->second] = 1;
      }
    }
  return out;
}

// Minimum cosine over all pixel pairs, from the distinct normals.
double min_pair_cosine(const std::vector<Normal>& distinct, const std::vector<char>& repeated,
    double stop_below) {
  double best = kInf;
  for (std::size_t i = 0; i < distinct.size(); i++) {
    if (repeated[i]) best = std::min(best, pair_cosine(distinct[i], distinct[i]));
    for (std::size_t j = i + 1; j < distinct.size(); j++) {
      best = std::min(best, pair_cosine(distinct[i], distinct[j]));
      if (best < stop_below) return best;
    }
  }
  return best;
}

}  // namespace

void RegionConfig::validate() const {
  if (window < 8) throw ConfigError("region window must be >= 8 pixels");
  if (stride < 1) throw ConfigError("region stride must be >= 1");
  if (!(cosine_threshold > 0 && cosine_threshold <= 1))
    throw ConfigError("region cosine threshold must lie in (0, 1]");
  if (max_proposals < 0) throw ConfigError("region max proposals must be >= 0");
  if (!(surface_distance_fraction > 0)) throw ConfigError("surface distance fraction must be > 0");
  if (!(max_expansion_ratio >= 1)) throw ConfigError("max expansion ratio must be >= 1");
  if (!(expansion_step_fraction > 0)) throw ConfigError("expansion step must be > 0");
  if (probe_samples < 2) throw ConfigError("probe samples must be >= 2");
}

bool window_is_smooth(const NormalMap& normals, const PixelRect& rect, double threshold) {
  // Coverage and mean direction.
  Vec3 sum;
  for (int y = rect.y; y < rect.y + rect.height; y++)
    for (int x = rect.x; x < rect.x + rect.width; x++) {
      const auto& n = normals.at(x, y);
      if (is_zero(n)) return false;
      sum += Vec3{n[0], n[1], n[2]};
    }
  Vec3 axis = normalize(sum);

  // Bounding cone around the mean: every pair is within twice its half-angle.
  double min_cos = kInf, min_norm2 = kInf;
  int extreme_x = rect.x, extreme_y = rect.y;
  for (int y = rect.y; y < rect.y + rect.height; y++)
    for (int x = rect.x; x < rect.x + rect.width; x++) {
      const auto& n = normals.at(x, y);
      double n2 = pair_cosine(n, n);
      double c = (axis.x * n[0] + axis.y * n[1] + axis.z * n[2]) / std::sqrt(n2);
      min_norm2 = std::min(min_norm2, n2);
      if (c < min_cos) {
        min_cos = c;
        extreme_x = x;
        extreme_y = y;
      }
    }
  if (min_cos > 0) {
    double cone = 2 * min_cos * min_cos - 1;
    if (cone > 0 && cone * min_norm2 - 1e-9 >= threshold) return true;
  }

  // A concrete failing pair decides immediately.
  const Normal extreme = normals.at(extreme_x, extreme_y);
  for (int y = rect.y; y < rect.y + rect.height; y++)
    for (int x = rect.x; x < rect.x + rect.width; x++)
      if ((x != extreme_x || y != extreme_y) && pair_cosine(extreme, normals.at(x, y)) < threshold)
        return false;

  // Exact check over distinct normals.
  std::vector<char> repeated;
  auto distinct = distinct_normals(normals, rect, repeated);
  return !(min_pair_cosine(distinct, repeated, threshold) < threshold);
}

double window_min_cosine(const NormalMap& normals, const PixelRect& rect) {
  std::vector<char> repeated;
  auto distinct = distinct_normals(normals, rect, repeated);
  double best = min_pair_cosine(distinct, repeated, -kInf);
  return std::isfinite(best) ? best : 1.0;
}

std::vector<InitialProposal> propose_initial(const NormalMap& normals, const RegionConfig& cfg,
    Rng& rng) {
  std::vector<PixelRect> candidates;
  for (int y = 0; y + cfg.window <= normals.height; y += cfg.stride)
    for (int x = 0; x + cfg.window <= normals.width; x += cfg.stride)
      candidates.push_back({x, y, cfg.window, cfg.window});
  rng.shuffle(std::span(candidates));

  std::vector<InitialProposal> chosen;
  for (const auto& rect : candidates) {
    if (static_cast<int>(chosen.size()) >= cfg.max_proposals) break;
    bool overlaps = std::any_of(chosen.begin(), chosen.end(),
        [&](const InitialProposal& p) { return p.rect.overlaps(rect); });
    if (overlaps || !window_is_smooth(normals, rect, cfg.cosine_threshold)) continue;
    chosen.push_back({rect, window_min_cosine(normals, rect)});
  }
  return chosen;
}

Vec3 RefinedProposal::center() const {
  return anchor + right_axis * (0.5 * (right - left)) + up_axis * (0.5 * (up - down));
}

std::array<Vec3, 4> RefinedProposal::corners() const {
  return {anchor - right_axis * left + up_axis * up, anchor + right_axis * right + up_axis * up,
      anchor + right_axis * right - up_axis * down, anchor - right_axis * left - up_axis * down};
}

namespace {

bool project_quad(RefinedProposal& p, const Camera& camera) {
  auto corners = p.corners();
  for (int i = 0; i < 4; i++) {
    auto proj = camera.project(corners[i]);
    if (!proj) return false;
    p.screen_quad[i] = proj->pixel;
  }
  return true;
}

// Lifted boundary and a grid of interior lines must not cross other geometry.
bool square_is_clear(const RefinedProposal& p, const Scene& scene, const RegionConfig& cfg) {
  const Vec3 lift = p.normal * (cfg.probe_lift_fraction * p.initial_side);
  auto c = p.corners();
  for (auto& v : c) v = v + lift;
  for (int i = 0; i < 4; i++)
    if (segment_blocked(scene, c[i], c[(i + 1) % 4])) return false;
  const int n = std::max(2, cfg.probe_samples);
  for (int k = 1; k < n; k++) {
    double t = double(k) / n;
    if (segment_blocked(scene, lerp(c[0], c[3], t), lerp(c[1], c[2], t)) ||
        segment_blocked(scene, lerp(c[0], c[1], t), lerp(c[3], c[2], t)))
      return false;
  }
  return true;
}

}  // namespace

std::optional<RefinedProposal> rectify_in_3d(const InitialProposal& proposal, const Scene& scene,
    const Camera& camera, const RegionConfig& cfg) {
  Vec3 dir = camera.ray_direction(proposal.rect.center());
  auto hit = cast_ray(scene, {camera.position(), dir, kInf});
  if (!hit) return std::nullopt;

  RefinedProposal out;
  out.mesh = hit->mesh;
  out.anchor = camera.position() + dir * hit->distance;
  Vec3 n = hit->normal;
  if (dot(n, dir) > 0) n = -n;
  out.normal = n;

  const Vec3 g = scene.gravity();
  Vec3 r = cross(n, g);
  if (length(r) < std::sin(radians(1))) {
    // Surface faces along gravity: use the camera's horizontal right vector.
    Vec3 h = camera.right() - g * dot(camera.right(), g);
    if (length(h) < 1e-9) {
      Vec3 e2;
      horizontal_basis(g, h, e2);
    }
    r = h - n * dot(h, n);
  }
  out.right_axis = normalize(r);
  out.up_axis = normalize(cross(n, out.right_axis));

  // Corner rays against the tangent plane give the distorted quadrilateral.
  const auto& rc = proposal.rect;
  const Vec2 px[4] = {{double(rc.x), double(rc.y)}, {double(rc.x + rc.width), double(rc.y)},
      {double(rc.x + rc.width), double(rc.y + rc.height)}, {double(rc.x), double(rc.y + rc.height)}};
  Vec3 q[4];
  double plane = dot(out.anchor - camera.position(), n);
  for (int i = 0; i < 4; i++) {
    Vec3 d = camera.ray_direction(px[i]);
    double denom = dot(d, n);
    if (denom == 0) return std::nullopt;
    double t = plane / denom;
    if (!(t > 0) || !std::isfinite(t)) return std::nullopt;
    q[i] = camera.position() + d * t;
  }
  double side = kInf;
  for (int i = 0; i < 4; i++) side = std::min(side, distance(q[i], q[(i + 1) % 4]));
  if (!(side > 0)) return std::nullopt;

  out.initial_side = side;
  out.left = out.right = out.down = out.up = 0.5 * side;
  double threshold = out.distance_threshold(cfg);
  for (const auto& c : out.corners())
    if (distance_to_surface(scene, c, out.mesh) > threshold) return std::nullopt;
  if (!square_is_clear(out, scene, cfg)) return std::nullopt;
  if (!project_quad(out, camera)) return std::nullopt;
  return out;
}

namespace {

enum Side { kLeft = 0, kRight = 1, kDown = 2, kUp = 3 };

double& extent(RefinedProposal& p, int side) {
  switch (side) {
    case kLeft: return p.left;
    case kRight: return p.right;
    case kDown: return p.down;
    default: return p.up;
  }
}

// The two corners bounding `side`.
std::pair<Vec3, Vec3> side_edge(const RefinedProposal& p, int side) {
  auto c = p.corners();  // tl, tr, br, bl
  switch (side) {
    case kLeft: return {c[0], c[3]};
    case kRight: return {c[1], c[2]};
    case kDown: return {c[3], c[2]};
    default: return {c[0], c[1]};
  }
}

bool side_is_clear(const RefinedProposal& before, const RefinedProposal& after, int side,
    const Scene& scene, const RegionConfig& cfg) {
  const double threshold = after.distance_threshold(cfg);
  const Vec3 lift = after.normal * (cfg.probe_lift_fraction * after.initial_side);
  auto [a0, b0] = side_edge(before, side);
  auto [a1, b1] = side_edge(after, side);
  const int n = cfg.probe_samples;
  for (int k = 0; k < n; k++) {
    double t = double(k) / (n - 1);
    Vec3 p1 = lerp(a1, b1, t);
    if (distance_to_surface(scene, p1, after.mesh) > threshold) return false;
  }
  for (int k = 0; k < n; k++) {
    double t = double(k) / (n - 1);
    if (segment_blocked(scene, lerp(a0, b0, t) + lift, lerp(a1, b1, t) + lift)) return false;
  }
  return !segment_blocked(scene, a1 + lift, b1 + lift);
}

}  // namespace

RefinedProposal expand(const RefinedProposal& proposal, const Scene& scene, const Camera& camera,
    const RegionConfig& cfg) {
  RefinedProposal q = proposal;
  const double s = q.initial_side;
  const double cap = cfg.max_expansion_ratio * s;
  const double step = cfg.expansion_step_fraction * s;
  const double eps = 1e-12 * s;
  bool active[4] = {true, true, true, true};
  auto dimension = [&](int axis) { return axis == 0 ? q.width() : q.height(); };

  while (active[0] || active[1] || active[2] || active[3]) {
    for (int axis = 0; axis < 2; axis++) {
      for (int side = 2 * axis; side < 2 * axis + 2; side++) {
        if (!active[side]) continue;
        double room = cap - dimension(axis);
        if (room <= eps) {
          active[2 * axis] = active[2 * axis + 1] = false;
          continue;
        }
        RefinedProposal candidate = q;
        extent(candidate, side) += std::min(step, room);
        if (side_is_clear(q, candidate, side, scene, cfg))
          q = candidate;
        else
          active[side] = false;
      }
    }
  }
  project_quad(q, camera);
  return q;
}

Polygon screen_polygon(const RefinedProposal& proposal, const Camera& camera) {
  Polygon quad;
  for (const auto& c : proposal.corners()) {
    auto proj = camera.project(c);
    if (!proj) return {};
    quad.push_back(proj->pixel);
  }
  const auto& in = camera.intrinsics();
  return clip_to_rect(quad, 0, 0, in.width, in.height);
}

std::vector<RefinedProposal> prune_occlusions(std::span<const RefinedProposal> proposals,
    const Camera& camera, Rng& rng) {
  std::vector<Polygon> polys;
  std::vector<bool> alive(proposals.size());
  for (std::size_t i = 0; i < proposals.size(); i++) {
    polys.push_back(screen_polygon(proposals[i], camera));
    alive[i] = polys.back().size() >= 3 && area(polys.back()) > kOverlapAreaTolerance;
  }
  std::vector<std::size_t> order(proposals.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span(order));
  for (auto i : order) {
    if (!alive[i]) continue;
    for (std::size_t j = 0; j < proposals.size(); j++) {
      if (j == i || !alive[j]) continue;
      if (intersection_area(polys[i], polys[j]) > kOverlapAreaTolerance) {
        alive[i] = false;
        break;
      }
    }
  }
  std::vector<RefinedProposal> kept;
  for (std::size_t i = 0; i < proposals.size(); i++)
    if (alive[i]) kept.push_back(proposals[i]);
  return kept;
}

}  // namespace textworld
