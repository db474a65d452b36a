#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "textworld/camera.hpp"
#include "textworld/geometry2d.hpp"
#include "textworld/image.hpp"
#include "textworld/rng.hpp"
#include "textworld/scene.hpp"

namespace textworld {

using NormalMap = Grid<std::array<float, 3>>;

struct PixelRect {
  int x = 0, y = 0, width = 0, height = 0;
  bool overlaps(const PixelRect& o) const {
    return x < o.x + o.width && o.x < x + width && y < o.y + height && o.y < y + height;
  }
  Vec2 center() const { return {x + 0.5 * width, y + 0.5 * height}; }
};

struct RegionConfig {
  int window = 64;
  int stride = 16;
  double cosine_threshold = 0.95;
  int max_proposals = 10;
  double surface_distance_fraction = 0.005;  // of the initial side, per proposal
  double max_expansion_ratio = 4.0;
  double expansion_step_fraction = 0.05;     // of the initial side
  int probe_samples = 8;
  double probe_lift_fraction = 1e-3;         // of the initial side

  void validate() const;
};

struct InitialProposal {
  PixelRect rect;
  double min_cosine = 1.0;  // exact minimum pairwise cosine in the window
};

// Text-placement rectangle on a mesh surface. The rectangle spans
// [-left, right] along `right_axis` and [-down, up] along `up_axis` around
// `anchor`, which lies on the surface.
struct RefinedProposal {
  std::uint32_t mesh = 0;
  Vec3 anchor;
  Vec3 normal;      // unit, facing the camera
  Vec3 right_axis;  // unit, orthogonal to gravity
  Vec3 up_axis;     // unit, normal x right
  double initial_side = 0;
  double left = 0, right = 0, down = 0, up = 0;
  std::array<Vec2, 4> screen_quad{};  // projected corners

  double width() const { return left + right; }
  double height() const { return down + up; }
  double distance_threshold(const RegionConfig& cfg) const {
    return cfg.surface_distance_fraction * initial_side;
  }
  Vec3 center() const;
  // Corners in order top-left, top-right, bottom-right, bottom-left.
  std::array<Vec3, 4> corners() const;
};

// Smoothness test over one window: every pixel covered and every pair of
// normals with cosine >= threshold. Uses a bounding-cone shortcut with an
// exact fallback, so the decision equals the all-pairs check.
bool window_is_smooth(const NormalMap& normals, const PixelRect& rect, double threshold);

// Exact minimum pairwise cosine over the distinct normals of a window.
double window_min_cosine(const NormalMap& normals, const PixelRect& rect);

// Up to cfg.max_proposals non-overlapping smooth windows on the stride grid,
// drawn uniformly at random with rejection of overlaps.
std::vector<InitialProposal> propose_initial(const NormalMap& normals, const RegionConfig& cfg,
    Rng& rng);

// Re-initialises a proposal as a gravity-aligned square on the surface under
// its center pixel. nullopt when the center misses geometry, a corner ray
// misses the surface plane, a corner leaves the surface, or the square
// crosses other geometry.
std::optional<RefinedProposal> rectify_in_3d(const InitialProposal& proposal, const Scene& scene,
    const Camera& camera, const RegionConfig& cfg);

// Grows the rectangle side by side, horizontal then vertical, until each side
// leaves the surface, meets geometry, or its dimension hits the cap.
RefinedProposal expand(const RefinedProposal& proposal, const Scene& scene, const Camera& camera,
    const RegionConfig& cfg);

// Screen polygon of a proposal clipped to the image; empty when a corner is
// behind the camera.
Polygon screen_polygon(const RefinedProposal& proposal, const Camera& camera);

// Drops proposals that overlap another remaining one, visiting them in a
// seeded shuffled order, until no two screen polygons share positive area.
std::vector<RefinedProposal> prune_occlusions(std::span<const RefinedProposal> proposals,
    const Camera& camera, Rng& rng);

inline constexpr double kOverlapAreaTolerance = 1e-6;  // square pixels

}  // namespace textworld
