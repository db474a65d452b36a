#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "textworld/scene.hpp"

namespace textworld {

// Closed axis-aligned box, flat shaded: 24 vertices, 12 triangles.
TriangleMesh make_box(const std::string& name, Vec3 lo, Vec3 hi, std::uint32_t material);

// Closed vertical cylinder along +z with smooth side normals and flat caps:
// 4*segments + 2 vertices, 4*segments triangles.
TriangleMesh make_cylinder(const std::string& name, Vec3 base_center, double radius,
    double height, int segments, std::uint32_t material);

void append_mesh(TriangleMesh& into, const TriangleMesh& from);

// Bundled procedural scenes. Names: unit-cube, test-room, flat-floor,
// pillar-wall, single-wall, cylinder, random-soup.
std::vector<std::string> builtin_scene_names();
SceneData make_builtin_scene(std::string_view name);

// Unit cube [0,1]^3 with one directional light.
SceneData make_unit_cube();

// 12 x 10 x 3.5 room built from slabs plus furniture (table, cabinet, crate,
// wall sign, column) and a grid of camera anchors.
SceneData make_test_room();
inline constexpr std::size_t kTestRoomBoxes = 14;
inline constexpr int kTestRoomColumnSegments = 24;
inline constexpr std::size_t kTestRoomVertices = kTestRoomBoxes * 24 + (4 * kTestRoomColumnSegments + 2);
inline constexpr std::size_t kTestRoomTriangles = kTestRoomBoxes * 12 + 4 * kTestRoomColumnSegments;

// 100 x 100 floor slab with explicit bounds reaching 10 units up.
SceneData make_flat_floor();

// Floor, a 20-unit wall at y = 5 facing -y and a full-height pillar
// protruding from it, spanning x in [1.8, 2.6].
SceneData make_pillar_wall();
inline constexpr double kPillarMinX = 1.8;
inline constexpr double kPillarMaxX = 2.6;
inline constexpr double kPillarWallY = 5.0;
inline constexpr double kPillarFrontY = 4.4;

// Floor plus one large wall; smoke scene for the pipeline.
SceneData make_single_wall();

// Floor plus a closed radius-2 cylinder at the origin (256 segments).
SceneData make_cylinder_scene();
inline constexpr double kCylinderRadius = 2.0;
inline constexpr double kCylinderHeight = 6.0;
inline constexpr int kCylinderSegments = 256;

// `count` random triangles inside [0,10]^3, a single open mesh.
SceneData make_random_soup(std::size_t count, std::uint64_t seed);

}  // namespace textworld
