#include "textworld/procedural.hpp"

#include "textworld/error.hpp"
#include "textworld/rng.hpp"

namespace textworld {

TriangleMesh make_box(const std::string& name, Vec3 lo, Vec3 hi, std::uint32_t material) {
  TriangleMesh mesh;
  mesh.name = name;
  mesh.material = material;
  // Each face: normal, then four corners counter-clockwise seen from outside.
  struct Face {
    Vec3 n;
    Vec3 c[4];
  };
  const Face faces[6] = {
      {{-1, 0, 0}, {{lo.x, lo.y, lo.z}, {lo.x, lo.y, hi.z}, {lo.x, hi.y, hi.z}, {lo.x, hi.y, lo.z}}},
      {{1, 0, 0}, {{hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {hi.x, hi.y, hi.z}, {hi.x, lo.y, hi.z}}},
      {{0, -1, 0}, {{lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, lo.y, hi.z}, {lo.x, lo.y, hi.z}}},
      {{0, 1, 0}, {{lo.x, hi.y, lo.z}, {lo.x, hi.y, hi.z}, {hi.x, hi.y, hi.z}, {hi.x, hi.y, lo.z}}},
      {{0, 0, -1}, {{lo.x, lo.y, lo.z}, {lo.x, hi.y, lo.z}, {hi.x, hi.y, lo.z}, {hi.x, lo.y, lo.z}}},
      {{0, 0, 1}, {{lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}}},
  };
  for (const auto& f : faces) {
    auto base = static_cast<std::uint32_t>(mesh.positions.size());
    for (const auto& c : f.c) {
      mesh.positions.push_back(c);
      mesh.normals.push_back(f.n);
    }
    mesh.triangles.push_back({base, base + 1, base + 2});
    mesh.triangles.push_back({base, base + 2, base + 3});
  }
  return mesh;
}

TriangleMesh make_cylinder(const std::string& name, Vec3 base, double radius, double height,
    int segments, std::uint32_t material) {
  TriangleMesh mesh;
  mesh.name = name;
  mesh.material = material;
  auto n = static_cast<std::uint32_t>(segments);
  auto ring = [&](std::uint32_t i) {
    double a = 2 * kPi * i / n;
    return Vec3{std::cos(a), std::sin(a), 0};
  };
  // Side: bottom ring [0, n), top ring [n, 2n).
  for (std::uint32_t i = 0; i < n; i++) {
    mesh.positions.push_back(base + ring(i) * radius);
    mesh.normals.push_back(ring(i));
  }
  for (std::uint32_t i = 0; i < n; i++) {
    mesh.positions.push_back(base + ring(i) * radius + Vec3{0, 0, height});
    mesh.normals.push_back(ring(i));
  }
  for (std::uint32_t i = 0; i < n; i++) {
    std::uint32_t j = (i + 1) % n;
    mesh.triangles.push_back({i, j, n + j});
    mesh.triangles.push_back({i, n + j, n + i});
  }
  // Caps: center then rim.
  for (int cap = 0; cap < 2; cap++) {
    double z = cap == 0 ? 0.0 : height;
    Vec3 normal{0, 0, cap == 0 ? -1.0 : 1.0};
    auto center = static_cast<std::uint32_t>(mesh.positions.size());
    mesh.positions.push_back(base + Vec3{0, 0, z});
    mesh.normals.push_back(normal);
    for (std::uint32_t i = 0; i < n; i++) {
      mesh.positions.push_back(base + ring(i) * radius + Vec3{0, 0, z});
      mesh.normals.push_back(normal);
    }
    for (std::uint32_t i = 0; i < n; i++) {
      std::uint32_t a = center + 1 + i, b = center + 1 + (i + 1) % n;
      if (cap == 0)
        mesh.triangles.push_back({center, b, a});
      else
        mesh.triangles.push_back({center, a, b});
    }
  }
  return mesh;
}

void append_mesh(TriangleMesh& into, const TriangleMesh& from) {
  auto base = static_cast<std::uint32_t>(into.positions.size());
  into.positions.insert(into.positions.end(), from.positions.begin(), from.positions.end());
  into.normals.insert(into.normals.end(), from.normals.begin(), from.normals.end());
  for (auto t : from.triangles) into.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

namespace {

std::uint32_t add_material(SceneData& s, const std::string& name, Vec3 color, double diffuse = 0.9,
    double specular = 0.1, double shininess = 24) {
  Material m;
  m.name = name;
  m.color = color;
  m.diffuse = diffuse;
  m.specular = specular;
  m.shininess = shininess;
  s.materials.push_back(m);
  return static_cast<std::uint32_t>(s.materials.size() - 1);
}

void add_default_lights(SceneData& s, Vec3 point_light) {
  Light sun;
  sun.kind = LightKind::directional;
  sun.direction = normalize(Vec3{-0.4, -0.3, -0.85});
  sun.color = {1.0, 0.96, 0.9};
  sun.intensity = 0.8;
  s.lights.push_back(sun);
  Light lamp;
  lamp.kind = LightKind::point;
  lamp.position = point_light;
  lamp.color = {1.0, 0.9, 0.75};
  lamp.intensity = 6.0;
  s.lights.push_back(lamp);
}

}  // namespace

std::vector<std::string> builtin_scene_names() {
  return {"unit-cube", "test-room", "flat-floor", "pillar-wall", "single-wall", "cylinder",
      "random-soup"};
}

SceneData make_builtin_scene(std::string_view name) {
  if (name == "unit-cube") return make_unit_cube();
  if (name == "test-room") return make_test_room();
  if (name == "flat-floor") return make_flat_floor();
  if (name == "pillar-wall") return make_pillar_wall();
  if (name == "single-wall") return make_single_wall();
  if (name == "cylinder") return make_cylinder_scene();
  if (name == "random-soup") return make_random_soup(500, 1);
  throw Error("unknown builtin scene '" + std::string(name) + "'");
}

SceneData make_unit_cube() {
  SceneData s;
  s.name = "unit-cube";
  auto mat = add_material(s, "white", {1, 1, 1});
  s.meshes.push_back(make_box("cube", {0, 0, 0}, {1, 1, 1}, mat));
  Light sun;
  sun.direction = normalize(Vec3{-0.3, -0.5, -0.8});
  s.lights.push_back(sun);
  return s;
}

SceneData make_test_room() {
  SceneData s;
  s.name = "test-room";
  constexpr double W = 12, D = 10, H = 3.5, T = 0.2;
  auto floor_mat = add_material(s, "floor", {0.45, 0.38, 0.30}, 0.9, 0.15, 32);
  auto wall_mat = add_material(s, "wall", {0.78, 0.76, 0.70});
  auto accent_mat = add_material(s, "accent_wall", {0.55, 0.62, 0.70});
  auto ceiling_mat = add_material(s, "ceiling", {0.92, 0.92, 0.90});
  auto wood_mat = add_material(s, "wood", {0.50, 0.32, 0.18}, 0.85, 0.25, 40);
  auto metal_mat = add_material(s, "metal", {0.60, 0.62, 0.65}, 0.6, 0.5, 64);
  auto board_mat = add_material(s, "board", {0.20, 0.35, 0.25});
  auto column_mat = add_material(s, "column", {0.85, 0.82, 0.78});

  s.meshes.push_back(make_box("floor", {-T, -T, -T}, {W + T, D + T, 0}, floor_mat));
  s.meshes.push_back(make_box("ceiling", {-T, -T, H}, {W + T, D + T, H + T}, ceiling_mat));
  s.meshes.push_back(make_box("wall_west", {-T, 0, 0}, {0, D, H}, wall_mat));
  s.meshes.push_back(make_box("wall_east", {W, 0, 0}, {W + T, D, H}, accent_mat));
  s.meshes.push_back(make_box("wall_south", {0, -T, 0}, {W, 0, H}, wall_mat));
  s.meshes.push_back(make_box("wall_north", {0, D, 0}, {W, D + T, H}, accent_mat));

  TriangleMesh table = make_box("table", {3, 3, 0.72}, {5, 4.2, 0.8}, wood_mat);
  const double leg = 0.08;
  for (auto [x, y] : {std::pair{3.05, 3.05}, {4.87, 3.05}, {3.05, 4.07}, {4.87, 4.07}})
    append_mesh(table, make_box("leg", {x, y, 0}, {x + leg, y + leg, 0.72}, wood_mat));
  s.meshes.push_back(table);

  s.meshes.push_back(make_box("cabinet", {9, 8.8, 0}, {11.5, 9.8, 2.2}, metal_mat));
  s.meshes.push_back(make_box("sign", {4, 9.9, 1.2}, {7, 10, 2.4}, board_mat));
  s.meshes.push_back(make_box("crate", {1, 7, 0}, {2, 8, 1}, wood_mat));
  s.meshes.push_back(
      make_cylinder("column", {8, 4, 0}, 0.4, H, kTestRoomColumnSegments, column_mat));

  add_default_lights(s, {6, 5, 3.0});
  Light fill;
  fill.kind = LightKind::point;
  fill.position = {2, 2, 2.8};
  fill.color = {0.8, 0.85, 1.0};
  fill.intensity = 3.0;
  s.lights.push_back(fill);
  s.fog.density = 0.0;

  // Anchor grid, keeping points that are outside furniture with some clearance.
  Scene probe(s);
  double margin = boundary_margin(probe);
  for (int iz = 0; iz < 2; iz++)
    for (int ix = 1; ix <= 11; ix++)
      for (int iy = 1; iy <= 9; iy++) {
        Vec3 p{double(ix), double(iy), iz ? 2.0 : 1.4};
        if (is_inside_mesh(probe, p) || !probe.bounds().contains(p, margin)) continue;
        bool clear = true;
        for (std::uint32_t m = 0; m < probe.meshes().size(); m++)
          if (distance_to_surface(probe, p, m) < 0.25) clear = false;
        if (clear) s.anchors.push_back(p);
      }
  return s;
}

SceneData make_flat_floor() {
  SceneData s;
  s.name = "flat-floor";
  auto mat = add_material(s, "ground", {0.5, 0.5, 0.48});
  s.meshes.push_back(make_box("floor", {-50, -50, -0.2}, {50, 50, 0}, mat));
  s.bounds = Aabb{{-50, -50, -0.2}, {50, 50, 10}};
  add_default_lights(s, {0, 0, 6});
  s.anchors = {{0, 0, 2}, {10, 5, 2}, {-10, -5, 3}};
  return s;
}

SceneData make_pillar_wall() {
  SceneData s;
  s.name = "pillar-wall";
  auto ground = add_material(s, "ground", {0.45, 0.45, 0.42});
  auto wall = add_material(s, "wall", {0.80, 0.78, 0.72});
  auto pillar = add_material(s, "pillar", {0.60, 0.40, 0.35});
  s.meshes.push_back(make_box("floor", {-10, -10, -0.2}, {10, 10, 0}, ground));
  s.meshes.push_back(make_box("wall", {-10, kPillarWallY, 0}, {10, kPillarWallY + 0.2, 6}, wall));
  s.meshes.push_back(make_box("pillar", {kPillarMinX, kPillarFrontY, 0},
      {kPillarMaxX, kPillarWallY, 6}, pillar));
  s.bounds = Aabb{{-10, -10, -0.2}, {10, 10, 8}};
  add_default_lights(s, {0, 0, 5});
  s.anchors = {{0, 0, 1.8}, {-4, -2, 1.6}, {4, -3, 2.2}, {0, 2.5, 1.5}};
  return s;
}

SceneData make_single_wall() {
  SceneData s;
  s.name = "single-wall";
  auto ground = add_material(s, "ground", {0.42, 0.40, 0.36});
  auto wall = add_material(s, "wall", {0.75, 0.72, 0.66});
  s.meshes.push_back(make_box("floor", {-12, -12, -0.2}, {12, 12, 0}, ground));
  s.meshes.push_back(make_box("wall", {-12, 8, 0}, {12, 8.3, 8}, wall));
  s.bounds = Aabb{{-12, -12, -0.2}, {12, 12, 9}};
  add_default_lights(s, {0, 4, 5});
  for (int ix = -8; ix <= 8; ix += 4)
    for (int iy = -6; iy <= 4; iy += 5) s.anchors.push_back({double(ix), double(iy), 1.7});
  return s;
}

SceneData make_cylinder_scene() {
  SceneData s;
  s.name = "cylinder";
  auto ground = add_material(s, "ground", {0.45, 0.45, 0.42});
  auto drum = add_material(s, "drum", {0.70, 0.55, 0.40});
  s.meshes.push_back(make_box("floor", {-15, -15, -0.2}, {15, 15, 0}, ground));
  s.meshes.push_back(make_cylinder(
      "drum", {0, 0, 0}, kCylinderRadius, kCylinderHeight, kCylinderSegments, drum));
  s.bounds = Aabb{{-15, -15, -0.2}, {15, 15, 10}};
  add_default_lights(s, {0, -6, 5});
  s.anchors = {{0, -6, 2}, {6, 0, 2}, {-6, 0, 2}, {0, 6, 2}};
  return s;
}

SceneData make_random_soup(std::size_t count, std::uint64_t seed) {
  SceneData s;
  s.name = "random-soup";
  auto mat = add_material(s, "soup", {0.6, 0.6, 0.6});
  TriangleMesh mesh;
  mesh.name = "soup";
  mesh.material = mat;
  Rng rng(seed);
  while (mesh.triangles.size() < count) {
    Vec3 c{rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 10)};
    auto base = static_cast<std::uint32_t>(mesh.positions.size());
    Vec3 p[3];
    for (auto& v : p) v = c + Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    Vec3 n = cross(p[1] - p[0], p[2] - p[0]);
    if (length(n) < 1e-3) continue;
    for (auto& v : p) {
      mesh.positions.push_back(v);
      mesh.normals.push_back(normalize(n));
    }
    mesh.triangles.push_back({base, base + 1, base + 2});
  }
  s.meshes.push_back(mesh);
  Light sun;
  s.lights.push_back(sun);
  return s;
}

}  // namespace textworld
