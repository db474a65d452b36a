#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "textworld/bvh.hpp"
#include "textworld/math.hpp"

namespace textworld {

// Minimum ray parameter used by every ray query, in world units.
inline constexpr double kRayEpsilon = 1e-4;

// Triangles with area at or below this are dropped at load.
inline constexpr double kDegenerateArea = 1e-12;

struct Material {
  std::string name = "default";
  Vec3 color{0.8, 0.8, 0.8};  // linear RGB
  double diffuse = 1.0;
  double specular = 0.0;
  double shininess = 32.0;
  bool unlit = false;  // rendered as flat color, ignoring lights
};

struct TriangleMesh {
  std::string name;
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;  // per vertex, unit length
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::uint32_t material = 0;
};

enum class LightKind { directional, point };

struct Light {
  LightKind kind = LightKind::directional;
  Vec3 direction{0, 0, -1};  // travel direction for directional lights
  Vec3 position{};           // point lights
  Vec3 color{1, 1, 1};       // linear RGB in [0,1]
  double intensity = 1.0;
};

struct FogParams {
  double density = 0.0;  // per world unit
  Vec3 color{0.7, 0.72, 0.75};
};

// Plain scene description, as produced by loaders and procedural generators.
struct SceneData {
  std::string name = "scene";
  std::vector<TriangleMesh> meshes;
  std::vector<Material> materials;
  std::vector<Light> lights;
  FogParams fog;
  Vec3 gravity{0, 0, -1};
  Vec3 ambient{0.25, 0.25, 0.25};
  Vec3 sky{0.55, 0.68, 0.85};
  std::optional<Aabb> bounds;  // must contain all vertices when given
  std::vector<Vec3> anchors;
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
  double max_length = kInf;
};

struct Hit {
  double distance = 0;
  std::uint32_t mesh = 0;
  std::uint32_t triangle = 0;
  Vec3 barycentric;       // weights of the triangle's three vertices
  Vec3 normal;            // interpolated vertex normal, unit
  Vec3 geometric_normal;  // face normal, unit
};

// Immutable triangle-mesh world with ray and proximity acceleration.
// Construction validates the data, drops degenerate triangles and builds
// one BVH over every triangle plus one per mesh for distance queries.
class Scene {
 public:
  explicit Scene(SceneData data);

  const std::string& name() const { return data_.name; }
  const std::vector<TriangleMesh>& meshes() const { return data_.meshes; }
  const std::vector<Material>& materials() const { return data_.materials; }
  const std::vector<Light>& lights() const { return data_.lights; }
  const FogParams& fog() const { return data_.fog; }
  Vec3 gravity() const { return data_.gravity; }
  Vec3 ambient() const { return data_.ambient; }
  Vec3 sky() const { return data_.sky; }
  const Aabb& bounds() const { return bounds_; }
  const std::vector<Vec3>& anchors() const { return data_.anchors; }
  const SceneData& data() const { return data_; }

  const Material& material_of(std::uint32_t mesh) const;
  bool is_closed(std::uint32_t mesh) const { return closed_[mesh]; }

  std::size_t vertex_count() const;
  std::size_t triangle_count() const { return prims_.size(); }
  std::size_t dropped_triangles() const { return dropped_; }

  // Global triangle table, indexed in BVH leaf order.
  struct Prim {
    std::uint32_t mesh;
    std::uint32_t triangle;
    Vec3 v0, e1, e2;
  };
  const Bvh& bvh() const { return bvh_; }
  std::span<const Prim> prims() const { return prims_; }
  const Bvh& mesh_bvh(std::uint32_t mesh) const { return mesh_bvhs_[mesh]; }

 private:
  SceneData data_;
  Aabb bounds_;
  std::size_t dropped_ = 0;
  std::vector<bool> closed_;
  Bvh bvh_;
  std::vector<Prim> prims_;
  std::vector<Bvh> mesh_bvhs_;
};

// Moller-Trumbore test; returns the ray parameter in (tmin, tmax] and the
// barycentric weights (u, v) of vertices 1 and 2.
std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& direction,
    const Vec3& v0, const Vec3& e1, const Vec3& e2, double tmin, double tmax,
    double& u, double& v);

// Nearest hit within (kRayEpsilon, ray.max_length]. Ties at equal distance
// resolve to the lowest (mesh, triangle) pair.
std::optional<Hit> cast_ray(const Scene& scene, const Ray& ray);

// True if any geometry lies strictly between a and b (beyond kRayEpsilon).
bool segment_blocked(const Scene& scene, const Vec3& a, const Vec3& b);

// Interior test by crossing parity along three fixed directions, majority
// vote. Open meshes never contain points.
bool is_inside_mesh(const Scene& scene, const Vec3& point);

// Number of surface crossings of `mesh` along the half-line origin + t*dir.
int count_crossings(const Scene& scene, std::uint32_t mesh, const Vec3& origin,
    const Vec3& direction);

// Exact distance from point to the nearest point of mesh `mesh`.
// Throws Error on an invalid mesh id.
double distance_to_surface(const Scene& scene, const Vec3& point, std::uint32_t mesh);

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Margin used to keep cameras away from the world bounds.
double boundary_margin(const Scene& scene, double fraction = 0.02);

// Stable hash over mesh geometry, for immutability checks.
std::uint64_t geometry_hash(const Scene& scene);

enum class SceneFormat { automatic, obj, builtin };

// Loads a scene. `obj` reads a Wavefront OBJ subset plus the `.meta`
// sidecar next to it; `builtin` treats `path` as a procedural scene name.
Scene load_scene(const std::filesystem::path& path, SceneFormat format = SceneFormat::automatic);

SceneData read_obj_scene(const std::filesystem::path& obj_path);
void read_scene_metadata(const std::filesystem::path& meta_path, SceneData& data);
void write_obj_scene(const SceneData& data, const std::filesystem::path& obj_path);

}  // namespace textworld
