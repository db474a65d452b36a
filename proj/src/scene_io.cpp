#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "textworld/error.hpp"
#include "textworld/log.hpp"
#include "textworld/procedural.hpp"
#include "textworld/scene.hpp"

namespace textworld {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, int line, const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

struct LineReader {
  std::istringstream in;
  const std::filesystem::path& path;
  int line;

  double number() {
    double v;
    if (!(in >> v)) fail(path, line, "expected a number");
    return v;
  }
  Vec3 vec3() {
    double x = number(), y = number(), z = number();
    return {x, y, z};
  }
  std::string token() {
    std::string t;
    if (!(in >> t)) fail(path, line, "unexpected end of line");
    return t;
  }
  bool done() {
    in >> std::ws;
    return in.eof();
  }
};

// Resolves an OBJ index (1-based, negative = relative to the end).
std::uint32_t resolve_index(long idx, std::size_t count, const std::filesystem::path& path, int line) {
  long resolved = idx > 0 ? idx - 1 : static_cast<long>(count) + idx;
  if (idx == 0 || resolved < 0 || resolved >= static_cast<long>(count))
    fail(path, line, "index out of range");
  return static_cast<std::uint32_t>(resolved);
}

}  // namespace

SceneData read_obj_scene(const std::filesystem::path& obj_path) {
  std::ifstream file(obj_path);
  if (!file) throw ParseError("cannot open scene file " + obj_path.string());

  SceneData data;
  data.name = obj_path.stem().string();
  std::vector<Vec3> positions, normals;

  struct PendingMesh {
    std::string name;
    std::string material;
    TriangleMesh mesh;
    std::map<std::pair<std::uint32_t, long>, std::uint32_t> vertex_of;
  };
  std::vector<PendingMesh> pending;
  std::string object_name = "mesh", material_name = "default";
  auto current = [&]() -> PendingMesh& {
    if (pending.empty() || pending.back().name != object_name ||
        pending.back().material != material_name) {
      pending.push_back({object_name, material_name, {}, {}});
      pending.back().mesh.name = object_name;
    }
    return pending.back();
  };

  std::string text;
  int line_no = 0;
  while (std::getline(file, text)) {
    line_no++;
    if (auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
    LineReader r{std::istringstream(text), obj_path, line_no};
    std::string key;
    if (!(r.in >> key)) continue;
    if (key == "v") {
      positions.push_back(r.vec3());
    } else if (key == "vn") {
      normals.push_back(r.vec3());
    } else if (key == "o" || key == "g") {
      std::string name;
      std::getline(r.in >> std::ws, name);
      object_name = name.empty() ? "mesh" : name;
    } else if (key == "usemtl") {
      material_name = r.token();
    } else if (key == "f") {
      std::vector<std::pair<std::uint32_t, long>> corners;  // (position, normal or -1)
      std::string vert;
      while (r.in >> vert) {
        long v = 0, vt = 0, vn = 0;
        int fields = 0;
        std::size_t s1 = vert.find('/');
        try {
          v = std::stol(vert.substr(0, s1));
          fields = 1;
          if (s1 != std::string::npos) {
            std::size_t s2 = vert.find('/', s1 + 1);
            std::string t = vert.substr(s1 + 1, s2 == std::string::npos ? s2 : s2 - s1 - 1);
            if (!t.empty()) vt = std::stol(t);
            if (s2 != std::string::npos && s2 + 1 < vert.size()) {
              vn = std::stol(vert.substr(s2 + 1));
              fields = 3;
            }
          }
        } catch (const std::exception&) {
          fail(obj_path, line_no, "malformed face vertex '" + vert + "'");
        }
        (void)vt;
        auto p = resolve_index(v, positions.size(), obj_path, line_no);
        long n = fields == 3 ? static_cast<long>(resolve_index(vn, normals.size(), obj_path, line_no)) : -1L;
        corners.push_back({p, n});
      }
      if (corners.size() < 3) fail(obj_path, line_no, "face needs at least 3 vertices");
      auto& pm = current();
      auto& mesh = pm.mesh;
      bool flat = false;
      for (auto& c : corners) flat = flat || c.second < 0;
      Vec3 fn = normalize(cross(positions[corners[1].first] - positions[corners[0].first],
          positions[corners[2].first] - positions[corners[0].first]));
      std::vector<std::uint32_t> ids;
      for (auto& c : corners) {
        if (flat) {
          // No normals: unshared vertices carrying the face normal.
          mesh.positions.push_back(positions[c.first]);
          mesh.normals.push_back(fn);
          ids.push_back(static_cast<std::uint32_t>(mesh.positions.size() - 1));
          continue;
        }
        auto [it, inserted] =
            pm.vertex_of.emplace(c, static_cast<std::uint32_t>(mesh.positions.size()));
        if (inserted) {
          mesh.positions.push_back(positions[c.first]);
          mesh.normals.push_back(normals[c.second]);
        }
        ids.push_back(it->second);
      }
      for (std::size_t k = 1; k + 1 < ids.size(); k++)
        mesh.triangles.push_back({ids[0], ids[k], ids[k + 1]});
    }
    // vt, s, mtllib and other statements are ignored.
  }

  std::filesystem::path meta = obj_path;
  meta.replace_extension(".meta");
  if (std::filesystem::exists(meta)) {
    read_scene_metadata(meta, data);
  } else {
    log_info("no metadata sidecar for ", obj_path.string(), "; using defaults");
  }

  std::map<std::string, std::uint32_t> material_index;
  for (std::uint32_t i = 0; i < data.materials.size(); i++) material_index[data.materials[i].name] = i;
  for (auto& pm : pending) {
    auto it = material_index.find(pm.material);
    if (it == material_index.end()) {
      if (pm.material != "default")
        log_warning("material '", pm.material, "' not defined in metadata; using defaults");
      Material m;
      m.name = pm.material;
      data.materials.push_back(m);
      it = material_index.emplace(pm.material, data.materials.size() - 1).first;
    }
    pm.mesh.material = it->second;
    data.meshes.push_back(std::move(pm.mesh));
  }
  return data;
}

void read_scene_metadata(const std::filesystem::path& meta_path, SceneData& data) {
  std::ifstream file(meta_path);
  if (!file) throw ParseError("cannot open metadata file " + meta_path.string());
  std::string text;
  int line_no = 0;
  while (std::getline(file, text)) {
    line_no++;
    if (auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
    LineReader r{std::istringstream(text), meta_path, line_no};
    std::string key;
    if (!(r.in >> key)) continue;
    if (key == "name") {
      data.name = r.token();
    } else if (key == "gravity") {
      data.gravity = r.vec3();
    } else if (key == "ambient") {
      data.ambient = r.vec3();
    } else if (key == "sky") {
      data.sky = r.vec3();
    } else if (key == "bounds") {
      Aabb b;
      b.lo = r.vec3();
      b.hi = r.vec3();
      data.bounds = b;
    } else if (key == "anchor") {
      data.anchors.push_back(r.vec3());
    } else if (key == "material") {
      Material m;
      m.name = r.token();
      while (!r.done()) {
        auto attr = r.token();
        if (attr == "color") m.color = r.vec3();
        else if (attr == "diffuse") m.diffuse = r.number();
        else if (attr == "specular") m.specular = r.number();
        else if (attr == "shininess") m.shininess = r.number();
        else if (attr == "unlit") m.unlit = true;
        else fail(meta_path, line_no, "unknown material attribute '" + attr + "'");
      }
      data.materials.push_back(m);
    } else if (key == "light") {
      Light l;
      auto kind = r.token();
      if (kind == "directional") {
        l.kind = LightKind::directional;
        l.direction = normalize(r.vec3());
      } else if (kind == "point") {
        l.kind = LightKind::point;
        l.position = r.vec3();
      } else {
        fail(meta_path, line_no, "unknown light kind '" + kind + "'");
      }
      while (!r.done()) {
        auto attr = r.token();
        if (attr == "color") l.color = r.vec3();
        else if (attr == "intensity") l.intensity = r.number();
        else fail(meta_path, line_no, "unknown light attribute '" + attr + "'");
      }
      for (int i = 0; i < 3; i++)
        if (l.color[i] < 0 || l.color[i] > 1) fail(meta_path, line_no, "light color outside [0,1]");
      if (l.intensity < 0) fail(meta_path, line_no, "negative light intensity");
      data.lights.push_back(l);
    } else if (key == "fog") {
      while (!r.done()) {
        auto attr = r.token();
        if (attr == "density") data.fog.density = r.number();
        else if (attr == "color") data.fog.color = r.vec3();
        else fail(meta_path, line_no, "unknown fog attribute '" + attr + "'");
      }
      if (!(data.fog.density >= 0) || !std::isfinite(data.fog.density))
        fail(meta_path, line_no, "fog density must be finite and >= 0");
    } else {
      fail(meta_path, line_no, "unknown statement '" + key + "'");
    }
  }
}

void write_obj_scene(const SceneData& data, const std::filesystem::path& obj_path) {
  std::ofstream obj(obj_path);
  if (!obj) throw Error("cannot write " + obj_path.string());
  obj << std::setprecision(17);
  obj << "# scene " << data.name << "\n";
  std::size_t base = 1;
  for (const auto& mesh : data.meshes) {
    obj << "o " << mesh.name << "\n";
    obj << "usemtl " << data.materials.at(mesh.material).name << "\n";
    for (const auto& p : mesh.positions) obj << "v " << p.x << " " << p.y << " " << p.z << "\n";
    for (const auto& n : mesh.normals) obj << "vn " << n.x << " " << n.y << " " << n.z << "\n";
    for (const auto& t : mesh.triangles) {
      obj << "f";
      for (auto i : t) obj << " " << base + i << "//" << base + i;
      obj << "\n";
    }
    base += mesh.positions.size();
  }

  std::filesystem::path meta_path = obj_path;
  meta_path.replace_extension(".meta");
  std::ofstream meta(meta_path);
  if (!meta) throw Error("cannot write " + meta_path.string());
  meta << std::setprecision(17);
  auto v3 = [](const Vec3& v) {
    std::ostringstream s;
    s << std::setprecision(17) << v.x << " " << v.y << " " << v.z;
    return s.str();
  };
  meta << "name " << data.name << "\n";
  meta << "gravity " << v3(data.gravity) << "\n";
  meta << "ambient " << v3(data.ambient) << "\n";
  meta << "sky " << v3(data.sky) << "\n";
  if (data.bounds) meta << "bounds " << v3(data.bounds->lo) << " " << v3(data.bounds->hi) << "\n";
  for (const auto& m : data.materials) {
    meta << "material " << m.name << " color " << v3(m.color) << " diffuse " << m.diffuse
         << " specular " << m.specular << " shininess " << m.shininess << (m.unlit ? " unlit" : "")
         << "\n";
  }
  for (const auto& l : data.lights) {
    if (l.kind == LightKind::directional)
      meta << "light directional " << v3(l.direction);
    else
      meta << "light point " << v3(l.position);
    meta << " color " << v3(l.color) << " intensity " << l.intensity << "\n";
  }
  meta << "fog density " << data.fog.density << " color " << v3(data.fog.color) << "\n";
  for (const auto& a : data.anchors) meta << "anchor " << v3(a) << "\n";
}

Scene load_scene(const std::filesystem::path& path, SceneFormat format) {
  if (format == SceneFormat::automatic) {
    auto s = path.string();
    if (s.rfind("builtin:", 0) == 0) return load_scene(s.substr(8), SceneFormat::builtin);
    format = path.extension() == ".obj" ? SceneFormat::obj : SceneFormat::builtin;
  }
  Scene scene(format == SceneFormat::builtin ? make_builtin_scene(path.string()) : read_obj_scene(path));
  if (scene.triangle_count() == 0) throw ParseError("scene " + path.string() + " is empty");
  return scene;
}

}  // namespace textworld
