#include "textworld/renderer.hpp"

#include <algorithm>
#include <cmath>

#include "textworld/error.hpp"

namespace textworld {

namespace {

struct ClipVertex {
  Vec3 p;         // camera space
  double b1, b2;  // barycentric weights of the source triangle
};

struct ScreenVertex {
  double x, y;
  double inv_z;
  double b1_z, b2_z;  // attributes divided by depth
};

inline double edge(const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// Half-open ownership of pixels lying exactly on an edge; a shared edge is
// traversed in opposite directions by its two triangles, so one owns it.
inline bool owns_edge(const ScreenVertex& a, const ScreenVertex& b) {
  double dy = b.y - a.y, dx = b.x - a.x;
  return dy > 0 || (dy == 0 && dx < 0);
}

int clip_near(const ClipVertex in[3], ClipVertex out[4]) {
  int n = 0;
  for (int i = 0; i < 3; i++) {
    const ClipVertex& a = in[i];
    const ClipVertex& b = in[(i + 1) % 3];
    bool ain = a.p.z >= kNearPlane, bin = b.p.z >= kNearPlane;
    if (ain) out[n++] = a;
    if (ain != bin) {
      double t = (kNearPlane - a.p.z) / (b.p.z - a.p.z);
      ClipVertex c{lerp(a.p, b.p, t), a.b1 + (b.b1 - a.b1) * t, a.b2 + (b.b2 - a.b2) * t};
      c.p.z = kNearPlane;
      out[n++] = c;
    }
  }
  return n;
}

struct DepthTarget {
  int width, height;
  std::vector<double> z;
  GBuffer* g;
};

void raster_triangle(ScreenVertex a, ScreenVertex b, ScreenVertex c, std::uint32_t mesh,
    std::uint32_t tri, DepthTarget& target) {
  double area = edge(a, b, c.x, c.y);
  if (area == 0 || !std::isfinite(area)) return;
  if (area < 0) {
    std::swap(b, c);
    area = -area;
  }
  double minx = std::min({a.x, b.x, c.x}), maxx = std::max({a.x, b.x, c.x});
  double miny = std::min({a.y, b.y, c.y}), maxy = std::max({a.y, b.y, c.y});
  int x0 = std::max(0, static_cast<int>(std::ceil(minx - 0.5)));
  int x1 = std::min(target.width - 1, static_cast<int>(std::floor(maxx - 0.5)));
  int y0 = std::max(0, static_cast<int>(std::ceil(miny - 0.5)));
  int y1 = std::min(target.height - 1, static_cast<int>(std::floor(maxy - 0.5)));
  if (x0 > x1 || y0 > y1) return;
  const bool own0 = owns_edge(b, c), own1 = owns_edge(c, a), own2 = owns_edge(a, b);
  const double inv_area = 1.0 / area;
  GBuffer& g = *target.g;
  for (int y = y0; y <= y1; y++) {
    const double py = y + 0.5;
    for (int x = x0; x <= x1; x++) {
      const double px = x + 0.5;
      double w0 = edge(b, c, px, py);
      if (w0 < 0 || (w0 == 0 && !own0)) continue;
      double w1 = edge(c, a, px, py);
      if (w1 < 0 || (w1 == 0 && !own1)) continue;
      double w2 = edge(a, b, px, py);
      if (w2 < 0 || (w2 == 0 && !own2)) continue;
      double l0 = w0 * inv_area, l1 = w1 * inv_area, l2 = w2 * inv_area;
      double inv_z = l0 * a.inv_z + l1 * b.inv_z + l2 * c.inv_z;
      double z = 1.0 / inv_z;
      std::size_t idx = std::size_t(y) * target.width + x;
      if (!(z < target.z[idx])) continue;
      target.z[idx] = z;
      g.mesh.data[idx] = mesh;
      g.triangle.data[idx] = tri;
      g.barycentric.data[idx] = {static_cast<float>((l0 * a.b1_z + l1 * b.b1_z + l2 * c.b1_z) * z),
          static_cast<float>((l0 * a.b2_z + l1 * b.b2_z + l2 * c.b2_z) * z)};
    }
  }
}

Vec3 light_surface(const Material& m, const Vec3& base, const Vec3& p, const Vec3& n,
    const Vec3& eye, const Vec3& ambient, const EnvironmentOverlay& env) {
  Vec3 color;
  if (m.unlit) {
    color = base;
  } else {
    color = ambient * base;
    const Vec3 v = normalize(eye - p);
    for (const auto& light : env.lights) {
      Vec3 l;
      double atten = 1.0;
      if (light.kind == LightKind::directional) {
        l = -light.direction;
      } else {
        Vec3 d = light.position - p;
        double d2 = length_squared(d);
        l = d / std::sqrt(d2);
        atten = 1.0 / (1.0 + d2);
      }
      double ndl = dot(n, l);
      if (ndl <= 0) continue;
      Vec3 contrib = base * (m.diffuse * ndl);
      if (m.specular > 0) {
        double ndh = std::max(0.0, dot(n, normalize(l + v)));
        double s = m.specular * std::pow(ndh, m.shininess);
        contrib += Vec3{s, s, s};
      }
      color += light.color * (contrib * (light.intensity * atten));
    }
  }
  if (env.fog.density > 0) {
    double f = std::exp(-env.fog.density * distance(p, eye));
    color = color * f + env.fog.color * (1 - f);
  }
  return color;
}

// Text fragments for the meshes, masks and coverage, composited into `linear`.
struct TextPass {
  const Scene& scene;
  const EnvironmentOverlay& env;
  const Camera& camera;
  std::span<const TextMesh> text;
};

struct Fragment {
  std::uint32_t pixel;
  double z;
  std::int32_t mesh;
  std::int32_t character;  // -1 outside character cells
  float alpha;
  Vec3 color;
};

bool intersect_plane(const Camera& camera, const TextMesh& m, Vec2 pixel, Vec3& hit, double& t) {
  Vec3 dir = camera.ray_direction(pixel);
  double denom = dot(dir, m.normal);
  if (denom == 0) return false;
  t = dot(m.corners[0] - camera.position(), m.normal) / denom;
  if (!(t > 0)) return false;
  hit = camera.position() + dir * t;
  return true;
}

float sample_level(const AlphaLevel& level, double x, double y) {
  x -= 0.5;
  y -= 0.5;
  int ix = static_cast<int>(std::floor(x)), iy = static_cast<int>(std::floor(y));
  double fx = x - ix, fy = y - iy;
  auto at = [&](int px, int py) {
    px = std::clamp(px, 0, level.width - 1);
    py = std::clamp(py, 0, level.height - 1);
    return level.alpha[std::size_t(py) * level.width + px];
  };
  double top = at(ix, iy) * (1 - fx) + at(ix + 1, iy) * fx;
  double bottom = at(ix, iy + 1) * (1 - fx) + at(ix + 1, iy + 1) * fx;
  return static_cast<float>(top * (1 - fy) + bottom * fy);
}

// Trilinear alpha lookup; `footprint` is texels per screen pixel.
float sample_alpha(const TextAsset& asset, Vec2 ip, double footprint) {
  const auto& levels = asset.alpha_levels;
  double lod = footprint > 1 ? std::log2(footprint) : 0.0;
  int max_level = static_cast<int>(levels.size()) - 1;
  lod = std::min(lod, double(max_level));
  int l0 = static_cast<int>(std::floor(lod));
  int l1 = std::min(l0 + 1, max_level);
  double frac = lod - l0;
  auto at_level = [&](int l) {
    const auto& lv = levels[l];
    return sample_level(lv, ip.x * lv.width / levels[0].width, ip.y * lv.height / levels[0].height);
  };
  float a = at_level(l0);
  if (frac > 0 && l1 != l0) a = static_cast<float>(a * (1 - frac) + at_level(l1) * frac);
  return a;
}

void composite_text(const TextPass& pass, const Grid<float>& depth, std::vector<Vec3>* linear,
    FrameBuffers* masks) {
  const int W = depth.width, H = depth.height;
  const Camera& camera = pass.camera;
  std::vector<Fragment> fragments;
  if (masks) {
    masks->instance_coverage.assign(pass.text.size(), {});
    masks->word_coverage.clear();
    for (const auto& m : pass.text) masks->word_coverage.emplace_back(m.asset->words.size());
  }

  for (std::size_t mi = 0; mi < pass.text.size(); mi++) {
    const TextMesh& m = pass.text[mi];
    const TextAsset& asset = *m.asset;
    int x0 = 0, y0 = 0, x1 = W - 1, y1 = H - 1;
    bool bounded = true;
    double minx = kInf, miny = kInf, maxx = -kInf, maxy = -kInf;
    for (const auto& c : m.corners) {
      auto p = camera.project(c);
      if (!p) {
        bounded = false;
        break;
      }
      minx = std::min(minx, p->pixel.x);
      maxx = std::max(maxx, p->pixel.x);
      miny = std::min(miny, p->pixel.y);
      maxy = std::max(maxy, p->pixel.y);
    }
    if (bounded) {
      x0 = std::max(0, static_cast<int>(std::floor(minx)) - 1);
      y0 = std::max(0, static_cast<int>(std::floor(miny)) - 1);
      x1 = std::min(W - 1, static_cast<int>(std::ceil(maxx)) + 1);
      y1 = std::min(H - 1, static_cast<int>(std::ceil(maxy)) + 1);
    }
    const double scale = double(W) / camera.intrinsics().width;
    for (int y = y0; y <= y1; y++)
      for (int x = x0; x <= x1; x++) {
        Vec2 pixel{(x + 0.5) / scale, (y + 0.5) / scale};
        Vec3 p;
        double t;
        if (!intersect_plane(camera, m, pixel, p, t)) continue;
        Vec2 ip = m.image_point(p);
        if (!(ip.x >= 0 && ip.y >= 0 && ip.x < asset.rgba.width && ip.y < asset.rgba.height))
          continue;
        double z = dot(p - camera.position(), camera.forward());
        if (z < kNearPlane) continue;
        auto ch = asset.locate(ip);
        std::size_t idx = std::size_t(y) * W + x;
        bool visible = z < depth.data[idx];
        if (ch && masks) {
          masks->instance_coverage[mi].unoccluded++;
          masks->word_coverage[mi][asset.chars[*ch].word].unoccluded++;
        }
        if (!visible) continue;

        float alpha = 0;
        Vec3 color;
        if (linear) {
          Vec3 px_hit, py_hit;
          double tx, ty;
          double footprint = 1.0;
          if (intersect_plane(camera, m, pixel + Vec2{1 / scale, 0}, px_hit, tx) &&
              intersect_plane(camera, m, pixel + Vec2{0, 1 / scale}, py_hit, ty))
            footprint = std::max(length(m.image_point(px_hit) - ip), length(m.image_point(py_hit) - ip));
          alpha = sample_alpha(asset, ip, footprint);
          if (alpha > 0)
            color = light_surface(m.material, m.material.color, p, m.normal, camera.position(),
                pass.scene.ambient(), pass.env);
        }
        if (alpha > 0 || ch)
          fragments.push_back({static_cast<std::uint32_t>(idx), z, static_cast<std::int32_t>(mi),
              ch ? *ch : -1, alpha, color});
      }
  }

  std::sort(fragments.begin(), fragments.end(), [](const Fragment& a, const Fragment& b) {
    if (a.pixel != b.pixel) return a.pixel < b.pixel;
    if (a.z != b.z) return a.z > b.z;
    return a.mesh > b.mesh;
  });
  for (std::size_t i = 0; i < fragments.size();) {
    std::size_t j = i;
    while (j < fragments.size() && fragments[j].pixel == fragments[i].pixel) j++;
    const std::uint32_t idx = fragments[i].pixel;
    if (linear) {
      Vec3 c = (*linear)[idx];
      for (std::size_t k = i; k < j; k++)
        if (fragments[k].alpha > 0) {
          double a = fragments[k].alpha;
          c = fragments[k].color * a + c * (1 - a);
        }
      (*linear)[idx] = c;
    }
    if (masks) {
      // Nearest fragment that lies in a character cell.
      for (std::size_t k = j; k-- > i;) {
        if (fragments[k].character < 0) continue;
        const auto& f = fragments[k];
        const auto& asset = *pass.text[f.mesh].asset;
        int word = asset.chars[f.character].word;
        masks->instance.data[idx] = f.mesh;
        masks->word.data[idx] = word;
        masks->character.data[idx] = f.character;
        masks->instance_coverage[f.mesh].visible++;
        masks->word_coverage[f.mesh][word].visible++;
        break;
      }
    }
    i = j;
  }
}

std::vector<Vec3> shade_frame(const Scene& scene, const EnvironmentOverlay& env,
    const Camera& camera, const GBuffer& g) {
  std::vector<Vec3> linear(std::size_t(g.width) * g.height);
  for (int y = 0; y < g.height; y++)
    for (int x = 0; x < g.width; x++)
      linear[std::size_t(y) * g.width + x] = shade_scene_pixel(scene, env, camera, g, x, y);
  return linear;
}

}  // namespace

std::uint8_t encode_channel(double linear) {
  return static_cast<std::uint8_t>(std::lround(255.0 * linear_to_srgb(linear)));
}

GBuffer rasterize_scene(const Scene& scene, const Camera& camera) {
  const auto& in = camera.intrinsics();
  GBuffer g;
  g.width = in.width;
  g.height = in.height;
  g.depth = Grid<float>(in.width, in.height, std::numeric_limits<float>::infinity());
  g.mesh = Grid<std::uint32_t>(in.width, in.height, kNoMesh);
  g.triangle = Grid<std::uint32_t>(in.width, in.height, 0);
  g.barycentric = Grid<std::array<float, 2>>(in.width, in.height, {0.f, 0.f});
  DepthTarget target{in.width, in.height, std::vector<double>(g.depth.data.size(), kInf), &g};

  const double f = camera.focal();
  const double cx = 0.5 * in.width, cy = 0.5 * in.height;
  const auto& meshes = scene.meshes();
  for (std::uint32_t mi = 0; mi < meshes.size(); mi++) {
    const auto& mesh = meshes[mi];
    std::vector<Vec3> cam(mesh.positions.size());
    for (std::size_t i = 0; i < cam.size(); i++) cam[i] = camera.to_camera(mesh.positions[i]);
    for (std::uint32_t ti = 0; ti < mesh.triangles.size(); ti++) {
      const auto& t = mesh.triangles[ti];
      ClipVertex src[3] = {{cam[t[0]], 0, 0}, {cam[t[1]], 1, 0}, {cam[t[2]], 0, 1}};
      if (src[0].p.z < kNearPlane && src[1].p.z < kNearPlane && src[2].p.z < kNearPlane) continue;
      ClipVertex clipped[4];
      int n = clip_near(src, clipped);
      if (n < 3) continue;
      ScreenVertex sv[4];
      for (int i = 0; i < n; i++) {
        const auto& v = clipped[i];
        double iz = 1.0 / v.p.z;
        sv[i] = {cx + f * v.p.x * iz, cy - f * v.p.y * iz, iz, v.b1 * iz, v.b2 * iz};
      }
      for (int i = 1; i + 1 < n; i++) raster_triangle(sv[0], sv[i], sv[i + 1], mi, ti, target);
    }
  }
  for (std::size_t i = 0; i < target.z.size(); i++)
    g.depth.data[i] = static_cast<float>(target.z[i]);
  return g;
}

Vec3 shading_normal(const Scene& scene, std::uint32_t mesh, std::uint32_t triangle, float b1,
    float b2, const Vec3& view_dir) {
  const auto& m = scene.meshes()[mesh];
  const auto& t = m.triangles[triangle];
  const Vec3 &n0 = m.normals[t[0]], &n1 = m.normals[t[1]], &n2 = m.normals[t[2]];
  Vec3 n;
  if (n0 == n1 && n1 == n2) {
    n = n0;
  } else {
    n = n0 * (1.0 - b1 - b2) + n1 * double(b1) + n2 * double(b2);
    double len = length(n);
    n = len > 1e-12 ? n / len
                    : normalize(cross(m.positions[t[1]] - m.positions[t[0]],
                          m.positions[t[2]] - m.positions[t[0]]));
  }
  return dot(n, view_dir) > 0 ? -n : n;
}

Vec3 shade_scene_pixel(const Scene& scene, const EnvironmentOverlay& env, const Camera& camera,
    const GBuffer& g, int x, int y) {
  std::uint32_t mesh = g.mesh.at(x, y);
  if (mesh == kNoMesh) return scene.sky();
  Vec3 p = camera.unproject({x + 0.5, y + 0.5}, g.depth.at(x, y));
  Vec3 view = normalize(p - camera.position());
  auto b = g.barycentric.at(x, y);
  Vec3 n = shading_normal(scene, mesh, g.triangle.at(x, y), b[0], b[1], view);
  const Material& m = scene.material_of(mesh);
  return light_surface(m, m.color, p, n, camera.position(), scene.ambient(), env);
}

FrameBuffers render(const Scene& scene, const EnvironmentOverlay& env, const Camera& camera,
    std::span<const TextMesh> text, const RenderOptions& options) {
  const auto& in = camera.intrinsics();
  const int W = in.width, H = in.height;
  GBuffer g = rasterize_scene(scene, camera);

  FrameBuffers fb;
  fb.rgb = Image8(W, H, 3);
  fb.normals = NormalMap(W, H, {0.f, 0.f, 0.f});
  fb.depth = g.depth;
  fb.instance = Grid<std::int32_t>(W, H, -1);
  fb.word = Grid<std::int32_t>(W, H, -1);
  fb.character = Grid<std::int32_t>(W, H, -1);

  for (int y = 0; y < H; y++)
    for (int x = 0; x < W; x++) {
      std::uint32_t mesh = g.mesh.at(x, y);
      if (mesh == kNoMesh) continue;
      Vec3 p = camera.unproject({x + 0.5, y + 0.5}, g.depth.at(x, y));
      auto b = g.barycentric.at(x, y);
      Vec3 n = shading_normal(scene, mesh, g.triangle.at(x, y), b[0], b[1],
          normalize(p - camera.position()));
      Vec3 c = normalize(camera.direction_to_camera(n));
      fb.normals.at(x, y) = {static_cast<float>(c.x), static_cast<float>(c.y),
          static_cast<float>(c.z)};
    }

  TextPass pass{scene, env, camera, text};
  std::vector<Vec3> linear;
  if (!options.supersample) {
    linear = shade_frame(scene, env, camera, g);
    composite_text(pass, g.depth, &linear, &fb);
  } else {
    CameraIntrinsics in2 = in;
    in2.width *= 2;
    in2.height *= 2;
    Camera camera2(camera.pose(), in2, scene.gravity());
    GBuffer g2 = rasterize_scene(scene, camera2);
    std::vector<Vec3> fine = shade_frame(scene, env, camera2, g2);
    TextPass pass2{scene, env, camera2, text};
    composite_text(pass2, g2.depth, &fine, nullptr);
    composite_text(pass, g.depth, nullptr, &fb);
    linear.resize(std::size_t(W) * H);
    for (int y = 0; y < H; y++)
      for (int x = 0; x < W; x++) {
        Vec3 s;
        for (int dy = 0; dy < 2; dy++)
          for (int dx = 0; dx < 2; dx++) s += fine[std::size_t(2 * y + dy) * (2 * W) + 2 * x + dx];
        linear[std::size_t(y) * W + x] = s * 0.25;
      }
  }
  for (std::size_t i = 0; i < linear.size(); i++) {
    fb.rgb.pixels[3 * i + 0] = encode_channel(linear[i].x);
    fb.rgb.pixels[3 * i + 1] = encode_channel(linear[i].y);
    fb.rgb.pixels[3 * i + 2] = encode_channel(linear[i].z);
  }
  return fb;
}

void write_debug_buffers(const std::filesystem::path& stem, const FrameBuffers& frame) {
  const int W = frame.rgb.width, H = frame.rgb.height;
  std::vector<float> depth(frame.depth.data.begin(), frame.depth.data.end());
  write_raw_floats(stem.string() + "_depth.raw", W, H, 1, depth);
  std::vector<float> normals;
  normals.reserve(std::size_t(W) * H * 3);
  for (const auto& n : frame.normals.data) normals.insert(normals.end(), n.begin(), n.end());
  write_raw_floats(stem.string() + "_normal.raw", W, H, 3, normals);
  Image8 mask(W, H, 1);
  for (std::size_t i = 0; i < frame.instance.data.size(); i++)
    mask.pixels[i] = static_cast<std::uint8_t>(std::min(255, frame.instance.data[i] + 1));
  write_png(stem.string() + "_instance.png", mask);
}

}  // namespace textworld
