#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "textworld/camera.hpp"
#include "textworld/environment.hpp"
#include "textworld/image.hpp"
#include "textworld/regions.hpp"
#include "textworld/scene.hpp"
#include "textworld/textgen.hpp"

namespace textworld {

inline constexpr double kNearPlane = 0.01;
inline constexpr std::uint32_t kNoMesh = 0xffffffffu;

struct RenderOptions {
  bool supersample = false;  // 2x2 supersampling of the rgb buffer only
};

// Visible geometry per pixel. depth is camera-space z, +inf for sky.
struct GBuffer {
  int width = 0, height = 0;
  Grid<float> depth;
  Grid<std::uint32_t> mesh;
  Grid<std::uint32_t> triangle;
  Grid<std::array<float, 2>> barycentric;  // weights of vertices 1 and 2
};

struct TextCoverage {
  std::size_t visible = 0;     // pixels of text cells passing the scene depth test
  std::size_t unoccluded = 0;  // pixels of text cells ignoring scene geometry
  double fraction() const { return unoccluded ? double(visible) / unoccluded : 0.0; }
};

struct FrameBuffers {
  Image8 rgb;
  NormalMap normals;  // camera space, zero where no geometry
  Grid<float> depth;  // camera-space z, +inf for sky
  Grid<std::int32_t> instance;   // text mesh index, -1 for none
  Grid<std::int32_t> word;       // word index within the instance, -1 for none
  Grid<std::int32_t> character;  // char index within the instance, -1 for none
  std::vector<TextCoverage> instance_coverage;
  std::vector<std::vector<TextCoverage>> word_coverage;
};

GBuffer rasterize_scene(const Scene& scene, const Camera& camera);

// Linear RGB for one scene pixel of a G-buffer.
Vec3 shade_scene_pixel(const Scene& scene, const EnvironmentOverlay& env, const Camera& camera,
    const GBuffer& gbuffer, int x, int y);

FrameBuffers render(const Scene& scene, const EnvironmentOverlay& env, const Camera& camera,
    std::span<const TextMesh> text, const RenderOptions& options = {});

// Interpolated surface normal, flipped to face against `view_dir`.
Vec3 shading_normal(const Scene& scene, std::uint32_t mesh, std::uint32_t triangle, float b1,
    float b2, const Vec3& view_dir);

std::uint8_t encode_channel(double linear);

void write_debug_buffers(const std::filesystem::path& stem, const FrameBuffers& frame);

}  // namespace textworld
