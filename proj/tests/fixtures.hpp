#pragma once
// Shared helpers for tests that need text meshes.

#include <memory>

#include "textworld/pipeline.hpp"
#include "textworld/regions.hpp"
#include "textworld/textgen.hpp"

namespace fixture {

using namespace textworld;

inline const GlyphAtlas& sans() {
  static GlyphAtlas atlas = GlyphAtlas::load(data_dir() / "atlases" / "DejaVuSans.atlas");
  return atlas;
}

inline const Corpus& english() {
  static Corpus corpus = [] {
    Corpus c = Corpus::load(data_dir() / "corpus" / "en", "en");
    c.restrict_to({&sans()});
    return c;
  }();
  return corpus;
}

// Axis-aligned rectangle on a plane, centered at `anchor`.
inline RefinedProposal plane_proposal(std::uint32_t mesh, Vec3 anchor, Vec3 normal, Vec3 right,
    double width, double height) {
  RefinedProposal p;
  p.mesh = mesh;
  p.anchor = anchor;
  p.normal = normal;
  p.right_axis = right;
  p.up_axis = cross(normal, right);
  p.initial_side = std::min(width, height);
  p.left = p.right = width / 2;
  p.down = p.up = height / 2;
  return p;
}

inline std::optional<TextMesh> text_on(const RefinedProposal& p, std::uint64_t seed,
    const TextConfig& cfg = {}) {
  Rng rng(seed);
  TextStyle style{{0.05, 0.05, 0.05}, 1.0};
  auto asset = layout_text(p.width(), p.height(), sans(), english(), cfg, style, rng);
  if (!asset) return std::nullopt;
  return build_text_mesh(std::make_shared<TextAsset>(std::move(*asset)), p, cfg, style.diffuse_ratio);
}

}  // namespace fixture
