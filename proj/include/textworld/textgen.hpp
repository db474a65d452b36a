#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "textworld/environment.hpp"
#include "textworld/image.hpp"
#include "textworld/regions.hpp"
#include "textworld/rng.hpp"
#include "textworld/scene.hpp"

namespace textworld {

// UTF-8 helpers. Decoding throws ParseError on malformed input.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);
std::string utf8_encode(char32_t c);

struct Glyph {
  char32_t code = 0;
  double advance = 0;  // pixels
  int left = 0;        // bitmap offset from the pen position
  int top = 0;         // bitmap top above the baseline
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> coverage;  // width * height, 0..255
};

// Pre-rasterized glyphs and metrics for one font at a reference size.
// File format: see docs/atlas_format.md.
class GlyphAtlas {
 public:
  static GlyphAtlas load(const std::filesystem::path& path);
  static GlyphAtlas parse(std::istream& in, const std::string& source = "<atlas>");

  const std::string& font_id() const { return font_id_; }
  double line_height() const { return line_height_; }
  double ascent() const { return ascent_; }
  double descent() const { return descent_; }

  const Glyph* find(char32_t c) const;
  bool supports(char32_t c) const { return find(c) != nullptr; }
  bool supports(std::u32string_view text) const;
  double advance(std::u32string_view text) const;
  std::vector<char32_t> charset() const;

  // Programmatic construction, used by tests.
  GlyphAtlas(std::string font_id, double line_height, double ascent, double descent);
  void add(Glyph glyph);

 private:
  GlyphAtlas() = default;
  std::string font_id_;
  double line_height_ = 0, ascent_ = 0, descent_ = 0;
  std::unordered_map<char32_t, Glyph> glyphs_;
};

// Word sequences for one language.
struct Corpus {
  std::string language;
  std::vector<std::vector<std::u32string>> lines;
  std::set<char32_t> inventory;

  // Reads every *.txt file under `dir` (sorted by name), one document per file.
  static Corpus load(const std::filesystem::path& dir, const std::string& language);
  static Corpus from_text(std::string_view text, const std::string& language);

  // Keeps only words every character of which some atlas renders; drops
  // lines left empty. Throws ConfigError if nothing remains.
  void restrict_to(const std::vector<const GlyphAtlas*>& fonts);
  std::size_t word_count() const;
};

struct TextConfig {
  double min_line_height = 0.08;  // world units; legibility floor
  double max_line_height = 0.5;
  int max_lines = 4;
  int max_skipped_words = 64;
  std::vector<Vec3> palette;  // sRGB in [0,1]; empty samples uniform RGB
  double min_luma_contrast = 30;  // 8-bit luma units, against the background
  Interval diffuse_ratio{0.0, 1.0};
  double lift_fraction = 1e-3;  // mesh lift, relative to the proposal's initial side

  void validate() const;
};

struct TextStyle {
  Vec3 fill;  // sRGB in [0,1]
  double diffuse_ratio = 1.0;
};

// Quads below are in text-image pixel coordinates, corners ordered
// top-left, top-right, bottom-right, bottom-left.
using Quad2 = std::array<Vec2, 4>;

struct CharBox {
  char32_t code = 0;
  Quad2 quad{};
  int word = 0;
};

struct WordBox {
  std::string text;  // UTF-8
  int first_char = 0;
  int char_count = 0;
  int line = 0;
  Quad2 quad{};
};

struct AlphaLevel {
  int width = 0, height = 0;
  std::vector<float> alpha;
};

struct TextAsset {
  Image8 rgba;          // fill color where stroked, alpha = coverage, zero elsewhere
  std::string content;  // words joined by single spaces, UTF-8
  std::vector<CharBox> chars;
  std::vector<WordBox> words;
  std::string font_id;
  std::string language;
  Vec3 fill;  // sRGB in [0,1]
  int line_count = 0;
  int line_capacity = 0;  // characters per line from the average advance
  double line_height = 0;  // world units
  std::vector<AlphaLevel> alpha_levels;  // mip chain of rgba alpha, level 0 full size

  // Character index whose cell contains the image point, if any.
  std::optional<int> locate(Vec2 p) const;
  // Rebuilds the mip chain after editing rgba.
  void rebuild_alpha_levels();

  struct LineCells {
    double top = 0, bottom = 0;
    int first_char = 0, char_count = 0;
  };
  std::vector<LineCells> line_cells;
};

// Lays out sampled corpus words into a region of width x height world units.
// nullopt means the region is rejected (too small, or no word fits).
std::optional<TextAsset> layout_text(double width, double height, const GlyphAtlas& font,
    const Corpus& corpus, const TextConfig& cfg, const TextStyle& style, Rng& rng);

// Planar textured quad lifted off a refined proposal.
struct TextMesh {
  std::array<Vec3, 4> corners{};  // top-left, top-right, bottom-right, bottom-left
  Vec3 normal;
  Vec3 right_axis, up_axis;
  double width = 0, height = 0;  // world units
  std::array<Vec2, 4> uv{};
  std::array<std::array<int, 3>, 2> triangles{{{0, 1, 2}, {0, 2, 3}}};
  Material material;
  std::shared_ptr<const TextAsset> asset;

  double area() const;
  // Image pixel coordinates to world, by the bilinear corner map.
  Vec3 world_point(Vec2 image_px) const;
  std::array<Vec3, 4> world_quad(const Quad2& quad) const;
  // World point on the mesh plane to image pixel coordinates.
  Vec2 image_point(const Vec3& world) const;
};

TextMesh build_text_mesh(std::shared_ptr<const TextAsset> asset, const RefinedProposal& proposal,
    const TextConfig& cfg, double diffuse_ratio);

// Fill color and diffuse ratio. `background` (sRGB in [0,1]) enables the
// contrast constraint for unconstrained color sampling.
TextStyle sample_style(const TextConfig& cfg, Rng& rng,
    std::optional<Vec3> background = std::nullopt);

double luma8(const Vec3& srgb);
double srgb_to_linear(double v);
double linear_to_srgb(double v);

}  // namespace textworld
