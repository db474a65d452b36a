#include <sstream>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "textworld/error.hpp"
#include "textworld/procedural.hpp"
#include "textworld/renderer.hpp"

using namespace textworld;

namespace {

const char* kTinyAtlas =
    "textworld-glyph-atlas 1\n"
    "font tiny\n"
    "line_height 10\n"
    "ascent 7\n"
    "descent 2\n"
    "glyph 32 4 0 0 0 0\n"
    "glyph 65 6 1 7 2 2\n"
    "f0\n"
    "0f\n"
    "end\n";

// Pixel centers inside a convex polygon.
std::vector<std::size_t> rasterize(const Polygon& poly, int w, int h) {
  std::vector<std::size_t> out;
  if (poly.size() < 3) return out;
  for (int y = 0; y < h; y++)
    for (int x = 0; x < w; x++)
      if (contains_convex(poly, {x + 0.5, y + 0.5})) out.push_back(std::size_t(y) * w + x);
  return out;
}

}  // namespace

TEST_CASE("atlas text format parses") {
  std::istringstream in(kTinyAtlas);
  auto atlas = GlyphAtlas::parse(in);
  CHECK(atlas.font_id() == "tiny");
  CHECK(atlas.line_height() == 10);
  CHECK(atlas.ascent() == 7);
  CHECK(atlas.descent() == 2);
  REQUIRE(atlas.find(U'A'));
  const auto* a = atlas.find(U'A');
  CHECK(a->width == 2);
  CHECK(a->coverage == std::vector<std::uint8_t>{255, 0, 0, 255});
  CHECK(atlas.advance(U"A A") == 16);
  CHECK(atlas.supports(U"AA"));
  CHECK_FALSE(atlas.supports(U"AB"));
}

TEST_CASE("malformed atlases are rejected") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return GlyphAtlas::parse(in);
  };
  CHECK_THROWS_AS(parse("not-an-atlas 1\n"), ParseError);
  std::string no_space = kTinyAtlas;
  no_space.erase(no_space.find("glyph 32"), std::string("glyph 32 4 0 0 0 0\n").size());
  CHECK_THROWS_AS(parse(no_space), ParseError);
  std::string short_rows = kTinyAtlas;
  short_rows.erase(short_rows.find("0f\n"), 3);
  CHECK_THROWS_AS(parse(short_rows), ParseError);
}

TEST_CASE("bundled atlases cover their corpora") {
  for (const char* lang : {"en", "ru", "el"}) {
    Corpus c = Corpus::load(data_dir() / "corpus" / lang, lang);
    std::size_t before = c.word_count();
    c.restrict_to({&fixture::sans()});
    CHECK(c.word_count() == before);
  }
}

TEST_CASE("corpus restriction drops unsupported words") {
  std::istringstream in(kTinyAtlas);
  auto atlas = GlyphAtlas::parse(in);
  Corpus c = Corpus::from_text("AA AB A\nBB\n", "xx");
  c.restrict_to({&atlas});
  CHECK(c.word_count() == 2);
  CHECK(c.lines.size() == 1);
  Corpus none = Corpus::from_text("BB\n", "xx");
  CHECK_THROWS_AS(none.restrict_to({&atlas}), ConfigError);
}

TEST_CASE("line height equal to the region height gives one line") {
  TextConfig cfg;
  cfg.min_line_height = 0.3;
  Rng rng(1);
  auto asset = layout_text(0.3 * 8, 0.3, fixture::sans(), fixture::english(), cfg, {}, rng);
  REQUIRE(asset);
  CHECK(asset->line_count == 1);
  CHECK(asset->line_height == doctest::Approx(0.3));
}

TEST_CASE("zero-width regions are rejected") {
  Rng rng(1);
  CHECK_FALSE(layout_text(0, 1, fixture::sans(), fixture::english(), {}, {}, rng).has_value());
  CHECK_FALSE(layout_text(1, 0, fixture::sans(), fixture::english(), {}, {}, rng).has_value());
}

TEST_CASE("tall regions are capped at the maximum line count") {
  Rng rng(1);
  TextConfig cfg;
  auto tall = layout_text(3, 3, fixture::sans(), fixture::english(), cfg, {}, rng);
  REQUIRE(tall);
  CHECK(tall->line_count <= cfg.max_lines);
  CHECK(tall->line_height <= cfg.max_line_height);
}

TEST_CASE("region shorter than the legibility floor is rejected") {
  Rng rng(1);
  CHECK_FALSE(layout_text(2, 0.05, fixture::sans(), fixture::english(), {}, {}, rng).has_value());
}

TEST_CASE("random layouts respect the image bounds") {
  const auto& font = fixture::sans();
  Rng rng(123);
  int produced = 0;
  for (int i = 0; i < 1000; i++) {
    double w = rng.uniform(0.05, 4), h = rng.uniform(0.05, 2);
    auto asset = layout_text(w, h, font, fixture::english(), {}, {}, rng);
    if (!asset) continue;
    produced++;
    const int iw = asset->rgba.width, ih = asset->rgba.height;
    for (const auto& c : asset->chars)
      for (const auto& p : c.quad) {
        REQUIRE(p.x >= 0);
        REQUIRE(p.y >= 0);
        REQUIRE(p.x <= iw);
        REQUIRE(p.y <= ih);
      }
    for (const auto& cells : asset->line_cells) {
      double sum = 0;
      int last_word = -1;
      for (int k = cells.first_char; k < cells.first_char + cells.char_count; k++) {
        const auto& c = asset->chars[k];
        if (last_word >= 0 && c.word != last_word) sum += font.find(U' ')->advance;
        sum += font.find(c.code)->advance;
        last_word = c.word;
      }
      CHECK(sum <= iw + 1e-9);
    }
    CHECK(asset->line_count * font.line_height() <= ih + 1e-9);
    CHECK(asset->line_count * asset->line_height <= h + 1e-9);
    CHECK(asset->line_height >= TextConfig{}.min_line_height - 1e-12);
  }
  CHECK(produced > 500);
}

TEST_CASE("characters round trip to content") {
  Rng rng(8);
  for (int i = 0; i < 100; i++) {
    auto asset = layout_text(3, 1, fixture::sans(), fixture::english(), {}, {}, rng);
    REQUIRE(asset);
    std::string joined;
    for (std::size_t w = 0; w < asset->words.size(); w++) {
      const auto& word = asset->words[w];
      std::u32string chars;
      for (int k = word.first_char; k < word.first_char + word.char_count; k++) {
        CHECK(asset->chars[k].word == int(w));
        chars.push_back(asset->chars[k].code);
      }
      CHECK(utf8_encode(chars) == word.text);
      if (w) joined += ' ';
      joined += word.text;
    }
    CHECK(joined == asset->content);
  }
}

TEST_CASE("character cells locate their own centers") {
  Rng rng(4);
  auto asset = layout_text(3, 1, fixture::sans(), fixture::english(), {}, {}, rng);
  REQUIRE(asset);
  for (std::size_t k = 0; k < asset->chars.size(); k++) {
    const auto& q = asset->chars[k].quad;
    if (q[1].x - q[0].x <= 0) continue;
    Vec2 c = (q[0] + q[2]) * 0.5;
    auto hit = asset->locate(c);
    REQUIRE(hit);
    CHECK(*hit == int(k));
  }
}

TEST_CASE("unit square proposal builds a unit mesh") {
  auto p = fixture::plane_proposal(0, {0, 0, 0}, {0, -1, 0}, {1, 0, 0}, 1, 1);
  TextConfig cfg;
  Rng rng(2);
  auto asset = layout_text(1, 1, fixture::sans(), fixture::english(), cfg, {}, rng);
  REQUIRE(asset);
  auto mesh = build_text_mesh(std::make_shared<TextAsset>(*asset), p, cfg, 0.7);
  CHECK(std::abs(mesh.area() - 1.0) <= 1e-6);
  CHECK(mesh.triangles.size() == 2);
  CHECK(mesh.material.diffuse == doctest::Approx(0.7));
  CHECK(mesh.material.specular == doctest::Approx(0.3));
  Vec3 lift = p.normal * (cfg.lift_fraction * p.initial_side);
  Vec2 mid{asset->rgba.width / 2.0, asset->rgba.height / 2.0};
  CHECK(distance(mesh.world_point(mid), p.center() + lift) <= 1e-6);
  Rng r(3);
  for (int i = 0; i < 100; i++) {
    Vec2 px{r.uniform(0, asset->rgba.width), r.uniform(0, asset->rgba.height)};
    Vec2 back = mesh.image_point(mesh.world_point(px));
    CHECK(std::abs(back.x - px.x) < 1e-6);
    CHECK(std::abs(back.y - px.y) < 1e-6);
  }
}

TEST_CASE("single-color palette always yields that color") {
  TextConfig cfg;
  cfg.palette = {{0.2, 0.4, 0.6}};
  Rng rng(1);
  for (int i = 0; i < 100; i++) {
    auto s = sample_style(cfg, rng, Vec3{0.2, 0.4, 0.6});
    CHECK(s.fill.x == 0.2);
    CHECK(s.fill.y == 0.4);
    CHECK(s.fill.z == 0.6);
  }
}

TEST_CASE("style sampling is deterministic per seed") {
  TextConfig cfg;
  Rng a(9), b(9);
  for (int i = 0; i < 100; i++) {
    auto x = sample_style(cfg, a, Vec3{0.5, 0.5, 0.5});
    auto y = sample_style(cfg, b, Vec3{0.5, 0.5, 0.5});
    CHECK(x.fill.x == y.fill.x);
    CHECK(x.fill.y == y.fill.y);
    CHECK(x.fill.z == y.fill.z);
    CHECK(x.diffuse_ratio == y.diffuse_ratio);
  }
}

TEST_CASE("diffuse ratios cover the interval") {
  TextConfig cfg;
  Rng rng(10);
  double lo = 1, hi = 0;
  for (int i = 0; i < 10000; i++) {
    double r = sample_style(cfg, rng).diffuse_ratio;
    REQUIRE(r >= 0);
    REQUIRE(r <= 1);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo < 0.05);
  CHECK(hi > 0.95);
}

TEST_CASE("sampled colors contrast with the background") {
  TextConfig cfg;
  Rng rng(6);
  Rng bg(7);
  for (int i = 0; i < 500; i++) {
    Vec3 back{bg.uniform(), bg.uniform(), bg.uniform()};
    auto s = sample_style(cfg, rng, back);
    CHECK(std::abs(luma8(s.fill) - luma8(back)) >= cfg.min_luma_contrast - 1e-9);
  }
}

TEST_CASE("rendered characters match their projected quads") {
  Scene s(make_single_wall());
  CameraIntrinsics k;
  k.width = 640;
  k.height = 480;
  Camera cam({{0, 5, 1.7}, 0, kPi / 2, 0}, k, s.gravity());
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 5; seed++) {
    auto p = fixture::plane_proposal(1, {0, 8, 1.7}, {0, -1, 0}, {1, 0, 0}, 2, 1);
    auto mesh = fixture::text_on(p, seed);
    REQUIRE(mesh);
    std::vector<TextMesh> text{*mesh};
    auto fb = render(s, base_environment(s), cam, text);
    for (std::size_t c = 0; c < mesh->asset->chars.size(); c++) {
      const auto& ch = mesh->asset->chars[c];
      if (ch.quad[1].x - ch.quad[0].x <= 0) continue;
      Polygon poly;
      for (const auto& w : mesh->world_quad(ch.quad)) poly.push_back(cam.project(w)->pixel);
      auto inside = rasterize(poly, k.width, k.height);
      std::size_t mask = 0, both = 0;
      for (std::size_t i = 0; i < fb.character.data.size(); i++) mask += fb.character.data[i] == int(c);
      for (auto i : inside) both += fb.character.data[i] == int(c);
      double iou = double(both) / double(inside.size() + mask - both);
      CAPTURE(c);
      CHECK(iou >= 0.9);
      checked++;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("utf8 handles multilingual text") {
  std::string s = "Привет Γειά";
  auto u = utf8_decode(s);
  CHECK(u.size() == 11);
  CHECK(utf8_encode(u) == s);
}
