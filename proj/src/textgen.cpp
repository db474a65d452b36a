#include "textworld/textgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "textworld/error.hpp"

namespace textworld {

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    auto b = static_cast<unsigned char>(text[i]);
    int extra;
    char32_t c;
    if (b < 0x80) {
      c = b;
      extra = 0;
    } else if ((b & 0xe0) == 0xc0) {
      c = b & 0x1f;
      extra = 1;
    } else if ((b & 0xf0) == 0xe0) {
      c = b & 0x0f;
      extra = 2;
    } else if ((b & 0xf8) == 0xf0) {
      c = b & 0x07;
      extra = 3;
    } else {
      throw ParseError("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + extra >= text.size() && extra > 0)
      throw ParseError("truncated UTF-8 sequence at offset " + std::to_string(i));
    for (int k = 1; k <= extra; k++) {
      auto cb = static_cast<unsigned char>(text[i + k]);
      if ((cb & 0xc0) != 0x80)
        throw ParseError("invalid UTF-8 continuation at offset " + std::to_string(i + k));
      c = (c << 6) | (cb & 0x3f);
    }
    static constexpr char32_t kMin[4] = {0, 0x80, 0x800, 0x10000};
    if (c < kMin[extra] || c > 0x10ffff || (c >= 0xd800 && c <= 0xdfff))
      throw ParseError("invalid UTF-8 code point at offset " + std::to_string(i));
    out.push_back(c);
    i += extra + 1;
  }
  return out;
}

std::string utf8_encode(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out += char(c);
  } else if (c < 0x800) {
    out += char(0xc0 | (c >> 6));
    out += char(0x80 | (c & 0x3f));
  } else if (c < 0x10000) {
    out += char(0xe0 | (c >> 12));
    out += char(0x80 | ((c >> 6) & 0x3f));
    out += char(0x80 | (c & 0x3f));
  } else {
    out += char(0xf0 | (c >> 18));
    out += char(0x80 | ((c >> 12) & 0x3f));
    out += char(0x80 | ((c >> 6) & 0x3f));
    out += char(0x80 | (c & 0x3f));
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  for (char32_t c : text) out += utf8_encode(c);
  return out;
}

// ---------------------------------------------------------------- atlas

GlyphAtlas::GlyphAtlas(std::string font_id, double line_height, double ascent, double descent)
    : font_id_(std::move(font_id)), line_height_(line_height), ascent_(ascent), descent_(descent) {
  if (!(line_height > 0) || !(ascent > 0) || descent < 0 || ascent + descent > line_height + 1e-9)
    throw ParseError("atlas " + font_id_ + ": inconsistent line metrics");
}

void GlyphAtlas::add(Glyph glyph) {
  if (glyph.width < 0 || glyph.height < 0 ||
      glyph.coverage.size() != std::size_t(glyph.width) * glyph.height)
    throw ParseError("atlas " + font_id_ + ": bad bitmap for U+" + std::to_string(glyph.code));
  if (!(glyph.advance >= 0)) throw ParseError("atlas " + font_id_ + ": negative advance");
  glyphs_[glyph.code] = std::move(glyph);
}

const Glyph* GlyphAtlas::find(char32_t c) const {
  auto it = glyphs_.find(c);
  return it == glyphs_.end() ? nullptr : &it->second;
}

bool GlyphAtlas::supports(std::u32string_view text) const {
  return std::all_of(text.begin(), text.end(), [&](char32_t c) { return supports(c); });
}

double GlyphAtlas::advance(std::u32string_view text) const {
  double a = 0;
  for (char32_t c : text)
    if (auto* g = find(c)) a += g->advance;
  return a;
}

std::vector<char32_t> GlyphAtlas::charset() const {
  std::vector<char32_t> out;
  for (const auto& [c, g] : glyphs_) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

GlyphAtlas GlyphAtlas::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open atlas " + path.string());
  return parse(in, path.string());
}

GlyphAtlas GlyphAtlas::parse(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      line_no++;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& what) {
    throw ParseError(source + ":" + std::to_string(line_no) + ": " + what);
  };

  if (!next_line() || line != "textworld-glyph-atlas 1") fail("missing atlas header");
  std::string font;
  double line_height = 0, ascent = 0, descent = -1;
  std::vector<Glyph> glyphs;
  bool ended = false;
  while (next_line()) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "font") {
      ss >> font;
    } else if (key == "line_height") {
      ss >> line_height;
    } else if (key == "ascent") {
      ss >> ascent;
    } else if (key == "descent") {
      ss >> descent;
    } else if (key == "glyph") {
      Glyph g;
      std::uint32_t code;
      if (!(ss >> code >> g.advance >> g.left >> g.top >> g.width >> g.height))
        fail("malformed glyph record");
      g.code = code;
      if (g.width < 0 || g.height < 0 || g.width > 4096 || g.height > 4096)
        fail("glyph size out of range");
      g.coverage.resize(std::size_t(g.width) * g.height);
      for (int y = 0; y < g.height; y++) {
        if (!std::getline(in, line)) fail("truncated glyph bitmap");
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (static_cast<int>(line.size()) != g.width) fail("bitmap row has wrong width");
        for (int x = 0; x < g.width; x++) {
          char h = line[x];
          int v = h >= '0' && h <= '9' ? h - '0' : h >= 'a' && h <= 'f' ? h - 'a' + 10 : -1;
          if (v < 0) fail("bad coverage digit");
          g.coverage[std::size_t(y) * g.width + x] = static_cast<std::uint8_t>(v * 17);
        }
      }
      glyphs.push_back(std::move(g));
    } else if (key == "end") {
      ended = true;
      break;
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!ended) fail("missing end marker");
  if (font.empty()) fail("missing font id");
  GlyphAtlas atlas(font, line_height, ascent, std::max(0.0, descent));
  for (auto& g : glyphs) atlas.add(std::move(g));
  if (!atlas.supports(U' ')) fail("atlas must define the space glyph");
  return atlas;
}

// ---------------------------------------------------------------- corpus

namespace {

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\r' || c == U'\n' || c == 0xa0 ||
         (c >= 0x2000 && c <= 0x200b) || c == 0x3000 || c == 0xfeff;
}

void add_document(Corpus& corpus, std::string_view text) {
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto decoded = utf8_decode(text.substr(start, end - start));
    std::vector<std::u32string> words;
    std::u32string word;
    for (char32_t c : decoded) {
      if (is_space(c)) {
        if (!word.empty()) words.push_back(std::move(word));
        word.clear();
      } else if (c >= 0x20 && c != 0x7f) {
        word.push_back(c);
      }
    }
    if (!word.empty()) words.push_back(std::move(word));
    if (!words.empty()) {
      for (const auto& w : words) corpus.inventory.insert(w.begin(), w.end());
      corpus.lines.push_back(std::move(words));
    }
    start = end + 1;
  }
}

}  // namespace

Corpus Corpus::from_text(std::string_view text, const std::string& language) {
  Corpus c;
  c.language = language;
  add_document(c, text);
  return c;
}

Corpus Corpus::load(const std::filesystem::path& dir, const std::string& language) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_regular_file(dir)) {
    files.push_back(dir);
  } else if (std::filesystem::is_directory(dir)) {
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
  } else {
    throw ConfigError("corpus path not found: " + dir.string());
  }
  Corpus c;
  c.language = language;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      add_document(c, ss.str());
    } catch (const ParseError& e) {
      throw ParseError(f.string() + ": " + e.what());
    }
  }
  if (c.lines.empty()) throw ConfigError("corpus " + dir.string() + " has no text");
  return c;
}

void Corpus::restrict_to(const std::vector<const GlyphAtlas*>& fonts) {
  inventory.clear();
  std::vector<std::vector<std::u32string>> kept;
  for (auto& line : lines) {
    std::vector<std::u32string> words;
    for (auto& w : line) {
      bool ok = std::any_of(fonts.begin(), fonts.end(),
          [&](const GlyphAtlas* f) { return f->supports(w); });
      if (!ok) continue;
      inventory.insert(w.begin(), w.end());
      words.push_back(std::move(w));
    }
    if (!words.empty()) kept.push_back(std::move(words));
  }
  lines = std::move(kept);
  if (lines.empty())
    throw ConfigError("corpus '" + language + "' has no words renderable by its fonts");
}

std::size_t Corpus::word_count() const {
  std::size_t n = 0;
  for (const auto& l : lines) n += l.size();
  return n;
}

// ---------------------------------------------------------------- layout

void TextConfig::validate() const {
  if (!(min_line_height > 0) || !(max_line_height >= min_line_height))
    throw ConfigError("text line height bounds must satisfy 0 < min <= max");
  if (max_lines < 1) throw ConfigError("text max_lines must be >= 1");
  if (!(diffuse_ratio.lo >= 0 && diffuse_ratio.hi <= 1 && diffuse_ratio.lo <= diffuse_ratio.hi))
    throw ConfigError("diffuse ratio range must lie within [0, 1]");
  if (!(lift_fraction > 0)) throw ConfigError("text lift must be > 0");
  if (min_luma_contrast < 0 || min_luma_contrast > 127)
    throw ConfigError("luma contrast must lie in [0, 127]");
  for (const auto& c : palette)
    if (c.x < 0 || c.x > 1 || c.y < 0 || c.y > 1 || c.z < 0 || c.z > 1)
      throw ConfigError("palette colors must lie in [0, 1]");
}

std::optional<int> TextAsset::locate(Vec2 p) const {
  for (const auto& line : line_cells) {
    if (p.y < line.top || p.y >= line.bottom) continue;
    auto first = chars.begin() + line.first_char;
    auto last = first + line.char_count;
    auto it = std::upper_bound(first, last, p.x,
        [](double x, const CharBox& c) { return x < c.quad[0].x; });
    if (it == first) return std::nullopt;
    --it;
    if (p.x < it->quad[1].x) return static_cast<int>(it - chars.begin());
    return std::nullopt;
  }
  return std::nullopt;
}

void TextAsset::rebuild_alpha_levels() {
  alpha_levels.clear();
  AlphaLevel base{rgba.width, rgba.height, std::vector<float>(std::size_t(rgba.width) * rgba.height)};
  for (int y = 0; y < rgba.height; y++)
    for (int x = 0; x < rgba.width; x++)
      base.alpha[std::size_t(y) * rgba.width + x] = rgba.at(x, y)[3] / 255.0f;
  alpha_levels.push_back(std::move(base));
  while (alpha_levels.back().width > 1 || alpha_levels.back().height > 1) {
    const auto& src = alpha_levels.back();
    AlphaLevel dst{(src.width + 1) / 2, (src.height + 1) / 2, {}};
    dst.alpha.resize(std::size_t(dst.width) * dst.height);
    for (int y = 0; y < dst.height; y++)
      for (int x = 0; x < dst.width; x++) {
        float sum = 0;
        for (int dy = 0; dy < 2; dy++)
          for (int dx = 0; dx < 2; dx++) {
            int sx = std::min(src.width - 1, 2 * x + dx), sy = std::min(src.height - 1, 2 * y + dy);
            sum += src.alpha[std::size_t(sy) * src.width + sx];
          }
        dst.alpha[std::size_t(y) * dst.width + x] = sum * 0.25f;
      }
    alpha_levels.push_back(std::move(dst));
  }
}

namespace {

struct WordCursor {
  const Corpus& corpus;
  std::size_t line, word;
  const std::u32string& peek() const { return corpus.lines[line][word]; }
  void advance() {
    if (++word >= corpus.lines[line].size()) {
      word = 0;
      line = (line + 1) % corpus.lines.size();
    }
  }
};

}  // namespace

std::optional<TextAsset> layout_text(double width, double height, const GlyphAtlas& font,
    const Corpus& corpus, const TextConfig& cfg, const TextStyle& style, Rng& rng) {
  if (!(width > 0) || !(height > 0) || corpus.lines.empty()) return std::nullopt;
  const double lh_lo =
      std::max(cfg.min_line_height, std::min(height / cfg.max_lines, cfg.max_line_height));
  const double lh_hi = std::min(cfg.max_line_height, height);
  if (lh_lo > lh_hi) return std::nullopt;
  const double lh = lh_lo == lh_hi ? lh_lo : rng.uniform(lh_lo, lh_hi);
  const int lines = std::clamp(static_cast<int>(std::floor(height / lh)), 1, cfg.max_lines);

  // Text image at the atlas reference size.
  const double scale = lh / font.line_height();  // world units per atlas pixel
  const int image_w = std::max(1, static_cast<int>(std::ceil(width / scale - 1e-9)));
  const int image_h = std::max(1, static_cast<int>(std::ceil(height / scale - 1e-9)));
  const double line_px = font.line_height();
  const double space = font.find(U' ') ? font.find(U' ')->advance : 0.0;

  double advance_sum = 0;
  int advance_count = 0;
  for (char32_t c : corpus.inventory)
    if (auto* g = font.find(c)) {
      advance_sum += g->advance;
      advance_count++;
    }
  const int capacity =
      advance_count && advance_sum > 0 ? static_cast<int>(image_w / (advance_sum / advance_count)) : 0;
  if (capacity < 1) return std::nullopt;

  std::size_t start_line = rng.index(corpus.lines.size());
  WordCursor cursor{corpus, start_line, rng.index(corpus.lines[start_line].size())};
  std::vector<std::vector<std::u32string>> placed;
  std::vector<double> line_widths;
  int skipped = 0;
  for (int l = 0; l < lines && skipped <= cfg.max_skipped_words; l++) {
    std::vector<std::u32string> words;
    double used = 0;
    while (skipped <= cfg.max_skipped_words) {
      const auto& w = cursor.peek();
      double adv = font.advance(w);
      if (!font.supports(w) || !(adv > 0)) {
        cursor.advance();
        skipped++;
        continue;
      }
      double need = words.empty() ? adv : used + space + adv;
      if (need <= image_w) {
        words.push_back(w);
        used = need;
        cursor.advance();
      } else if (words.empty()) {
        cursor.advance();
        skipped++;
      } else {
        break;
      }
    }
    if (words.empty()) break;
    placed.push_back(std::move(words));
    line_widths.push_back(used);
  }
  if (placed.empty()) return std::nullopt;

  TextAsset asset;
  asset.rgba = Image8(image_w, image_h, 4);
  asset.font_id = font.font_id();
  asset.language = corpus.language;
  asset.fill = style.fill;
  asset.line_count = static_cast<int>(placed.size());
  asset.line_capacity = capacity;
  asset.line_height = lh;

  const std::uint8_t fill8[3] = {
      static_cast<std::uint8_t>(std::lround(std::clamp(style.fill.x, 0.0, 1.0) * 255)),
      static_cast<std::uint8_t>(std::lround(std::clamp(style.fill.y, 0.0, 1.0) * 255)),
      static_cast<std::uint8_t>(std::lround(std::clamp(style.fill.z, 0.0, 1.0) * 255))};
  const double block_top = std::floor((image_h - asset.line_count * line_px) / 2);
  const double glyph_pad = (line_px - font.ascent() - font.descent()) / 2;

  for (int l = 0; l < asset.line_count; l++) {
    const double baseline = std::round(block_top + l * line_px + glyph_pad + font.ascent());
    const double cell_top = std::max(0.0, baseline - font.ascent());
    const double cell_bottom = std::min<double>(image_h, baseline + font.descent());
    TextAsset::LineCells cells{cell_top, cell_bottom, static_cast<int>(asset.chars.size()), 0};
    double pen = std::floor((image_w - line_widths[l]) / 2);
    for (std::size_t wi = 0; wi < placed[l].size(); wi++) {
      const auto& w = placed[l][wi];
      if (wi > 0) pen += space;
      WordBox word;
      word.text = utf8_encode(w);
      word.first_char = static_cast<int>(asset.chars.size());
      word.char_count = static_cast<int>(w.size());
      word.line = l;
      const double word_left = pen;
      for (char32_t c : w) {
        const Glyph& g = *font.find(c);
        const int ox = static_cast<int>(std::lround(pen)) + g.left;
        const int oy = static_cast<int>(baseline) - g.top;
        for (int y = 0; y < g.height; y++)
          for (int x = 0; x < g.width; x++) {
            std::uint8_t a = g.coverage[std::size_t(y) * g.width + x];
            int px = ox + x, py = oy + y;
            if (a == 0 || px < 0 || py < 0 || px >= image_w || py >= image_h) continue;
            auto* p = asset.rgba.at(px, py);
            p[0] = fill8[0];
            p[1] = fill8[1];
            p[2] = fill8[2];
            p[3] = std::max(p[3], a);
          }
        const double right = std::min<double>(image_w, pen + g.advance);
        CharBox box;
        box.code = c;
        box.word = static_cast<int>(asset.words.size());
        box.quad = {Vec2{pen, cell_top}, Vec2{right, cell_top}, Vec2{right, cell_bottom},
            Vec2{pen, cell_bottom}};
        asset.chars.push_back(box);
        pen += g.advance;
      }
      const double word_right = std::min<double>(image_w, pen);
      word.quad = {Vec2{word_left, cell_top}, Vec2{word_right, cell_top},
          Vec2{word_right, cell_bottom}, Vec2{word_left, cell_bottom}};
      if (!asset.content.empty()) asset.content += ' ';
      asset.content += word.text;
      asset.words.push_back(std::move(word));
    }
    cells.char_count = static_cast<int>(asset.chars.size()) - cells.first_char;
    asset.line_cells.push_back(cells);
  }
  asset.rebuild_alpha_levels();
  return asset;
}

// ---------------------------------------------------------------- mesh

double TextMesh::area() const {
  double a = 0;
  for (const auto& t : triangles)
    a += 0.5 * length(cross(corners[t[1]] - corners[t[0]], corners[t[2]] - corners[t[0]]));
  return a;
}

Vec3 TextMesh::world_point(Vec2 image_px) const {
  double u = image_px.x / asset->rgba.width;
  double v = image_px.y / asset->rgba.height;
  return lerp(lerp(corners[0], corners[1], u), lerp(corners[3], corners[2], u), v);
}

std::array<Vec3, 4> TextMesh::world_quad(const Quad2& quad) const {
  return {world_point(quad[0]), world_point(quad[1]), world_point(quad[2]), world_point(quad[3])};
}

Vec2 TextMesh::image_point(const Vec3& world) const {
  Vec3 d = world - corners[0];
  return {dot(d, right_axis) / width * asset->rgba.width,
      -dot(d, up_axis) / height * asset->rgba.height};
}

TextMesh build_text_mesh(std::shared_ptr<const TextAsset> asset, const RefinedProposal& proposal,
    const TextConfig& cfg, double diffuse_ratio) {
  TextMesh mesh;
  const Vec3 lift = proposal.normal * (cfg.lift_fraction * proposal.initial_side);
  auto corners = proposal.corners();
  for (int i = 0; i < 4; i++) mesh.corners[i] = corners[i] + lift;
  mesh.normal = proposal.normal;
  mesh.right_axis = proposal.right_axis;
  mesh.up_axis = proposal.up_axis;
  mesh.width = proposal.width();
  mesh.height = proposal.height();
  mesh.uv = {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}};
  mesh.material.name = "text";
  mesh.material.color = {srgb_to_linear(asset->fill.x), srgb_to_linear(asset->fill.y),
      srgb_to_linear(asset->fill.z)};
  mesh.material.diffuse = std::clamp(diffuse_ratio, 0.0, 1.0);
  mesh.material.specular = 1.0 - mesh.material.diffuse;
  mesh.asset = std::move(asset);
  return mesh;
}

// ---------------------------------------------------------------- style

double luma8(const Vec3& srgb) {
  return 255.0 * (0.299 * srgb.x + 0.587 * srgb.y + 0.114 * srgb.z);
}

double srgb_to_linear(double v) { return std::pow(std::clamp(v, 0.0, 1.0), 2.2); }
double linear_to_srgb(double v) { return std::pow(std::clamp(v, 0.0, 1.0), 1.0 / 2.2); }

TextStyle sample_style(const TextConfig& cfg, Rng& rng, std::optional<Vec3> background) {
  TextStyle style;
  if (!cfg.palette.empty()) {
    style.fill = cfg.palette[rng.index(cfg.palette.size())];
  } else {
    bool found = false;
    for (int attempt = 0; attempt < 64 && !found; attempt++) {
      Vec3 c{rng.uniform(), rng.uniform(), rng.uniform()};
      if (!background || std::abs(luma8(c) - luma8(*background)) >= cfg.min_luma_contrast) {
        style.fill = c;
        found = true;
      }
    }
    if (!found) style.fill = luma8(*background) >= 127.5 ? Vec3{0, 0, 0} : Vec3{1, 1, 1};
  }
  style.diffuse_ratio = cfg.diffuse_ratio.sample(rng);
  return style;
}

}  // namespace textworld
