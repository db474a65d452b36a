#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "textworld/error.hpp"
#include "textworld/pipeline.hpp"
#include "textworld/procedural.hpp"

#ifndef TEXTWORLD_DATA_DIR
#define TEXTWORLD_DATA_DIR "data"
#endif

namespace textworld {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("TEXTWORLD_DATA_DIR")) return env;
  return TEXTWORLD_DATA_DIR;
}

namespace {

std::vector<std::filesystem::path> bundled_atlases() {
  std::vector<std::filesystem::path> out;
  auto dir = data_dir() / "atlases";
  if (std::filesystem::is_directory(dir))
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.path().extension() == ".atlas") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// '#' opens a comment at line start or when surrounded by whitespace, so
// "#rrggbb" palette colors survive.
std::string strip_comment(const std::string& raw) {
  for (std::size_t i = 0; i < raw.size(); i++) {
    if (raw[i] != '#') continue;
    bool before = trim(raw.substr(0, i)).empty() || raw[i - 1] == ' ' || raw[i - 1] == '\t';
    bool after = i + 1 == raw.size() || raw[i + 1] == ' ' || raw[i + 1] == '\t';
    if (trim(raw.substr(0, i)).empty() || (before && after)) return raw.substr(0, i);
  }
  return raw;
}

struct Parser {
  int line = 0;
  std::string key, value;
  std::filesystem::path base;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line) + " (" + key + "): " + what);
  }
  double real() const {
    std::istringstream ss(value);
    double v;
    std::string rest;
    if (!(ss >> v) || (ss >> rest)) fail("expected a number, got '" + value + "'");
    return v;
  }
  int integer() const {
    int v;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size())
      fail("expected an integer, got '" + value + "'");
    return v;
  }
  std::uint64_t u64() const {
    std::uint64_t v;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size())
      fail("expected a non-negative integer, got '" + value + "'");
    return v;
  }
  bool boolean() const {
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    fail("expected true or false, got '" + value + "'");
  }
  Interval interval() const {
    std::istringstream ss(value);
    Interval iv;
    std::string rest;
    if (!(ss >> iv.lo)) fail("expected 'lo hi'");
    if (!(ss >> iv.hi)) iv.hi = iv.lo;
    if (ss >> rest) fail("expected 'lo hi'");
    return iv;
  }
  std::filesystem::path path(const std::string& v) const {
    std::filesystem::path p(v);
    return p.is_absolute() ? p : (base / p).lexically_normal();
  }
  Vec3 hex_color(const std::string& v) const {
    std::string h = v[0] == '#' ? v.substr(1) : v;
    unsigned r, g, b;
    if (h.size() != 6 || std::sscanf(h.c_str(), "%2x%2x%2x", &r, &g, &b) != 3)
      fail("expected #rrggbb colors");
    return {r / 255.0, g / 255.0, b / 255.0};
  }
};

}  // namespace

std::vector<LanguageSpec> default_languages() {
  return {{"en", data_dir() / "corpus" / "en", bundled_atlases()}};
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  Parser ps;
  ps.base = base_dir;
  std::vector<std::string> language_order;
  std::map<std::string, std::filesystem::path> corpora;
  std::map<std::string, std::vector<std::filesystem::path>> fonts;

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ps.line++;
    raw = strip_comment(raw);
    std::string line = trim(raw);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      ps.key = line;
      ps.fail("expected 'key = value'");
    }
    ps.key = trim(line.substr(0, eq));
    ps.value = trim(line.substr(eq + 1));
    const std::string& k = ps.key;

    if (k == "seed") cfg.seed = ps.u64();
    else if (k == "output_dir") cfg.output_dir = ps.path(ps.value);
    else if (k == "images_per_scene") cfg.images_per_scene = ps.integer();
    else if (k == "threads") cfg.threads = ps.integer();
    else if (k == "scene") {
      SceneSpec s;
      s.source = ps.value.rfind("builtin:", 0) == 0 ? ps.value : ps.path(ps.value).string();
      cfg.scenes.push_back(s);
    } else if (k == "scene.anchors") {
      if (cfg.scenes.empty()) ps.fail("scene.anchors must follow a scene entry");
      cfg.scenes.back().anchors = ps.path(ps.value);
    } else if (k == "language") {
      for (const auto& l : split(ps.value, ','))
        if (std::find(language_order.begin(), language_order.end(), l) == language_order.end())
          language_order.push_back(l);
    } else if (k.rfind("corpus.", 0) == 0) {
      corpora[k.substr(7)] = ps.path(ps.value);
    } else if (k.rfind("fonts.", 0) == 0) {
      auto& list = fonts[k.substr(6)];
      for (const auto& f : split(ps.value, ',')) list.push_back(ps.path(f));
    } else if (k == "camera.width") cfg.intrinsics.width = ps.integer();
    else if (k == "camera.height") cfg.intrinsics.height = ps.integer();
    else if (k == "camera.fov_degrees") cfg.intrinsics.vertical_fov = radians(ps.real());
    else if (k == "walk.reset_period") cfg.walk.reset_period = ps.integer();
    else if (k == "walk.max_ray_length") cfg.walk.max_ray_length = ps.real();
    else if (k == "walk.anchor_count") cfg.walk.anchor_count = ps.integer();
    else if (k == "walk.steps_per_sample") cfg.walk_steps_per_sample = ps.integer();
    else if (k == "walk.max_retries") cfg.walk.max_retries = ps.integer();
    else if (k == "walk.boundary_margin") cfg.walk.boundary_margin_fraction = ps.real();
    else if (k == "walk.min_step") cfg.walk.min_step_fraction = ps.real();
    else if (k == "walk.band") {
      auto iv = ps.interval();
      cfg.walk.band_low = iv.lo;
      cfg.walk.band_high = iv.hi;
    } else if (k == "walk.pitch_degrees") {
      auto iv = ps.interval();
      cfg.walk.pitch_min = radians(iv.lo);
      cfg.walk.pitch_max = radians(iv.hi);
    } else if (k == "env.intensity") cfg.env.intensity = ps.interval();
    else if (k == "env.hue_degrees") cfg.env.hue_degrees = ps.interval();
    else if (k == "env.saturation") cfg.env.saturation = ps.interval();
    else if (k == "env.fog_density") cfg.env.fog_density = ps.interval();
    else if (k == "env.cone_degrees") cfg.env.cone_half_angle = radians(ps.real());
    else if (k == "env.per_n_images") cfg.env.per_n_images = ps.integer();
    else if (k == "regions.window") cfg.regions.window = ps.integer();
    else if (k == "regions.stride") cfg.regions.stride = ps.integer();
    else if (k == "regions.cosine_threshold") cfg.regions.cosine_threshold = ps.real();
    else if (k == "regions.max_proposals") cfg.regions.max_proposals = ps.integer();
    else if (k == "regions.max_expansion_ratio") cfg.regions.max_expansion_ratio = ps.real();
    else if (k == "regions.expansion_step") cfg.regions.expansion_step_fraction = ps.real();
    else if (k == "regions.surface_distance") cfg.regions.surface_distance_fraction = ps.real();
    else if (k == "regions.probe_samples") cfg.regions.probe_samples = ps.integer();
    else if (k == "text.min_line_height") cfg.text.min_line_height = ps.real();
    else if (k == "text.max_line_height") cfg.text.max_line_height = ps.real();
    else if (k == "text.max_lines") cfg.text.max_lines = ps.integer();
    else if (k == "text.palette") {
      cfg.text.palette.clear();
      for (const auto& c : split(ps.value, ',')) cfg.text.palette.push_back(ps.hex_color(c));
    } else if (k == "text.min_contrast") cfg.text.min_luma_contrast = ps.real();
    else if (k == "text.diffuse_ratio") cfg.text.diffuse_ratio = ps.interval();
    else if (k == "text.lift") cfg.text.lift_fraction = ps.real();
    else if (k == "sample.min_visibility") cfg.min_visibility = ps.real();
    else if (k == "sample.word_min_visibility") cfg.word_min_visibility = ps.real();
    else if (k == "sample.word_ignore_visibility") cfg.word_ignore_visibility = ps.real();
    else if (k == "sample.min_char_pixels") cfg.min_char_pixels = ps.real();
    else if (k == "sample.allow_empty") cfg.allow_empty = ps.boolean();
    else if (k == "sample.max_attempts") cfg.max_attempts = ps.integer();
    else if (k == "render.supersample") cfg.render.supersample = ps.boolean();
    else if (k == "output.debug_buffers") cfg.debug_buffers = ps.boolean();
    else if (k == "output.crops") cfg.export_crops = ps.boolean();
    else if (k == "crops.min_width") cfg.crop_min_width = ps.integer();
    else if (k == "crops.margin") cfg.crop_margin = ps.integer();
    else ps.fail("unknown key");
  }

  for (const auto& [lang, _] : corpora)
    if (std::find(language_order.begin(), language_order.end(), lang) == language_order.end())
      language_order.push_back(lang);
  if (language_order.empty()) {
    cfg.languages = default_languages();
  } else {
    for (const auto& lang : language_order) {
      LanguageSpec spec;
      spec.language = lang;
      spec.corpus = corpora.count(lang) ? corpora[lang] : data_dir() / "corpus" / lang;
      spec.fonts = fonts.count(lang) ? fonts[lang] : bundled_atlases();
      cfg.languages.push_back(spec);
    }
  }
  cfg.validate(false);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_run_config(ss.str(), path.parent_path());
  if (const char* env = std::getenv("TEXTWORLD_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  return cfg;
}

void RunConfig::validate(bool require_seed) const {
  if (scenes.empty()) throw ConfigError("no scenes configured");
  if (images_per_scene < 1) throw ConfigError("images_per_scene must be >= 1");
  if (require_seed && !seed) throw ConfigError("a seed is required");
  if (languages.empty()) throw ConfigError("no languages configured");
  auto names = builtin_scene_names();
  for (const auto& s : scenes) {
    if (s.source.rfind("builtin:", 0) == 0) {
      auto name = s.source.substr(8);
      if (std::find(names.begin(), names.end(), name) == names.end())
        throw ConfigError("unknown builtin scene '" + name + "'");
    } else if (!std::filesystem::exists(s.source)) {
      throw ConfigError("scene file not found: " + s.source);
    }
    if (!s.anchors.empty() && !std::filesystem::exists(s.anchors))
      throw ConfigError("anchor file not found: " + s.anchors.string());
  }
  for (const auto& l : languages) {
    if (!std::filesystem::exists(l.corpus))
      throw ConfigError("corpus for '" + l.language + "' not found: " + l.corpus.string());
    if (l.fonts.empty()) throw ConfigError("no fonts for language '" + l.language + "'");
    for (const auto& f : l.fonts)
      if (!std::filesystem::exists(f)) throw ConfigError("font atlas not found: " + f.string());
  }
  try {
    intrinsics.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  walk.validate();
  env.validate();
  regions.validate();
  text.validate();
  if (walk_steps_per_sample < 1) throw ConfigError("walk.steps_per_sample must be >= 1");
  if (!(min_visibility >= 0 && min_visibility <= 1))
    throw ConfigError("sample.min_visibility must lie in [0, 1]");
  if (!(word_min_visibility >= 0 && word_min_visibility <= 1))
    throw ConfigError("sample.word_min_visibility must lie in [0, 1]");
  if (!(word_ignore_visibility >= 0 && word_ignore_visibility <= 1))
    throw ConfigError("sample.word_ignore_visibility must lie in [0, 1]");
  if (!(min_char_pixels >= 0)) throw ConfigError("sample.min_char_pixels must be >= 0");
  if (max_attempts < 1) throw ConfigError("sample.max_attempts must be >= 1");
  if (crop_min_width < 1 || crop_margin < 0) throw ConfigError("invalid crop settings");
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

std::string RunConfig::canonical() const {
  std::ostringstream o;
  o.precision(17);
  auto iv = [&](const char* k, const Interval& v) { o << k << '=' << v.lo << ' ' << v.hi << '\n'; };
  o << "seed=" << (seed ? std::to_string(*seed) : "none") << '\n';
  o << "images_per_scene=" << images_per_scene << '\n';
  for (const auto& s : scenes) o << "scene=" << s.source << '|' << s.anchors.string() << '\n';
  for (const auto& l : languages) {
    o << "language=" << l.language << '|' << l.corpus.string();
    for (const auto& f : l.fonts) o << '|' << f.string();
    o << '\n';
  }
  o << "camera=" << intrinsics.width << ' ' << intrinsics.height << ' ' << intrinsics.vertical_fov
    << '\n';
  o << "walk=" << walk.anchor_count << ' ' << walk.reset_period << ' ' << walk.max_ray_length << ' '
    << walk.band_low << ' ' << walk.band_high << ' ' << walk.pitch_min << ' ' << walk.pitch_max
    << ' ' << walk.yaw_range << ' ' << walk.min_step_fraction << ' ' << walk.max_retries << ' '
    << walk.boundary_margin_fraction << ' ' << walk_steps_per_sample << '\n';
  iv("env.intensity", env.intensity);
  iv("env.hue", env.hue_degrees);
  iv("env.saturation", env.saturation);
  iv("env.fog", env.fog_density);
  o << "env.cone=" << env.cone_half_angle << "\nenv.per_n=" << env.per_n_images << '\n';
  o << "regions=" << regions.window << ' ' << regions.stride << ' ' << regions.cosine_threshold
    << ' ' << regions.max_proposals << ' ' << regions.surface_distance_fraction << ' '
    << regions.max_expansion_ratio << ' ' << regions.expansion_step_fraction << ' '
    << regions.probe_samples << ' ' << regions.probe_lift_fraction << '\n';
  o << "text=" << text.min_line_height << ' ' << text.max_line_height << ' ' << text.max_lines
    << ' ' << text.max_skipped_words << ' ' << text.min_luma_contrast << ' ' << text.lift_fraction
    << '\n';
  iv("text.diffuse", text.diffuse_ratio);
  o << "text.palette=";
  for (const auto& c : text.palette) o << c.x << ',' << c.y << ',' << c.z << ';';
  o << '\n';
  o << "render.supersample=" << render.supersample << '\n';
  o << "sample=" << min_visibility << ' ' << word_min_visibility << ' ' << word_ignore_visibility << ' ' << min_char_pixels
    << ' ' << allow_empty << ' ' << max_attempts << '\n';
  o << "crops=" << export_crops << ' ' << crop_min_width << ' ' << crop_margin << '\n';
  o << "debug_buffers=" << debug_buffers << '\n';
  return o.str();
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical()); }

}  // namespace textworld
