#include "textworld/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "textworld/error.hpp"
#include "textworld/log.hpp"
#include "textworld/procedural.hpp"

namespace textworld {

namespace {

constexpr std::uint64_t kWalkKey = 0x77616c6b;    // "walk"
constexpr std::uint64_t kEnvKey = 0x656e76;       // "env"
constexpr std::uint64_t kSampleKey = 0x73616d70;  // "samp"

std::vector<Vec3> read_anchor_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read anchors " + path.string());
  std::vector<Vec3> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    n++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    Vec3 p;
    if (!(ss >> p.x)) continue;
    if (!(ss >> p.y >> p.z))
      throw ParseError(path.string() + ":" + std::to_string(n) + ": expected 'x y z'");
    out.push_back(p);
  }
  return out;
}

std::optional<Vec3> mean_background(const Image8& rgb, const Polygon& poly) {
  if (poly.size() < 3) return std::nullopt;
  double minx = kInf, miny = kInf, maxx = -kInf, maxy = -kInf;
  for (const auto& p : poly) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  Vec3 sum;
  std::size_t count = 0;
  for (int y = std::max(0, int(miny)); y < std::min(rgb.height, int(std::ceil(maxy))); y++)
    for (int x = std::max(0, int(minx)); x < std::min(rgb.width, int(std::ceil(maxx))); x++) {
      if (!contains_convex(poly, {x + 0.5, y + 0.5})) continue;
      const auto* p = rgb.at(x, y);
      sum += Vec3{double(p[0]), double(p[1]), double(p[2])};
      count++;
    }
  if (count == 0) return std::nullopt;
  return sum / (255.0 * count);
}

std::optional<std::array<Vec2, 4>> project_quad(const Camera& camera,
    const std::array<Vec3, 4>& quad) {
  std::array<Vec2, 4> out;
  for (int i = 0; i < 4; i++) {
    auto p = camera.project(quad[i]);
    if (!p) return std::nullopt;
    out[i] = p->pixel;
  }
  return out;
}

std::vector<WordRecord> annotate(const FrameBuffers& frame, std::span<const TextMesh> meshes,
    const Camera& camera, const RunConfig& cfg) {
  const int W = camera.intrinsics().width, H = camera.intrinsics().height;
  std::vector<WordRecord> words;
  for (std::size_t mi = 0; mi < meshes.size(); mi++) {
    const TextMesh& mesh = meshes[mi];
    const TextAsset& asset = *mesh.asset;
    for (std::size_t wi = 0; wi < asset.words.size(); wi++) {
      const TextCoverage& cov = frame.word_coverage[mi][wi];
      if (cov.visible == 0) continue;
      const WordBox& word = asset.words[wi];
      auto quad = project_quad(camera, mesh.world_quad(word.quad));
      if (!quad) continue;
      WordRecord rec;
      rec.text = word.text;
      rec.language = asset.language;
      rec.font = asset.font_id;
      rec.instance = static_cast<int>(mi);
      rec.word = static_cast<int>(wi);
      rec.quad = *quad;
      rec.polygon = clip_to_rect(*quad, 0, 0, W, H);
      if (rec.polygon.size() < 3 || area(rec.polygon) <= 0) continue;
      rec.visibility = cov.fraction();
      if (rec.visibility < cfg.word_min_visibility) continue;
      rec.ignore = rec.visibility < cfg.word_ignore_visibility;
      double min_height = kInf;
      bool chars_ok = true;
      for (int ci = word.first_char; ci < word.first_char + word.char_count; ci++) {
        const CharBox& box = asset.chars[ci];
        auto cq = project_quad(camera, mesh.world_quad(box.quad));
        if (!cq) {
          chars_ok = false;
          break;
        }
        const auto& q = *cq;
        min_height = std::min(min_height, 0.5 * (length(q[3] - q[0]) + length(q[2] - q[1])));
        rec.chars.push_back({utf8_encode(box.code), clip_to_rect(q, 0, 0, W, H)});
      }
      if (!chars_ok) continue;
      rec.small = min_height < cfg.min_char_pixels;
      words.push_back(std::move(rec));
    }
  }
  return words;
}

CameraPose walk_forward(const Scene& scene, CameraPose pose, const WalkConfig& cfg, int steps,
    Rng& rng) {
  for (int i = 0; i < steps; i++)
    if (auto step = random_walk_step(scene, pose, cfg, rng)) pose = step->pose;
  return pose;
}

void write_atomic(const std::filesystem::path& path, const std::string& data) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << data;
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_png_atomic(const std::filesystem::path& path, const Image8& image) {
  auto tmp = path;
  tmp += ".tmp";
  write_png(tmp, image);
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::string sanitize_name(std::string_view name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '-';
  return out.empty() ? "scene" : out;
}

Scene load_scene_spec(const SceneSpec& spec) {
  SceneData data;
  if (spec.source.rfind("builtin:", 0) == 0)
    data = make_builtin_scene(spec.source.substr(8));
  else
    data = read_obj_scene(spec.source);
  if (!spec.anchors.empty()) data.anchors = read_anchor_file(spec.anchors);
  return Scene(std::move(data));
}

SceneContext prepare_scene(Scene scene, const RunConfig& cfg) {
  SceneContext ctx{sanitize_name(scene.name()), fnv1a(scene.name()), std::move(scene), {}};
  if (ctx.scene.anchors().empty())
    throw ConfigError("scene '" + ctx.scene.name() + "' has no camera anchors");
  Rng rng = Rng::derive(*cfg.seed, {ctx.key, kWalkKey});
  auto walk = run_walk(ctx.scene, ctx.scene.anchors(), cfg.walk,
      std::size_t(cfg.images_per_scene) * cfg.walk_steps_per_sample, rng);
  for (std::size_t i = 0; i < std::size_t(cfg.images_per_scene); i++)
    ctx.poses.push_back(walk.poses[(i + 1) * cfg.walk_steps_per_sample - 1]);
  return ctx;
}

TextResources TextResources::load(const RunConfig& cfg) {
  TextResources res;
  for (const auto& spec : cfg.languages) {
    LanguageResources lang{spec.language, Corpus::load(spec.corpus, spec.language), {}};
    for (const auto& f : spec.fonts) lang.fonts.push_back(GlyphAtlas::load(f));
    std::vector<const GlyphAtlas*> ptrs;
    for (const auto& f : lang.fonts) ptrs.push_back(&f);
    lang.corpus.restrict_to(ptrs);
    res.languages.push_back(std::move(lang));
  }
  if (res.languages.empty()) throw ConfigError("no languages configured");
  return res;
}

std::string sample_id(const SceneContext& ctx, std::uint64_t seed, std::size_t index) {
  return ctx.id + "_" + std::to_string(seed) + "_" + std::to_string(index);
}

std::optional<GeneratedSample> generate_sample(const SceneContext& ctx, const TextResources& text,
    const RunConfig& cfg, std::size_t index, SampleStats* stats) {
  const Scene& scene = ctx.scene;
  const std::uint64_t seed = *cfg.seed;
  SampleStats local;
  SampleStats& st = stats ? *stats : local;

  Rng env_rng = Rng::derive(seed, {ctx.key, kEnvKey, index / std::size_t(cfg.env.per_n_images)});
  const EnvironmentOverlay env = randomize_environment(scene, cfg.env, env_rng);

  for (int attempt = 0; attempt < cfg.max_attempts; attempt++) {
    st.attempts++;
    Rng rng = Rng::derive(seed, {ctx.key, kSampleKey, index, std::uint64_t(attempt)});
    CameraPose pose = ctx.poses.at(index);
    if (attempt > 0) pose = walk_forward(scene, pose, cfg.walk, attempt, rng);
    Camera camera(pose, cfg.intrinsics, scene.gravity());

    FrameBuffers first = render(scene, env, camera, {});
    auto initial = propose_initial(first.normals, cfg.regions, rng);
    st.proposals += static_cast<int>(initial.size());
    std::vector<RefinedProposal> refined;
    for (const auto& p : initial)
      if (auto r = rectify_in_3d(p, scene, camera, cfg.regions))
        refined.push_back(expand(*r, scene, camera, cfg.regions));
    st.refined += static_cast<int>(refined.size());
    auto kept = prune_occlusions(refined, camera, rng);

    std::vector<TextMesh> meshes;
    for (const auto& p : kept) {
      const auto& lang = text.languages[rng.index(text.languages.size())];
      const auto& font = lang.fonts[rng.index(lang.fonts.size())];
      TextStyle style = sample_style(cfg.text, rng, mean_background(first.rgb, screen_polygon(p, camera)));
      auto asset = layout_text(p.width(), p.height(), font, lang.corpus, cfg.text, style, rng);
      if (!asset) continue;
      meshes.push_back(build_text_mesh(std::make_shared<const TextAsset>(std::move(*asset)), p,
          cfg.text, style.diffuse_ratio));
    }

    FrameBuffers frame;
    while (!meshes.empty()) {
      frame = render(scene, env, camera, meshes, cfg.render);
      std::vector<TextMesh> visible;
      for (std::size_t i = 0; i < meshes.size(); i++)
        if (frame.instance_coverage[i].fraction() >= cfg.min_visibility)
          visible.push_back(meshes[i]);
      if (visible.size() == meshes.size()) break;
      st.dropped_low_visibility += static_cast<int>(meshes.size() - visible.size());
      meshes = std::move(visible);
    }
    if (meshes.empty()) continue;
    auto words = annotate(frame, meshes, camera, cfg);
    if (words.empty()) continue;
    st.kept += static_cast<int>(meshes.size());

    GeneratedSample out;
    out.record.id = sample_id(ctx, seed, index);
    out.record.image = out.record.id + ".png";
    out.record.width = cfg.intrinsics.width;
    out.record.height = cfg.intrinsics.height;
    out.record.scene = scene.name();
    out.record.index = index;
    out.record.seed = seed;
    out.record.attempt = attempt;
    out.record.pose = pose;
    out.record.instances = static_cast<int>(meshes.size());
    out.record.words = std::move(words);
    out.frame = std::move(frame);
    return out;
  }

  if (!cfg.allow_empty) return std::nullopt;
  Camera camera(ctx.poses.at(index), cfg.intrinsics, scene.gravity());
  GeneratedSample out;
  out.frame = render(scene, env, camera, {}, cfg.render);
  out.record.id = sample_id(ctx, seed, index);
  out.record.image = out.record.id + ".png";
  out.record.width = cfg.intrinsics.width;
  out.record.height = cfg.intrinsics.height;
  out.record.scene = scene.name();
  out.record.index = index;
  out.record.seed = seed;
  out.record.attempt = cfg.max_attempts;
  out.record.pose = ctx.poses.at(index);
  return out;
}

bool Manifest::partial_failure() const {
  if (failed > 0) return true;
  return std::any_of(scenes.begin(), scenes.end(),
      [](const SceneSummary& s) { return !s.error.empty(); });
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json j;
  j["format"] = "textworld-manifest 1";
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(config_hash));
  j["config_hash"] = hex;
  j["seed"] = seed;
  j["complete"] = complete;
  j["images"] = images;
  j["failed"] = failed;
  j["words"] = words;
  j["scenes"] = nlohmann::json::array();
  for (const auto& s : scenes) {
    nlohmann::json js;
    js["source"] = s.source;
    js["id"] = s.id;
    js["requested"] = s.requested;
    js["images"] = s.images;
    js["failed"] = s.failed;
    js["pending"] = s.pending;
    if (!s.error.empty()) js["error"] = s.error;
    j["scenes"].push_back(js);
  }
  return j;
}

Manifest run_dataset(const RunConfig& cfg, RunStats* stats) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.output_dir))
    throw Error("cannot create output directory " + cfg.output_dir.string());
  {
    auto probe = cfg.output_dir / ".write-test";
    std::ofstream out(probe);
    if (!out) throw Error("output directory is not writable: " + cfg.output_dir.string());
    out.close();
    std::filesystem::remove(probe);
  }

  Manifest manifest;
  manifest.config_hash = cfg.hash();
  if (auto existing = cfg.output_dir / "manifest.json"; std::filesystem::exists(existing)) {
    std::ifstream in(existing);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("unreadable manifest " + existing.string() + ": " + e.what());
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(manifest.config_hash));
    if (j.value("config_hash", std::string()) != hex)
      throw ConfigError(cfg.output_dir.string() +
                        " holds a dataset generated with a different configuration");
  }
  const TextResources text = TextResources::load(cfg);
  manifest.seed = *cfg.seed;
  RunStats local;
  RunStats& rs = stats ? *stats : local;
  std::size_t budget = cfg.max_new_samples ? cfg.max_new_samples : SIZE_MAX;
  std::vector<std::string> ordered_ids;

  for (const auto& spec : cfg.scenes) {
    SceneSummary summary;
    summary.source = spec.source;
    summary.requested = cfg.images_per_scene;
    std::optional<SceneContext> ctx;
    try {
      ctx = prepare_scene(load_scene_spec(spec), cfg);
    } catch (const std::exception& e) {
      summary.error = e.what();
      log_warning("scene ", spec.source, " skipped: ", e.what());
      manifest.scenes.push_back(summary);
      continue;
    }
    summary.id = ctx->id;

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < summary.requested; i++) {
      auto id = sample_id(*ctx, *cfg.seed, i);
      ordered_ids.push_back(id);
      if (std::filesystem::exists(cfg.output_dir / (id + ".json")) &&
          std::filesystem::exists(cfg.output_dir / (id + ".png"))) {
        rs.skipped_existing++;
        continue;
      }
      todo.push_back(i);
    }
    if (todo.size() > budget) {
      summary.pending = todo.size() - budget;
      todo.resize(budget);
    }
    budget -= todo.size();

    std::vector<char> failed(todo.size(), 0);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&]() {
      for (std::size_t k; (k = next++) < todo.size();) {
        try {
          auto sample = generate_sample(*ctx, text, cfg, todo[k]);
          if (!sample) {
            failed[k] = 1;
            continue;
          }
          auto stem = cfg.output_dir / sample->record.id;
          write_png_atomic(stem.string() + ".png", sample->frame.rgb);
          if (cfg.debug_buffers) write_debug_buffers(stem, sample->frame);
          write_atomic(stem.string() + ".json", to_json(sample->record).dump() + "\n");
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = todo.size();
        }
      }
    };
    auto t0 = std::chrono::steady_clock::now();
    int threads = cfg.threads > 0 ? cfg.threads
                                  : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    threads = std::min<int>(threads, std::max<std::size_t>(1, todo.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; t++) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    rs.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (error) std::rethrow_exception(error);

    for (std::size_t k = 0; k < todo.size(); k++) {
      if (failed[k]) summary.failed.push_back(todo[k]);
      else rs.generated++;
    }
    for (std::size_t i = 0; i < summary.requested; i++)
      if (std::filesystem::exists(cfg.output_dir / (sample_id(*ctx, *cfg.seed, i) + ".png")))
        summary.images++;
    manifest.images += summary.images;
    manifest.failed += summary.failed.size();
    manifest.scenes.push_back(summary);
  }

  // Consolidated annotations in deterministic order.
  std::string all;
  for (const auto& id : ordered_ids) {
    auto path = cfg.output_dir / (id + ".json");
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    auto j = nlohmann::json::parse(ss.str());
    manifest.words += j["words"].size();
    all += j.dump() + "\n";
  }
  write_atomic(cfg.output_dir / "annotations.jsonl", all);
  manifest.complete = std::all_of(manifest.scenes.begin(), manifest.scenes.end(),
      [](const SceneSummary& s) { return s.pending == 0; });
  write_atomic(cfg.output_dir / "manifest.json", manifest.to_json().dump(2) + "\n");

  if (cfg.export_crops && manifest.complete)
    export_word_crops(cfg.output_dir, cfg.output_dir / "crops", cfg.crop_min_width, cfg.crop_margin);
  return manifest;
}

std::size_t render_previews(const Scene& scene, const CameraIntrinsics& intrinsics,
    const std::filesystem::path& out_dir, int yaw_count) {
  std::filesystem::create_directories(out_dir);
  EnvironmentOverlay env = base_environment(scene);
  std::size_t n = 0;
  const auto& anchors = scene.anchors();
  for (std::size_t a = 0; a < anchors.size(); a++)
    for (int k = 0; k < yaw_count; k++) {
      CameraPose pose{anchors[a], 0.0, 2 * kPi * k / yaw_count, 0.0};
      Camera camera(pose, intrinsics, scene.gravity());
      auto frame = render(scene, env, camera, {});
      write_png(out_dir / (sanitize_name(scene.name()) + "_anchor" + std::to_string(a) + "_yaw" +
                              std::to_string(k) + ".png"),
          frame.rgb);
      n++;
    }
  return n;
}

}  // namespace textworld
