#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "textworld/camera.hpp"
#include "textworld/environment.hpp"
#include "textworld/regions.hpp"
#include "textworld/renderer.hpp"
#include "textworld/textgen.hpp"
#include "textworld/viewfinder.hpp"

namespace textworld {

struct SceneSpec {
  std::string source;                   // "builtin:<name>" or a path to an .obj file
  std::filesystem::path anchors;        // optional file of "x y z" lines
};

struct LanguageSpec {
  std::string language;
  std::filesystem::path corpus;         // directory of .txt files or a single file
  std::vector<std::filesystem::path> fonts;
};

struct RunConfig {
  std::vector<SceneSpec> scenes;
  std::vector<LanguageSpec> languages;
  int images_per_scene = 10;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir = "dataset";

  CameraIntrinsics intrinsics;
  WalkConfig walk;
  int walk_steps_per_sample = 1;
  EnvRanges env;
  RegionConfig regions;
  TextConfig text;
  RenderOptions render;

  double min_visibility = 0.25;        // instance kept when visible/unoccluded >= this
  double word_min_visibility = 0.8;    // words below are left out of the annotations
  double word_ignore_visibility = 0.9; // words below are flagged `ignore`
  double min_char_pixels = 8;          // characters shorter on screen flag the word `small`
  bool allow_empty = false;
  int max_attempts = 8;

  bool export_crops = false;
  int crop_min_width = 32;
  int crop_margin = 4;
  bool debug_buffers = false;

  // Execution controls; they do not affect output bytes or the config hash.
  int threads = 0;                     // 0 = hardware concurrency
  std::size_t max_new_samples = 0;     // 0 = unlimited; stops a run early

  // Throws ConfigError on any invalid field or missing file. The seed may be
  // left unset when it is supplied later, e.g. from the command line.
  void validate(bool require_seed = true) const;
  // Stable text form of every output-affecting field.
  std::string canonical() const;
  std::uint64_t hash() const;
};

// `key = value` configuration; relative paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Built-in defaults: English corpus and every bundled atlas.
std::vector<LanguageSpec> default_languages();
std::filesystem::path data_dir();

struct CharRecord {
  std::string text;
  std::vector<Vec2> polygon;  // clipped to the image
};

struct WordRecord {
  std::string text;
  std::string language;
  std::string font;
  int instance = 0;
  int word = 0;  // index within the instance's text, matches the word mask
  std::array<Vec2, 4> quad{};  // projected corners, unclipped
  std::vector<Vec2> polygon;   // quad clipped to the image
  bool small = false;
  bool ignore = false;
  double visibility = 0;
  std::vector<CharRecord> chars;
};

struct SampleRecord {
  std::string id;
  std::string image;  // path relative to the dataset directory
  int width = 0, height = 0;
  std::string scene;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  int attempt = 0;
  CameraPose pose;
  int instances = 0;
  std::vector<WordRecord> words;
};

nlohmann::json to_json(const SampleRecord& record);
SampleRecord sample_from_json(const nlohmann::json& j);

// Scene plus its precomputed walk.
struct SceneContext {
  std::string id;  // file-name safe scene name
  std::uint64_t key = 0;
  Scene scene;
  std::vector<CameraPose> poses;
};

std::string sanitize_name(std::string_view name);

// Loads a scene spec; anchors from the spec's file replace the scene's own.
Scene load_scene_spec(const SceneSpec& spec);
SceneContext prepare_scene(Scene scene, const RunConfig& cfg);

struct LanguageResources {
  std::string language;
  Corpus corpus;
  std::vector<GlyphAtlas> fonts;
};

struct TextResources {
  std::vector<LanguageResources> languages;
  static TextResources load(const RunConfig& cfg);
};

struct GeneratedSample {
  SampleRecord record;
  FrameBuffers frame;
};

struct SampleStats {
  int attempts = 0;
  int proposals = 0;
  int refined = 0;
  int kept = 0;
  int dropped_low_visibility = 0;
};

// One image and its annotations. nullopt when every attempt ends with no text
// instance and empty samples are not allowed.
std::optional<GeneratedSample> generate_sample(const SceneContext& ctx, const TextResources& text,
    const RunConfig& cfg, std::size_t index, SampleStats* stats = nullptr);

std::string sample_id(const SceneContext& ctx, std::uint64_t seed, std::size_t index);

struct SceneSummary {
  std::string source;
  std::string id;
  std::size_t requested = 0;
  std::size_t images = 0;
  std::vector<std::size_t> failed;
  std::size_t pending = 0;
  std::string error;
};

struct Manifest {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<SceneSummary> scenes;
  std::size_t images = 0;
  std::size_t failed = 0;
  std::size_t words = 0;
  bool complete = false;

  nlohmann::json to_json() const;
  bool partial_failure() const;
};

struct RunStats {
  std::size_t generated = 0;     // samples produced by this invocation
  std::size_t skipped_existing = 0;
  double seconds = 0;            // wall time spent generating
};

Manifest run_dataset(const RunConfig& cfg, RunStats* stats = nullptr);

std::vector<SampleRecord> read_annotations(const std::filesystem::path& dataset_dir);

struct CropStats {
  std::size_t words = 0;
  std::size_t written = 0;
  std::size_t dropped_narrow = 0;
  std::size_t dropped_ignored = 0;
};

// Axis-aligned word crops with `margin` pixels around each polygon's bounding
// box, clipped to the image; crops narrower than `min_width` are dropped.
// Writes <out_dir>/images/*.png and <out_dir>/labels.txt.
CropStats export_word_crops(const std::filesystem::path& dataset_dir,
    const std::filesystem::path& out_dir, int min_width, int margin);

// ICDAR-style "x1,y1,...,x4,y4,text" files, one per image; ignored words as ###.
std::size_t export_icdar(const std::filesystem::path& dataset_dir,
    const std::filesystem::path& out_dir);

// Annotation soundness checks; returns one message per violation.
std::vector<std::string> validate_dataset(const std::filesystem::path& dataset_dir);
std::vector<std::string> validate_record(const SampleRecord& record);

// Still frames without text from each anchor at `yaw_count` headings.
std::size_t render_previews(const Scene& scene, const CameraIntrinsics& intrinsics,
    const std::filesystem::path& out_dir, int yaw_count);

}  // namespace textworld
